#!/usr/bin/env python3
"""
Ejecutor principal de atn-lab

Uso: python Run.py <subcomando> [opciones]   (ver python Run.py --help)
"""

import sys
from pathlib import Path

# Agregar el directorio raíz al path
root_dir = Path(__file__).parent
sys.path.insert(0, str(root_dir))


def check_dependencies() -> bool:
    """Verifica que las dependencias estén instaladas"""
    required = ["numpy", "scipy", "markdown", "pygments"]
    missing = []
    for module in required:
        try:
            __import__(module)
        except ImportError:
            missing.append(module)

    if missing:
        print("\n❌ Faltan dependencias:\n", file=sys.stderr)
        for module in missing:
            print(f"  • {module}", file=sys.stderr)
        print("\n💡 Instala con:\n   pip install -r requirements.txt\n", file=sys.stderr)
        return False
    return True


def main() -> int:
    """Función principal"""
    if not check_dependencies():
        return 2
    from src.main import main as run_cli

    try:
        return run_cli(sys.argv[1:])
    except KeyboardInterrupt:
        print("\n👋 Interrumpido", file=sys.stderr)
        return 130


if __name__ == "__main__":
    sys.exit(main())
