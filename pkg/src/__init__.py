"""
atn-lab

Biblioteca y CLI para poner en forma computable los objetos de dinámica
medible alrededor de la propiedad AT(n): medidas de bolas de Hamming sobre
palabras "funny", cotas binomiales, estimadores de entropía, un resolvedor
numérico de la aproximación AT(n) y un simulador del producto sesgado de
Furstenberg.
"""

__version__ = "1.0.0"
__app_name__ = "atn-lab"
