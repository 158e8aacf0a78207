"""
gaussloop - Inférence par passage de messages sur modèles gaussiens creux.

Ce package fournit :
- La propagation de croyance gaussienne (GaBP) et sa version corrigée des boucles (LCBP)
- L'estimation des covariances de cavité par propagation de réponse
- La reconstruction exacte de la matrice de covariance par graphes croissants
- Des variantes d'Expectation Propagation pour potentiels non linéaires
- Un oracle dense exact pour vérifier chaque résultat
"""

__version__ = "1.0.0"
__author__ = "gaussloop Team"
