"""
Filtrations, persistent homology and the brute-force homology oracle.
"""
