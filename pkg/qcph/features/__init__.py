"""
Quotient-complex descriptor vectors.
"""
