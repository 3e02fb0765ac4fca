"""
Cavity Transfer Matrices
"""
