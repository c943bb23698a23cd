"""
Analytic helpers: double-double kernels, zeta evaluation and series constants.
"""
