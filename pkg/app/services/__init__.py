"""
Service layer for the arithmetic computations.
"""
