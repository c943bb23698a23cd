"""
Mean-square integration of squared error terms.
"""
