"""
Core app: one-bit sampling simulation, forward models, covariance recovery
and the modified Bussgang law.
"""
