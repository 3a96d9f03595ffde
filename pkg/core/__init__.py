"""
Numerical building blocks: kernels, geometry, scaling policies, registries, configuration
"""
