"""
LS-RBF toolkit test suites
"""
