"""
Command-line runners for the LS-RBF toolkit
"""
