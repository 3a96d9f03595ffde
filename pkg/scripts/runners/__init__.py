"""Python package marker"""
