"""Unit tests for core and engine modules"""
