"""
Test suite for robustik.
"""
