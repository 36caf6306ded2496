"""
Utility modules for robustik.
"""
