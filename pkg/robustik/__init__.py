"""
robustik: robust IK-pair selection for dual-arm assembly.
"""
__version__ = '0.1.0'
