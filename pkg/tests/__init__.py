"""
Test suite for noncolliding-extremes.
"""
