"""
Tests for squeeze-lab
"""
