"""
Library Tests
"""
