"""
cavicore System Tests
"""
