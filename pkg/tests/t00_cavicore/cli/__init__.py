"""
Command Line
"""
