"""
Files and Configuration
"""
