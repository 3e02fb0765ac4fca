"""
Design Tables
"""
