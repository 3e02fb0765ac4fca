"""
Peak Fitting
"""
