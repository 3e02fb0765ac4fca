"""
Lineshapes and Synthesis
"""
