"""
Multilayer Optics
"""
