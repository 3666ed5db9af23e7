"""
Services Package Initialization
"""
