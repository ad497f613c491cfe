"""
Configuration settings and run-configuration validation.
"""
