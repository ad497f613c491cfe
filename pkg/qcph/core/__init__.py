"""
Core pipeline components and batch extraction.
"""
