"""
Gradient-boosted regression trees and their evaluation.
"""
