"""
Crystal structure models, readers and the periodic point model.
"""
