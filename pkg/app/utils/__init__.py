"""
Utilities package for cable-concordance.

Shared models, parsers, errors, logging and text rendering.
"""
