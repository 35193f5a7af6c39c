"""
Services package for cable-concordance.

One module per computation layer: polynomials, primality, Seifert forms,
signature functions, Alexander modules, Legendrian fronts and the
concordance certificates built on them.
"""
