"""
hdx-codes

Coset complexes over SL3, the Reed-Solomon Tanner codes on their triangles and the
local codes at their vertices.
"""

__version__ = "0.1.0"
