"""
Exact-arithmetic workbench for R(p,q)-deformed super Witt and Virasoro algebras.

Version: 0.1.0
"""

__version__ = "0.1.0"
