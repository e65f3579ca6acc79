"""
hypergeometric-bps

BPS structures, Voros symbols, Riemann-Hilbert solutions and τ-functions for
the spectral curves of hypergeometric type, cross-checked against topological
recursion and exact WKB.
"""

__version__ = "0.1.0"
