"""Limit shift-of-argument subalgebras of U(sp_2n) and U(o_2n+1) on small irreps."""

__version__ = "0.1.0"
