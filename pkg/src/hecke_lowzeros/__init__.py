"""Low-lying zeros of quadratic Hecke L-functions over Q(i)."""

__version__ = "0.1.0"
