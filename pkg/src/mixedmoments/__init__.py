"""Numerics for mixed moments of Hecke eigenforms and the L-functions behind them."""

__version__ = "0.1.0"
