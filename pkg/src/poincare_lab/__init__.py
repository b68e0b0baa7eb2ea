"""Poincare series of integrable discrete-series matrix coefficients on SL(2, R)."""

__version__ = "0.1.0"
