"""Hecke operator graphs on elliptic curves over finite fields, computed in the elliptic Hall algebra."""

__version__ = "0.1.0"
