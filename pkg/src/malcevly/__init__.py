"""Polynomial identities of the 7-dimensional simple Malcev algebra and its
Lie-Yamaguti ternary product, rebuilt from sl(2) representation theory."""

__version__ = "0.1.0"
