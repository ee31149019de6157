"""Functional Wiener Filter toolkit."""
