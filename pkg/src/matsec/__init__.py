"""Matroid secretary algorithms and exact verification oracles."""
