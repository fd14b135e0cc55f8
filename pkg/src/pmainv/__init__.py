"""Parabolic Monge-Ampere classification and contact invariants."""
