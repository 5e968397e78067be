"""Dunnett many-to-one comparisons and closed testing alternatives."""
