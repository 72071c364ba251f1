"""Pushdown control-flow analysis of higher-order ANF programs."""

__version__ = "0.1.0"
