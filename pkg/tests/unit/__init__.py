"""Unit tests for Theta-Quant modules."""
