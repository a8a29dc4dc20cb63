"""Property-based tests for Theta-Quant."""
