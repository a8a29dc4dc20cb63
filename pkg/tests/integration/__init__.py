"""End-to-end CLI tests for Theta-Quant."""
