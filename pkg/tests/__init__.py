"""Test suite for Theta-Quant."""
