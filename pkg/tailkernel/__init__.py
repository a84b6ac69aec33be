"""Kernel tail-index estimation under random right censoring."""
