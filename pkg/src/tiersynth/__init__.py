"""Adaptive strategy synthesis for multi-tier LTLf goals in FOND domains."""
