"""Derive App Store privacy labels from privacy-policy text and compare them
with the labels developers declare."""

__version__ = "0.1.0"
