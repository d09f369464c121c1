"""Test package for the Bass-Serre toolkit."""
