"""Utility modules: CSV datasets and report export."""
