"""Configuration module for dcov-bounds."""
