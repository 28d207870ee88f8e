"""Tests for dcov-bounds."""
