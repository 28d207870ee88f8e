"""Core modules: samples, estimators, bounds, samplers and campaigns."""
