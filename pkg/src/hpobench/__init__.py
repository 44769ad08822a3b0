"""Hyperparameter-optimization benchmark for gradient-boosted load forecasting."""

__version__ = "0.1.0"
