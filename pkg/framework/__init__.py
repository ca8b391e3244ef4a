"""Training-speed estimators for neural architecture search."""

__version__ = "0.3.0"
