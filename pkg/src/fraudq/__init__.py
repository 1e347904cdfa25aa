"""Fraud detection on transaction streams with classical and quantum-simulated models."""

__version__ = "0.1.0"

FEATURE_SCHEMA_VERSION = 1
MODEL_FORMAT_VERSION = 1
