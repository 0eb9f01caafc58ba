"""Clickbait post scoring: corpus loading, training, evaluation, inference."""

__version__ = "0.1.0"
