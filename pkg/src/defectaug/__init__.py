"""Synthetic defect-image augmentation pipeline toolkit."""

__version__ = "0.1.0"
