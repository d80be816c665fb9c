"""Expose the public data helpers so callers can import them ergonomically."""

from . import presets

__all__ = ["presets"]
