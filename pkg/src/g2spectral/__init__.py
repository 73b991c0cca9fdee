"""Exact verification of G2 Higgs-bundle spectral data."""

from __future__ import annotations

__version__ = "0.1.0"
