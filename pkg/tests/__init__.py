# Copyright (c) 2026 The relevatr authors
"""Unit tests for the relevatr package."""
