# Copyright (c) 2026 The relevatr authors
"""Entry point for ``python -m relevatr``."""

import sys

from .cli import main


sys.exit(main())
