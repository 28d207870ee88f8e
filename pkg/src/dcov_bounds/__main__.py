"""Allows ``python -m dcov_bounds``."""

import sys

from .main import main

sys.exit(main())
