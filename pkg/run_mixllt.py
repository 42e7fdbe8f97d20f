#!/usr/bin/env python3
# Copyright (c) 2025 Heemeng Foo
# SPDX-License-Identifier: BUSL-1.1
# See the LICENSE file for usage restrictions and the 2029-08-20 Apache-2.0 conversion.

"""
MixLLT launcher

Runs one mixllt subcommand from the repository checkout, e.g.

    python run_mixllt.py mixing --builtin reference --lags 1..5
"""

import sys
from pathlib import Path

# Add the repository root to Python path
root_dir = Path(__file__).parent
sys.path.insert(0, str(root_dir))

from app.cli import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
