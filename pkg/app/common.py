#!/usr/bin/env python3
# Copyright (c) 2025 Heemeng Foo
# SPDX-License-Identifier: BUSL-1.1
# See the LICENSE file for usage restrictions and the 2029-08-20 Apache-2.0 conversion.

"""
Common settings, logging and error types shared by all mixllt modules.
"""

import os
import sys
import logging
from datetime import datetime
from typing import List, Optional

import structlog

try:
    from dotenv import load_dotenv
    load_dotenv()
except ImportError:
    pass

SCHEMA_VERSION = "1.0"

# Numeric tolerances
ZERO_MASS = float(os.environ.get("MIXLLT_ZERO_MASS", "1e-15"))
STOCHASTIC_TOL = 1e-12
IDENTITY_TOL = 1e-12
INEQUALITY_TOL = 1e-10

# Monte Carlo layout
BLOCK_SIZE = int(os.environ.get("MIXLLT_BLOCK_SIZE", "8192"))
LOG_LEVEL = os.environ.get("MIXLLT_LOG_LEVEL", "INFO").upper()
SHOW_PROGRESS = os.environ.get("MIXLLT_PROGRESS", "false").lower() in ("1", "true", "yes")


class ModelError(ValueError):
    """Malformed chain, distribution or parameter set."""

    def __init__(self, detail: str = "Malformed model", violations: Optional[List[str]] = None):
        self.violations = list(violations) if violations else [detail]
        super().__init__("; ".join(self.violations))


class BoundViolation(ArithmeticError):
    """A proven inequality failed beyond tolerance."""

    def __init__(self, detail: str = "Bound violated", violations: Optional[List[str]] = None):
        self.violations = list(violations) if violations else [detail]
        super().__init__("; ".join(self.violations))


_configured = False


def _configure_logging() -> None:
    global _configured
    if _configured:
        return
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s'))
    root = logging.getLogger("mixllt")
    if not root.handlers:
        root.addHandler(handler)
    root.setLevel(getattr(logging, LOG_LEVEL, logging.INFO))
    root.propagate = False

    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.stdlib.PositionalArgumentsFormatter(),
            structlog.processors.format_exc_info,
            structlog.processors.KeyValueRenderer(key_order=["event"], sort_keys=True),
        ],
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )
    _configured = True


def get_logger(name: str):
    """Return a structlog logger writing through the shared stderr handler."""
    _configure_logging()
    return structlog.get_logger(f"mixllt.{name}")


def resolve_threads(requested: int = 0) -> int:
    """Worker bound: MIXLLT_THREADS wins over the requested value, 0 means all cores."""
    env_value = os.environ.get("MIXLLT_THREADS")
    if env_value:
        try:
            requested = int(env_value)
        except ValueError:
            raise ModelError(f"MIXLLT_THREADS must be an integer, got {env_value!r}")
    if requested < 0:
        raise ModelError(f"thread count must be >= 0, got {requested}")
    if requested == 0:
        return os.cpu_count() or 1
    return requested


def measure_performance(start_time: datetime) -> float:
    """Calculate processing time in seconds."""
    return (datetime.now() - start_time).total_seconds()
