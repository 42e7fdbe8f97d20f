#!/usr/bin/env python3
# Copyright (c) 2025 Heemeng Foo
# SPDX-License-Identifier: BUSL-1.1
# See the LICENSE file for usage restrictions and the 2029-08-20 Apache-2.0 conversion.

"""
Command-line surface: argument parsing, run configuration and artifacts.
"""

from .models import ArtifactRecord, RunConfig, RunManifest
from .workflow import RunWorkflow, run
from .main import build_parser, main

__all__ = ['RunConfig', 'ArtifactRecord', 'RunManifest', 'RunWorkflow', 'run', 'build_parser', 'main']
