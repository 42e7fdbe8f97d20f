#!/usr/bin/env python3
# Copyright (c) 2025 Heemeng Foo
# SPDX-License-Identifier: BUSL-1.1
# See the LICENSE file for usage restrictions and the 2029-08-20 Apache-2.0 conversion.

"""
mixllt command line.

    mixllt mixing --builtin reference --lags 1..5
    mixllt charfn --spec chain.json --u-grid=-20:20:41
    mixllt llt --builtin reference --n 3000 --paths 2000000 --threads 8

Exit status: 0 ok, 1 a proven inequality failed beyond tolerance, 2 usage error.
"""

import argparse
import sys
from typing import List, Optional

import numpy as np
from pydantic import ValidationError

from .models import RunConfig
from .workflow import run


def parse_lags(text: str) -> List[int]:
    """'1..5' or '1,2,4'; every lag >= 1."""
    try:
        if ".." in text:
            lo, hi = (int(part) for part in text.split("..", 1))
            lags = list(range(lo, hi + 1))
        else:
            lags = [int(part) for part in text.split(",") if part]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lags like 1..5 or 1,2,4, got {text!r}")
    if not lags:
        raise argparse.ArgumentTypeError(f"empty lag range {text!r}")
    if min(lags) < 1:
        raise argparse.ArgumentTypeError(f"lags must be >= 1, got {text!r}")
    return lags


def parse_grid(text: str) -> List[float]:
    """'start:stop:count' (inclusive linspace) or a comma list."""
    try:
        if ":" in text:
            start, stop, count = text.split(":")
            return np.linspace(float(start), float(stop), int(count)).tolist()
        return [float(part) for part in text.split(",") if part]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a:b:count or a comma list, got {text!r}")


def parse_int_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma list of integers, got {text!r}")


def _global_flags() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument('--seed', type=int, help='64-bit seed (default 20250820)')
    parent.add_argument('--threads', type=int, help='Worker bound, 0 = all cores; MIXLLT_THREADS wins')
    parent.add_argument('--out', help='Artifact directory (default mixllt-out)')
    parent.add_argument('--format', choices=['csv', 'json'], help='Grid artifact format (default csv)')
    return parent


def _chain_flags() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument('--spec', help='Chain JSON file')
    parent.add_argument('--builtin', choices=['reference', 'lattice', 'two-state'], help='Built-in chain')
    parent.add_argument('--n', type=int, help='Chain length')
    return parent


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='mixllt', description="Psi-mixing chains and local limit checks")
    subparsers = parser.add_subparsers(dest='command', required=True, help='Available commands')
    common, chain = _global_flags(), _chain_flags()

    subparsers.add_parser('validate', parents=[common, chain], help='Validate a chain and print its summary')

    simulate = subparsers.add_parser('simulate', parents=[common, chain], help='Simulate paths and sums')
    simulate.add_argument('--paths', type=int, help='Number of paths')

    mixing = subparsers.add_parser('mixing', parents=[common, chain], help="psi', psi*, rho per lag")
    mixing.add_argument('--lags', type=parse_lags, help='Lags, e.g. 1..5')
    mixing.add_argument('--oracle', action='store_true', default=None,
                        help='Cross-check psi against event enumeration')

    charfn = subparsers.add_parser('charfn', parents=[common, chain], help='Characteristic-function bounds')
    charfn.add_argument('--u-grid', dest='u_grid', type=parse_grid, help='a:b:count or list (use --u-grid=-a:b:n)')
    charfn.add_argument('--gamma', type=float, help='Override γ = a^4/b')
    charfn.add_argument('--u-min', dest='u_min', type=float, help='Grid start (default -20)')
    charfn.add_argument('--u-max', dest='u_max', type=float, help='Grid end (default 20)')
    charfn.add_argument('--u-steps', dest='u_steps', type=int, help='Grid points (default 41)')

    conditions = subparsers.add_parser('conditions', parents=[common, chain], help='LLT hypothesis diagnostics')
    conditions.add_argument('--check', choices=['lindeberg', 'A', 'A1', 'B', 'B1', 'B2', 'c1c2', 'infvar'])
    conditions.add_argument('--eps', type=float)
    conditions.add_argument('--delta', type=float)
    conditions.add_argument('--u', type=float)
    conditions.add_argument('--interval', type=float, nargs=2, metavar=('C', 'D'))
    conditions.add_argument('--n-grid', dest='n_grid', type=parse_int_list)
    conditions.add_argument('--x-grid', dest='x_grid', type=parse_grid)
    conditions.add_argument('--u-grid', dest='u_grid', type=parse_grid)
    conditions.add_argument('--gamma', type=float)
    conditions.add_argument('--M', dest='M', type=float)
    conditions.add_argument('--T', dest='T', type=float)
    conditions.add_argument('--L', dest='L', type=float)

    llt = subparsers.add_parser('llt', parents=[common, chain], help='Local limit scans of S_n')
    llt.add_argument('--paths', type=int)
    llt.add_argument('--mode', choices=['plain', 'weighted', 'linear', 'infvar'])
    llt.add_argument('--window', choices=['tri', 'epa'])
    llt.add_argument('--width', type=float)
    llt.add_argument('--u-grid', dest='u_grid', type=parse_grid)
    llt.add_argument('--interval', type=float, nargs=2, metavar=('C', 'D'))
    llt.add_argument('--weights', type=parse_grid)
    llt.add_argument('--coefficients', type=parse_grid)
    llt.add_argument('--truncation', type=int)

    gauss = subparsers.add_parser('gauss', parents=[common], help='Continued-fraction digit chain')
    gauss.add_argument('--samples', type=int)
    gauss.add_argument('--digits', type=int)
    gauss.add_argument('--cap', type=int)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    flags = {key: value for key, value in vars(args).items() if value is not None}
    bounds = [flags.pop(key, None) for key in ("u_min", "u_max", "u_steps")]
    if any(value is not None for value in bounds) and "u_grid" not in flags:
        start, stop, steps = (default if value is None else value for value, default in zip(bounds, (-20.0, 20.0, 41)))
        flags["u_grid"] = np.linspace(start, stop, steps).tolist()
    try:
        config = RunConfig(**flags)
    except ValidationError as e:
        err = e.errors()[0]
        where = '.'.join(str(p) for p in err['loc']) or 'config'
        print(f"❌ {where}: {err['msg']}", file=sys.stderr)
        return 2
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
