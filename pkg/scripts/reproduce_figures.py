#!/usr/bin/env python
"""
Regenerate the data and gnuplot scripts for every feasibility figure.

Usage:
    python scripts/reproduce_figures.py [OUT_DIR] [--config PATH]
"""

import argparse
import os
import sys

# Add parent directory to path
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from siet.main import main  # noqa: E402


def parse_args():
    parser = argparse.ArgumentParser(description=__doc__.strip().splitlines()[0])
    parser.add_argument("out", nargs="?", default="./figures", help="Output directory")
    parser.add_argument("--config", help="Optional key=value config file")
    return parser.parse_args()


if __name__ == "__main__":
    args = parse_args()
    argv = ["figures", "--which", "all", "--out", args.out, "--dump-config"]
    if args.config:
        argv += ["--config", args.config]
    sys.exit(main(argv))
