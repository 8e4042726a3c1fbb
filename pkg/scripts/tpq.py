#!/usr/bin/env python3
"""
Launcher for the tpq command line.

Usage:
    python scripts/tpq.py gendoc --shape demo --n 100 -o demo.xml
    python scripts/tpq.py index demo.xml
    python scripts/tpq.py query data/document.idx -q '//$a//$b' --stats
"""
from __future__ import annotations

import sys
from pathlib import Path

# Add project root to path
ROOT_DIR = Path(__file__).resolve().parents[1]
if str(ROOT_DIR) not in sys.path:
    sys.path.insert(0, str(ROOT_DIR))

from app.cli import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
