#!/usr/bin/env -S uv run python
"""
coordsched CLI Tool

Checks, schedules and simulates coordination-language applications.
"""

import sys
from pathlib import Path

# Make the package importable when run from a source checkout
sys.path.insert(0, str(Path(__file__).parent))

from coordsched_cli.cli.main import main

if __name__ == "__main__":
    sys.exit(main())
