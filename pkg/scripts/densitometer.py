"""
Command-line entry point; see `python scripts/densitometer.py --help`.
"""

import sys
from pathlib import Path

project_root = Path(__file__).parent.parent
sys.path.append(str(project_root))

from src.cli import main


if __name__ == "__main__":
    main()
