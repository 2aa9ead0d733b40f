#!/usr/bin/env python3
"""
Command-line entry point for the algorithmic-realism toolkit.

Examples:
    python run_algrealism.py rdp --pmf 0.5,0.5 --hamming --delta 0.11
    python run_algrealism.py critic verify --kind run --q 0.5 --lengths 1,2,3,4,5,6,7,8,9,10
    python run_algrealism.py certify --pmf 0.5,0.5 --crossover 0.1 --delta 0.11 --n 8 \
        --rate 6.4 --B 2 --trials 10000
"""

import sys
from pathlib import Path
from dotenv import load_dotenv

# Add project root to path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

# Load environment variables (ALGREALISM_THREADS)
load_dotenv(project_root / '.env')

from src.cli.main import main


if __name__ == "__main__":
    sys.exit(main())
