"""
Main entry point for the fenchel_game package.

Allows running the CLI via: python -m fenchel_game
"""

import sys
from .cli import main

if __name__ == "__main__":
    sys.exit(main())
