"""Command-line entry point.

This module allows the CLI to be run as:
    python -m probfem run --preset pullout
"""
import sys

from .cli import main


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        print("\nInterrupted.")
        sys.exit(130)
