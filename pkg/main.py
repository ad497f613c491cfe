"""
Main entry point for the qcph command-line tool.
"""

import sys

from qcph.cli.main import main

if __name__ == "__main__":
    sys.exit(main())
