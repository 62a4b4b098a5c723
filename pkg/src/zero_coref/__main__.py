"""Entry point for running the toolkit."""

import sys

from zero_coref.cli.main import main

if __name__ == "__main__":
    sys.exit(main())
