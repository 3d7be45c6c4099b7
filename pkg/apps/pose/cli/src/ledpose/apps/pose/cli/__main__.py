"""Entry point for running the ledpose CLI as a module."""

import sys

from ledpose.apps.pose.cli.cli import run

if __name__ == "__main__":
    sys.exit(run())
