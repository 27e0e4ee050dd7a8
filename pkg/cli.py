#!/usr/bin/env python3
"""Launcher for the FourierVol command line: ``python cli.py <command> ...``."""

import sys

from dotenv import load_dotenv

load_dotenv()

from src.cli import main

if __name__ == "__main__":
    sys.exit(main())
