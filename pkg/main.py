#!/usr/bin/env python3
# -*- coding: utf-8 -*-

import os
import sys
import logging
from logging.handlers import RotatingFileHandler

# Add project directory to import path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from ainfty_engine.cli import run

# Configure logging
logger = logging.getLogger("main")
logger.setLevel(logging.INFO)

# First remove all existing handlers to avoid duplication
for handler in logger.handlers[:]:
    logger.removeHandler(handler)

# File logging
file_handler = RotatingFileHandler("ainfty_engine.log", maxBytes=1024*1024, backupCount=3)
file_handler.setFormatter(logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s'))
logger.addHandler(file_handler)


def main():
    """Main entry point"""
    logger.info(f"Running: {' '.join(sys.argv[1:])}")
    code = run(sys.argv[1:])
    logger.info(f"Finished with exit status {code}")
    return code


if __name__ == "__main__":
    sys.exit(main())
