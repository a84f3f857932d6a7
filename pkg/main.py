#!/usr/bin/env python3
"""
Simple main.py entry point
"""
import asyncio
import sys

from hetnet import main

if __name__ == "__main__":
    sys.exit(asyncio.run(main()))
