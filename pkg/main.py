#!/usr/bin/env python3
"""
Frey Sieve - Main Entry Point

Mechanizes the modular method for x^r + y^r = C z^p:
1. Arithmetic of Q(zeta_r) and its real subfield K+
2. Frey curves over K+ (and over Q after descent for r = 7)
3. Local reduction data and conductor tables
4. Residual trace tables at auxiliary primes
5. Newform elimination and exponent bounds

Usage:
    python main.py field --r 7 --q 13
    python main.py frey I 7 1,2,3 0 1 --descend
    python main.py traces --family II --indices 1,2 --q 13
    python main.py --profile r7_part2 sieve
    python main.py --profile all sieve
    python main.py stats
"""
import sys

from modules.cli import main

if __name__ == '__main__':
    sys.exit(main())
