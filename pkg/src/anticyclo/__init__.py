"""Anticyclotomic Iwasawa invariants of congruent weight-2 eigenforms:
exact p-adic arithmetic, local correction terms, hypothesis verdicts and
lambda-transfer identities."""

__version__ = "0.1.0"
