# coalmu/__init__.py
"""Satisfiability, model checking and certificates for the coalgebraic mu-calculus."""

__version__ = "1.0.0"
