"""Plot scripts for qmemopt CSV output.

These scripts never recompute physics; the CSV files emitted by the qmemopt
CLI are the single source of truth.
"""

__version__ = "0.1.0"
