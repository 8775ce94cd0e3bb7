"""Toolkit for fast quantum-state-transfer protocols on power-law lattices.

Submodules:

- ``lattice``   — hypercubic geometry, 1/r**alpha couplings, plaquette tilings
- ``cascade``   — event-driven scheduler for the cascaded-CNOT (Eldredge) GHZ
  growth, plus fitting and asymptotic classification
- ``hybrid``    — Tran recursion cost model and the dynamic-programming hybrid
  optimizer
- ``crosstalk`` — per-level crosstalk error budgets, color counts, and pulse
  economics
- ``echo``      — spin-echo pulse schedules and exact cancellation certificates
- ``qsim``      — dense state-vector verification of the protocols
- ``cli``       — command-line front end (``powerlawst --help``)
"""

__version__ = "0.1.0"

__all__ = [
    "lattice",
    "cascade",
    "hybrid",
    "crosstalk",
    "echo",
    "qsim",
]
