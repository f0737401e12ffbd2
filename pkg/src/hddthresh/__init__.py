"""Thresholds of iterative hard-decision decoding for GLDPC ensembles built from BCH codes.

Submodules: ``galois_bch`` (fields, codes, BDD, spectra), ``miscorrection``
(P/Q tables), ``de`` (finite-n density evolution), ``highrate`` (Poisson
scaling limit), ``potential``, ``capacity``, ``sim`` (Monte Carlo decoder),
``table1`` and ``cli``.
"""
from .errors import (BracketError, ConfigurationError, DesignMismatchError, DomainError, HDDError,
                     NumericalConsistencyError)
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "BracketError", "ConfigurationError", "DesignMismatchError", "DomainError", "HDDError",
           "NumericalConsistencyError", "__version__"]
