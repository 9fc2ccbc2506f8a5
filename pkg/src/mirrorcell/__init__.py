"""Monomial hyperplane arrangements A^k_l(r): exact combinatorics and numeric fiber checks."""
from __future__ import annotations

from .arrangement import Arrangement, Hyperplane, build_Akl, build_braid, build_monomial_reflection
from .cyclotomic import CycloField, CycloMatrix, CycloNum, cyclotomic_field, cyclotomic_polynomial
from .errors import InvalidParameterError, OracleInconclusiveError, SamplingError, VerificationError
from .fibration import BasePoint, FibrationParams, verification_report
from .lattice import characteristic_polynomial, intersection_lattice
from .restriction import restrict, restriction_closure_scan
from .topology import TopologyReport, report

__version__ = "0.1.0"
