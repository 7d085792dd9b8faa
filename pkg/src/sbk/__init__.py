"""Finite bases and membership certificates for binomial difference ideals."""

from .basis import (BasisConfig, BasisResult, DiffBinomial, binomial_of, compute_basis,
                    membership_certificate, minimal_signatures, reduce_once)
from .certificates import Certificate, CertStep, check_certificate, verify_certificate
from .closure import (ClosureConfig, FactoredBinomial, closure_saturate, colon_m, decompose,
                      is_quasi_normal, t_saturated_closure)
from .exponents import ExpVector, SymPoly
from .lattice import Lattice, sat_M, sign_pattern, signature, truncated_member
from .truncated import TruncatedIdeal, TruncPoly, ideal_member, parse_text, shift, to_text
