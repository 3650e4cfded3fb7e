"""Exact congruence experiments for multiple harmonic sums and composition sums.

Modules:

* :mod:`mhscong.arith` -- residues modulo p^a, CRT, primality, batch inversion
* :mod:`mhscong.bernoulli` -- exact and p-adic Bernoulli numbers, power sums
* :mod:`mhscong.mhs` -- constrained multiple harmonic sums and the stuffle product
* :mod:`mhscong.sums` -- composition sums T_n(p, r), R_n^(m)(p) and sigma(p^r)
* :mod:`mhscong.claims` -- the registry of checkable congruences
* :mod:`mhscong.discover` -- rational reconstruction, exact LLL, relation search
* :mod:`mhscong.cli` -- the ``mhscong`` command
"""

from .arith import Modulus, Rational, Residue, crt_combine, is_prime
from .claims import get_claim, list_claims, sweep_claims, verify_claim
from .errors import MhsError

__version__ = "0.1.0"

__all__ = [
    "MhsError",
    "Modulus",
    "Rational",
    "Residue",
    "crt_combine",
    "get_claim",
    "is_prime",
    "list_claims",
    "sweep_claims",
    "verify_claim",
]
