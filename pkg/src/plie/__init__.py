"""Exact computations with restricted Lie algebras over prime fields.

The package covers the prime field kernel, the truncated tensor bialgebra,
restricted Lie algebras and their restricted enveloping algebras, free
restricted Lie algebras as primitives of the tensor algebra, and checks of
the Eilenberg-Moore structure carried by primitive spaces.
"""

from plie.fp import FpMatrix, InvalidModulus, ZeroInverse, fp_inverse, kernel_basis, rank, rref, solve
from plie.lie import AxiomReport, RestrictedLieAlgebra, check_axioms
from plie.tensor import TensorElement, TensorSquareElement, primitive_basis
from plie.enveloping import RestrictedEnvelope, restricted_primitives, unit_eta_check
from plie.free import free_restricted_basis, witt_oracle_dimension, closure_check
from plie.monadic import (
    EMObject,
    M2Object,
    em_laws_check,
    lambda_functor,
    mu0_from_restricted,
    roundtrip_check,
    sandwich_certificate,
)
from plie.io import parse_algebra, load_corpus

__version__ = "0.1.0"
