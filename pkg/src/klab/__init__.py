"""Exact DG homological algebra over prime fields."""

from .exactla import DEFAULT_CHAR, GradedSpace, PrimeField, euler_characteristic
from .dgcore import DGAlgebra, DGModule, DGMorphism, graded_dual, make_algebra, shift, tensor_algebras

__version__ = "0.1.0"
