"""Conjugate orbits {C U C} of unitary operators: finite matrices, shift windows, circle symbols."""

from .conjugations import (
    AntilinearOp,
    Conjugation,
    RealLinearOp,
    conjugation_from_symmetric,
    random_conjugation,
    takagi_symmetric_unitary,
)
from .orbit import adjoint_witness, cuc, diag_in_orbit, same_member, self_in_orbit, symmetrizable_by_phases

__all__ = [
    "AntilinearOp",
    "Conjugation",
    "RealLinearOp",
    "adjoint_witness",
    "conjugation_from_symmetric",
    "cuc",
    "diag_in_orbit",
    "random_conjugation",
    "same_member",
    "self_in_orbit",
    "symmetrizable_by_phases",
    "takagi_symmetric_unitary",
]
