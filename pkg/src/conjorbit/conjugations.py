"""Conjugations x -> S conj(x), Takagi factors, and antilinear operator algebra."""

from dataclasses import dataclass

import numpy as np

from .numerics import (
    DEFAULT_TOL,
    CLUSTER_TOL,
    ConvergenceError,
    DimensionError,
    PreconditionError,
    as_square,
    haar_unitary,
    jacobi_eigh,
    max_norm,
    refine_in_clusters,
    unitary_residual,
)


class ValidationError(ValueError):
    """A conjugation factor failed one of its defining properties."""


@dataclass(frozen=True)
class AntilinearOp:
    """The antilinear map x -> N conj(x)."""

    factor: np.ndarray

    def __call__(self, x):
        return self.factor @ np.conj(x)

    def star(self):
        return antilinear_star(self)


@dataclass(frozen=True)
class Conjugation(AntilinearOp):
    """A conjugation stored as its symmetric unitary factor S."""

    @property
    def n(self):
        return self.factor.shape[0]


@dataclass(frozen=True)
class RealLinearOp:
    """The real-linear map x -> P x + Q conj(x)."""

    linear_part: np.ndarray
    antilinear_part: np.ndarray

    def __post_init__(self):
        if np.shape(self.linear_part) != np.shape(self.antilinear_part):
            raise DimensionError("linear and antilinear parts differ in shape")

    def __call__(self, x):
        return self.linear_part @ x + self.antilinear_part @ np.conj(x)


def symmetric_unitary_residuals(S):
    S = as_square(S, "factor")
    return {
        "symmetry": max_norm(S - S.T),
        "unitarity": unitary_residual(S),
        "involution": max_norm(S @ np.conj(S) - np.eye(S.shape[0])),
    }


def conjugation_from_symmetric(S, tol=DEFAULT_TOL):
    """Validate S as symmetric, unitary and involutive, and wrap it."""
    S = as_square(S, "factor").astype(complex)
    for prop, res in symmetric_unitary_residuals(S).items():
        if res > tol:
            raise ValidationError(f"factor fails {prop}: residual {res:.3e} > {tol:g}")
    return Conjugation(S)


def plain_conjugation(n):
    return Conjugation(np.eye(n, dtype=complex))


def random_conjugation(n, seed):
    """Conjugation with factor W W^t for a Haar unitary W."""
    W = haar_unitary(n, seed)
    return conjugation_from_symmetric(W @ W.T)


def householder_factor(v):
    """I - 2 v v^t for a real unit vector v (a real symmetric orthogonal factor)."""
    v = np.asarray(v)
    if np.iscomplexobj(v) and max_norm(v.imag) > 0:
        raise PreconditionError("Householder factors are self-transpose only for real v")
    v = np.real(v).astype(float)
    nv = np.linalg.norm(v)
    if nv == 0:
        raise PreconditionError("Householder vector must be nonzero")
    v = v / nv
    return np.eye(v.size) - 2.0 * np.outer(v, v)


def principal_half_phases(d):
    """Square roots of unimodular numbers with phases taken in (-pi, pi]."""
    th = np.angle(d)
    th = np.where(th <= -np.pi, np.pi, th)
    return np.exp(0.5j * th)


def takagi_symmetric_unitary(S, tol=DEFAULT_TOL):
    """Unitary W with W W^t = S, for a symmetric unitary S.

    Re S and Im S are commuting real symmetric matrices; a real orthogonal O
    diagonalizing both gives S = O D O^t and W = O D^(1/2).
    """
    S = conjugation_from_symmetric(S, tol=max(tol, 1e-9)).factor
    A, B = S.real.copy(), S.imag.copy()
    a, O = jacobi_eigh(0.5 * (A + A.T))
    O = refine_in_clusters(O, a, 0.5 * (B + B.T), CLUSTER_TOL)
    D = np.diag(O.T @ S @ O)
    W = O * principal_half_phases(D / np.abs(D))
    if max_norm(W @ W.T - S) > 1e-8:
        raise ConvergenceError("joint diagonalization of Re S and Im S failed")
    return W


def c_real_basis(C):
    """Orthonormal basis whose columns are fixed by C (the Takagi factor of S)."""
    return takagi_symmetric_unitary(C.factor)


def compose_conjugations(C1, C2):
    """Matrix of the complex-linear map C1 C2, which is S1 conj(S2)."""
    if C1.factor.shape != C2.factor.shape:
        raise DimensionError("conjugations act on different dimensions")
    return C1.factor @ np.conj(C2.factor)


def antilinear_star(A):
    """Antilinear adjoint: <A x, y> = conj(<x, A* y>) gives factor N^t."""
    return AntilinearOp(np.asarray(A.factor).T.copy())


def real_linear_parts(A):
    """Split x -> P x + Q conj(x) and form its real adjoint P* + (Q conj)^star."""
    P = np.asarray(A.linear_part)
    Q = np.asarray(A.antilinear_part)
    dagger = RealLinearOp(P.conj().T, Q.T)
    return P, AntilinearOp(Q), dagger
