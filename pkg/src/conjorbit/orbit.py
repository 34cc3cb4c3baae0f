"""Conjugate orbits {C U C} of finite unitary matrices.

Members are computed as S conj(U) S* from the factor S of C. Deciding
whether a permuted conjugate-diagonal lies in the orbit comes down to
whether the permuted eigenbasis can be made symmetric by column phases.
"""

from dataclasses import dataclass

import numpy as np

from .conjugations import Conjugation, compose_conjugations, conjugation_from_symmetric
from .numerics import (
    DEFAULT_TOL,
    DimensionError,
    PreconditionError,
    UnsupportedCaseError,
    as_square,
    max_norm,
    multiset_equal,
    unitary_check,
    unitary_eig,
)

WITNESS_TOL = 1e-8
SAME_MEMBER_TOL = 1e-9
MODULUS_TOL = 1e-8
ZERO_ENTRY_TOL = 1e-10
GAP_TOL = 1e-6


@dataclass(frozen=True)
class OrbitMember:
    matrix: np.ndarray
    witness: Conjugation


@dataclass(frozen=True)
class PhaseAssignment:
    phases: np.ndarray
    component_labels: np.ndarray


def _require_unitary(U, tol=DEFAULT_TOL):
    U = as_square(U)
    if not unitary_check(U, tol):
        raise PreconditionError(f"matrix is not unitary within {tol:g}")
    return U.astype(complex)


def cuc(C, U):
    """The orbit member C U C, i.e. S conj(U) conj(S)."""
    U = _require_unitary(U)
    if C.factor.shape != U.shape:
        raise DimensionError("conjugation and matrix sizes differ")
    S = C.factor
    return OrbitMember(S @ np.conj(U) @ np.conj(S), C)


def adjoint_witness(U):
    """Conjugation C with C U C = U*, built as S = Q Q^t from an eigenbasis Q."""
    U = _require_unitary(U)
    Q = unitary_eig(U).eigenvectors
    C = conjugation_from_symmetric(Q @ Q.T, tol=1e-9)
    res = max_norm(cuc(C, U).matrix - U.conj().T)
    if res > WITNESS_TOL:
        raise PreconditionError(f"adjoint witness residual {res:.3e} exceeds {WITNESS_TOL:g}")
    return C


def self_in_orbit(U):
    """U lies in its own conjugate orbit iff its spectrum is closed under conjugation."""
    lam = unitary_eig(_require_unitary(U)).eigenvalues
    return multiset_equal(lam, np.conj(lam))


def same_member(C1, C2, U, tol=SAME_MEMBER_TOL):
    """C1 U C1 = C2 U C2 iff C1 C2 commutes with U."""
    U = _require_unitary(U)
    if C1.factor.shape != U.shape or C2.factor.shape != U.shape:
        raise DimensionError("conjugation and matrix sizes differ")
    G = compose_conjugations(C1, C2)
    return max_norm(G @ U - U @ G) <= tol


def _find(parent, ratio, x):
    # path-compressing find; ratio[x] = z_x / z_parent[x]
    path = []
    while parent[x] != x:
        path.append(x)
        x = parent[x]
    root = x
    acc = 1.0 + 0j
    for y in reversed(path):
        acc = acc * ratio[y]
        ratio[y] = acc
        parent[y] = root
    return root


def symmetrizable_by_phases(Q):
    """Unimodular diagonal Z with (Q Z)^t = Q Z, or None if none exists.

    Symmetry asks q_ij z_j = q_ji z_i, so every pair of nonzero mirrored
    entries fixes the ratio z_j / z_i = q_ji / q_ij. The ratios are
    propagated with a weighted union-find and cycles must agree.
    """
    Q = _require_unitary(Q)
    n = Q.shape[0]
    mags = np.abs(Q)
    if max_norm(mags - mags.T) > MODULUS_TOL:
        return None
    parent = list(range(n))
    ratio = [1.0 + 0j] * n
    for i in range(n):
        for j in range(i + 1, n):
            if mags[i, j] <= ZERO_ENTRY_TOL and mags[j, i] <= ZERO_ENTRY_TOL:
                continue
            rho = Q[j, i] / Q[i, j]
            rho /= abs(rho)
            ri, rj = _find(parent, ratio, i), _find(parent, ratio, j)
            zi, zj = ratio[i] if parent[i] != i else 1.0, ratio[j] if parent[j] != j else 1.0
            if ri == rj:
                if abs(zj / zi - rho) > MODULUS_TOL:
                    return None
            else:
                # z_rj / z_ri = rho * z_i / z_j with z measured against each root
                parent[rj] = ri
                r = rho * zi / zj
                ratio[rj] = r / abs(r)
    roots = [_find(parent, ratio, x) for x in range(n)]
    phases = np.array([ratio[x] if parent[x] != x else 1.0 + 0j for x in range(n)])
    labels = np.unique(roots, return_inverse=True)[1]
    if max_norm((Q * phases) - (Q * phases).T) > MODULUS_TOL:
        return None
    return PhaseAssignment(phases, labels)


def _labelled_eigenbasis(U, labels):
    eig = unitary_eig(U)
    lam, Q = eig.eigenvalues, eig.eigenvectors
    n = lam.size
    if n > 1:
        d = np.abs(np.angle(lam[:, None] / lam[None, :]))
        gap = np.min(d + np.diag(np.full(n, np.inf)))
        if gap < GAP_TOL:
            raise UnsupportedCaseError(
                f"eigenvalues closer than {GAP_TOL:g} in angle; the eigenbasis is not phase-unique"
            )
    if labels is None:
        order = np.argsort(np.mod(np.angle(lam), 2 * np.pi), kind="stable")
    else:
        labels = np.asarray(labels, dtype=complex)
        if labels.size != n:
            raise DimensionError("need one label per eigenvalue")
        d = np.abs(np.angle(labels[:, None] / lam[None, :]))
        order = np.argmin(d, axis=1)
        if len(set(order.tolist())) != n or np.max(d[np.arange(n), order]) > 1e-6:
            raise PreconditionError("labels do not match the spectrum")
    return lam[order], Q[:, order]


def diag_in_orbit(U, ordering, labels=None):
    """Is diag(conj(xi[ordering[0]]), ..., conj(xi[ordering[n-1]])) in the orbit of U?

    ``ordering`` is a 0-based permutation. Eigenvalues xi are taken in the
    order of ``labels`` when given (e.g. the diagonal of a diagonal U), else
    by increasing angle in [0, 2*pi).
    """
    U = _require_unitary(U)
    n = U.shape[0]
    ordering = np.asarray(ordering, dtype=int)
    if sorted(ordering.tolist()) != list(range(n)):
        raise PreconditionError("ordering must be a permutation of 0..n-1")
    _, Q = _labelled_eigenbasis(U, labels)
    return symmetrizable_by_phases(Q[:, ordering]) is not None


def diag_member_witness(U, ordering, labels=None):
    """Conjugation realizing the permuted conjugate-diagonal, or None."""
    U = _require_unitary(U)
    _, Q = _labelled_eigenbasis(U, labels)
    V = Q[:, np.asarray(ordering, dtype=int)]
    z = symmetrizable_by_phases(V)
    if z is None:
        return None
    S = V * z.phases
    return conjugation_from_symmetric(0.5 * (S + S.T), tol=1e-8)


def permutation_conjugation(sigma, phases=None):
    """Factor sum_j a_j e_sigma(j) e_j^t for an order-two permutation sigma."""
    sigma = np.asarray(sigma, dtype=int)
    n = sigma.size
    if sorted(sigma.tolist()) != list(range(n)) or np.any(sigma[sigma] != np.arange(n)):
        raise PreconditionError("sigma must be a permutation of order at most two")
    a = np.ones(n, dtype=complex) if phases is None else np.asarray(phases, dtype=complex)
    a = np.where(sigma == np.arange(n), a, a[np.minimum(sigma, np.arange(n))])
    S = np.zeros((n, n), dtype=complex)
    S[sigma, np.arange(n)] = a
    return conjugation_from_symmetric(S)


def two_by_two_factor(theta, alpha, n, phi=0.0):
    """Symmetric unitary e^{i phi/2} [[e^{i alpha} cos t, i (-1)^n sin t], [i (-1)^n sin t, e^{-i alpha} cos t]]."""
    c, s, sg = np.cos(theta), np.sin(theta), (-1.0) ** int(n)
    V = np.array(
        [[np.exp(1j * alpha) * c, 1j * sg * s], [1j * sg * s, np.exp(-1j * alpha) * c]]
    )
    return conjugation_from_symmetric(np.exp(0.5j * phi) * V)


def two_by_two_member(theta, alpha, n):
    """Closed form of C U C for U = diag(1, -1) and the factor above."""
    sg = (-1.0) ** int(n)
    c2, s2 = np.cos(2 * theta), np.sin(2 * theta)
    return np.array(
        [[c2, -1j * np.exp(1j * alpha) * sg * s2], [1j * np.exp(-1j * alpha) * sg * s2, -c2]]
    )
