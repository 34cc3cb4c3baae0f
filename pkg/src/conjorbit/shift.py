"""Bilateral shift experiments on finite windows of the lattice Z.

A ``WindowOp`` is a dense matrix on indices -N..N together with a
bandwidth b. Products of such operators are only trusted on the core
|j| <= N - 2b - 1: there every column involved in a product with the
shift stays inside the window, so truncation never shows up.
"""

from dataclasses import dataclass, field

import numpy as np

from .numerics import ConsistencyError, DimensionError, PreconditionError, max_norm

SYMMETRY_TOL = 1e-10
MEMBER_TOL = 1e-10
COMMUTE_TOL = 1e-9
TOEPLITZ_TOL = 1e-9
DEFAULT_BANDWIDTH = 32


@dataclass(frozen=True)
class WindowOp:
    """Operator on indices -N..N, banded about the diagonal (or anti-diagonal if ``flip``)."""

    half_width: int
    bandwidth: int
    matrix: np.ndarray = field(repr=False)
    flip: bool = False

    def __post_init__(self):
        n = 2 * self.half_width + 1
        if self.matrix.shape != (n, n):
            raise DimensionError(f"window matrix must be {n}x{n}")
        i, j = np.nonzero(self.matrix)
        centre = -(j - self.half_width) if self.flip else (j - self.half_width)
        if np.any(np.abs(i - self.half_width - centre) > self.bandwidth):
            raise PreconditionError("stored entries exceed the declared bandwidth")

    @property
    def indices(self):
        return np.arange(-self.half_width, self.half_width + 1)

    @property
    def core(self):
        r = self.half_width - 2 * self.bandwidth - 1
        return np.arange(-r, r + 1) if r >= 0 else np.arange(0)

    def pos(self, j):
        return np.asarray(j) + self.half_width

    def column(self, j):
        return self.matrix[:, self.pos(j)]

    def basis(self, j):
        e = np.zeros(2 * self.half_width + 1, dtype=complex)
        e[self.pos(j)] = 1.0
        return e


def window_shift(N, power=1):
    """The shift e_j -> e_{j+power}, truncated to the window."""
    if N < 2:
        raise DimensionError("window half-width must be at least 2")
    n = 2 * N + 1
    return WindowOp(N, abs(power), np.eye(n, k=-power, dtype=complex))


def identity_factor(N):
    return WindowOp(N, 0, np.eye(2 * N + 1, dtype=complex))


def hankel_flip(N):
    """Ones on the cross diagonal through (0, 0): e_j -> e_{-j}."""
    return WindowOp(N, 0, np.fliplr(np.eye(2 * N + 1)).astype(complex), flip=True)


def diagonal_factor(xi):
    xi = np.asarray(xi, dtype=complex)
    if max_norm(np.abs(xi) - 1) > 1e-12:
        raise PreconditionError("diagonal factor needs unimodular entries")
    return WindowOp((xi.size - 1) // 2, 0, np.diag(xi))


def householder_blocks(N, block, seed):
    """Block diagonal factor with real Householder blocks of size ``block``."""
    rng = np.random.default_rng(seed)
    n = 2 * N + 1
    V = np.eye(n, dtype=complex)
    for start in range(0, n - block + 1, block):
        v = rng.standard_normal(block)
        v /= np.linalg.norm(v)
        V[start:start + block, start:start + block] = np.eye(block) - 2.0 * np.outer(v, v)
    return WindowOp(N, block - 1, V)


def toeplitz_window(coeff, N, b=DEFAULT_BANDWIDTH):
    """Entries coeff(i - j) for |i - j| <= b."""
    n = 2 * N + 1
    T = np.zeros((n, n), dtype=complex)
    for d in range(-b, b + 1):
        T += complex(coeff(d)) * np.eye(n, k=-d)
    return WindowOp(N, b, T)


def _core_cols(V):
    return V.matrix[:, V.pos(V.core)]


def shift_orbit_member(V, N=None):
    """The unitary shift W v_j = v_{j+1} on the columns v_j of a symmetric unitary V.

    W = (VJ) M (VJ) = V M conj(V); the two descriptions are compared on
    every core index before returning.
    """
    N = V.half_width if N is None else N
    if N != V.half_width:
        raise DimensionError("window size mismatch")
    Vm = V.matrix
    if max_norm(Vm - Vm.T) > SYMMETRY_TOL:
        raise PreconditionError("factor is not symmetric")
    cols = _core_cols(V)
    if cols.size and max_norm(cols.conj().T @ cols - np.eye(cols.shape[1])) > SYMMETRY_TOL:
        raise PreconditionError("factor columns are not orthonormal on the core")
    M = window_shift(N).matrix
    W = WindowOp(N, 2 * V.bandwidth + 1, Vm @ M @ np.conj(Vm))
    worst = 0.0
    for j in V.core:
        vj, vnext = V.column(j), V.column(j + 1)
        antilinear = Vm @ np.conj(M @ (Vm @ np.conj(vj)))
        worst = max(worst, np.linalg.norm(W.matrix @ vj - antilinear), np.linalg.norm(antilinear - vnext))
    if worst > MEMBER_TOL:
        raise ConsistencyError(f"shift member check failed: residual {worst:.3e}")
    return W


def core_residual(A, B, core, N):
    """max over core j of ||(A - B) e_j|| for window matrices A and B."""
    D = (A - B)[:, np.asarray(core) + N]
    return float(np.max(np.linalg.norm(D, axis=0))) if D.size else 0.0


@dataclass(frozen=True)
class CommutantReport:
    commutes: bool
    is_toeplitz: bool
    is_symmetric: bool
    residual: float
    tolerance: float

    def __bool__(self):
        return self.commutes


def toeplitz_commutant_check(T, N=None, tol=COMMUTE_TOL):
    """Does T commute with the shift on the core, and is T Toeplitz?"""
    N = T.half_width if N is None else N
    M = window_shift(N).matrix
    res = core_residual(T.matrix @ M, M @ T.matrix, T.core, N)
    A = T.matrix
    toeplitz = all(
        np.ptp(np.diagonal(A, offset=d).real) <= TOEPLITZ_TOL
        and np.ptp(np.diagonal(A, offset=d).imag) <= TOEPLITZ_TOL
        for d in range(-A.shape[0] + 1, A.shape[0])
    )
    return CommutantReport(res <= tol, toeplitz, max_norm(A - A.T) <= TOEPLITZ_TOL, res, tol)


def halfcircle_coeffs(n):
    """Fourier coefficients of the symbol equal to 1 where Re xi > 0 and -1 elsewhere."""
    n = np.asarray(n)
    safe = np.where(n == 0, 1, n)
    out = -2.0 * (-1.0) ** safe * np.sin(np.pi * safe / 2) / (np.pi * safe)
    out = np.where(n == 0, 0.0, out)
    return out.item() if out.ndim == 0 else out


def halfcircle_symbol(theta):
    return np.where(np.cos(theta) > 0, 1.0, -1.0)


@dataclass(frozen=True)
class WanderingReport:
    k: int
    residual: float
    core_size: int
    gamma: np.ndarray = field(repr=False)
    labels: list = field(repr=False)


def wandering_equivalence(k, N):
    """Intertwine multiplication by xi^k with the k-fold sum of shifts.

    The wandering subspace is span{1, xi, ..., xi^(k-1)}; Gamma sends
    e_j with j = m k + r to copy r of the shift at index m.
    """
    if k < 1:
        raise DimensionError("k must be at least 1")
    if N < 4 * k:
        raise DimensionError(f"window half-width must be at least {4 * k}")
    idx = np.arange(-N, N + 1)
    m, r = np.divmod(idx, k)
    mlo, mhi = int(m.min()), int(m.max())
    width = mhi - mlo + 1
    labels = [(int(rr), int(mm)) for rr in range(k) for mm in range(mlo, mhi + 1)]
    G = np.zeros((k * width, idx.size))
    G[r * width + (m - mlo), idx + N] = 1.0
    Mk = window_shift(N, power=k).matrix
    S = np.eye(width, k=-1)
    Msum = np.kron(np.eye(k), S)
    core = idx[np.abs(idx) <= N - k]
    res = 0.0
    for j in core:
        e = np.zeros(idx.size)
        e[j + N] = 1.0
        res = max(res, np.linalg.norm(G @ (Mk @ e) - Msum @ (G @ e)))
    return WanderingReport(k, float(res), int(core.size), G, labels)
