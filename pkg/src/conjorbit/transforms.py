"""Quadrature models of the Fourier-Plancherel and Hilbert transforms.

Both transforms are diagonal in explicit orthonormal bases: Hermite
functions for the Fourier transform (eigenvalues (-i)^n) and rational
functions f_n for the Hilbert transform (eigenvalues -i for n >= 0 and
+i for n < 0). Truncating these bases gives finite diagonal models where
order-two index permutations build conjugations.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.signal import fftconvolve

from .numerics import PreconditionError
from .orbit import permutation_conjugation


class ResolutionError(ValueError):
    """The grid cannot resolve the requested functions."""


@dataclass(frozen=True)
class LineGrid:
    half_length: float
    points: int

    def __post_init__(self):
        if self.points % 2 == 0 or self.points < 3:
            raise PreconditionError("LineGrid needs an odd number of points (at least 3)")

    @property
    def nodes(self):
        return np.linspace(-self.half_length, self.half_length, self.points)

    @property
    def step(self):
        return 2 * self.half_length / (self.points - 1)

    @property
    def weights(self):
        w = np.full(self.points, self.step)
        w[[0, -1]] *= 0.5
        return w

    def inner(self, f, g):
        w = self.weights if np.ndim(f) == 1 else self.weights[:, None]
        return np.sum(w * np.conj(f) * g, axis=0)

    def norm(self, f):
        return np.sqrt(np.real(self.inner(f, f)))


HERMITE_GRID = LineGrid(40.0, 4001)
HILBERT_GRID = LineGrid(400.0, 60001)


@dataclass(frozen=True)
class HermiteBasis:
    nmax: int
    grid: LineGrid
    values: np.ndarray = field(repr=False)  # shape (points, nmax + 1)


def hermite_basis(nmax, grid=HERMITE_GRID):
    """Hermite functions H_0..H_nmax by the normalized three-term recurrence.

    The analytic normalization is kept and each column is then rescaled to
    unit grid norm, a change far below the stated tolerances on resolved grids.
    """
    need_L = np.sqrt(2 * nmax) + 6
    per_unit = (grid.points - 1) / (2 * grid.half_length)
    if grid.half_length < need_L or per_unit < 8:
        pts = int(2 * np.ceil(8 * max(need_L, grid.half_length))) + 1
        raise ResolutionError(
            f"grid under-resolves H_{nmax}: use half_length >= {need_L:.2f} "
            f"and at least 8 points per unit, e.g. LineGrid({max(need_L, grid.half_length):.1f}, {pts})"
        )
    x = grid.nodes
    H = np.empty((x.size, nmax + 1))
    H[:, 0] = np.pi ** -0.25 * np.exp(-x * x / 2)
    if nmax >= 1:
        H[:, 1] = np.sqrt(2.0) * x * H[:, 0]
    for n in range(1, nmax):
        H[:, n + 1] = np.sqrt(2.0 / (n + 1)) * x * H[:, n] - np.sqrt(n / (n + 1)) * H[:, n - 1]
    H /= grid.norm(H)
    return HermiteBasis(nmax, grid, H)


def fourier_apply(f, grid=HERMITE_GRID, chunk=512):
    """(F f)(x) = (2 pi)^(-1/2) * integral of f(t) e^{-ixt} dt by the trapezoid rule.

    ``f`` may hold several columns. Inputs that do not decay at the ends
    trigger a warning; the computation still runs.
    """
    f = np.asarray(f, dtype=complex)
    one = f.ndim == 1
    F = f[:, None] if one else f
    if np.max(np.abs(F[[0, -1]])) > 1e-12:
        warnings.warn("fourier_apply: input does not decay below 1e-12 at the grid ends", RuntimeWarning)
    x = grid.nodes
    wf = grid.weights[:, None] * F
    out = np.empty_like(F)
    for s in range(0, x.size, chunk):
        out[s:s + chunk] = np.exp(-1j * np.outer(x[s:s + chunk], x)) @ wf
    out /= np.sqrt(2 * np.pi)
    return out[:, 0] if one else out


def hilbert_eigenbasis(nmin, nmax, grid=HILBERT_GRID):
    """Columns f_n, n = nmin..nmax, with f_n = u^n / (sqrt(pi) (x + i)), u = (x - i)/(x + i).

    For n < 0 the second branch (x + i)^(-n-1) / (x - i)^(-n) / sqrt(pi) is used.
    """
    if nmin > nmax:
        raise PreconditionError("need nmin <= nmax")
    x = grid.nodes
    out = np.empty((x.size, nmax - nmin + 1), dtype=complex)
    for col, n in enumerate(range(nmin, nmax + 1)):
        if n >= 0:
            out[:, col] = (x - 1j) ** n / (x + 1j) ** (n + 1)
        else:
            out[:, col] = (x + 1j) ** (-n - 1) / (x - 1j) ** (-n)
    return out / np.sqrt(np.pi)


def hilbert_gram(nmin, nmax, grid=HILBERT_GRID, tail=True):
    """Gram matrix of f_nmin..f_nmax: trapezoid sum plus the exact mass beyond |x| = L.

    With x = tan(p), conj(f_m) f_n dx = (-1)^k e^{2ikp} dp / pi for k = n - m,
    so the tails integrate in closed form.
    """
    B = hilbert_eigenbasis(nmin, nmax, grid)
    G = (grid.weights[:, None] * B).conj().T @ B
    if tail:
        pL = np.arctan(grid.half_length)
        n = np.arange(nmin, nmax + 1)
        k = n[None, :] - n[:, None]
        ks = np.where(k == 0, 1, k)
        T = np.where(k == 0, (np.pi - 2 * pL) / np.pi, -((-1.0) ** ks) * np.sin(2 * ks * pL) / (ks * np.pi))
        G = G + T
    return G


def _far_field(G, grid):
    # PV integral over |t| > L of g(+-L) L / |t| / (x - t), i.e. a 1/t tail continued past the grid
    x, L, h = grid.nodes, grid.half_length, grid.step
    right = np.log(np.maximum(np.abs(L - x), h / 2) / L)
    left = np.log(np.maximum(np.abs(L + x), h / 2) / L)
    xs = np.where(x == 0, 1.0, x)
    out = L * (np.outer(right, G[-1]) + np.outer(left, G[0])) / xs[:, None]
    centre = x == 0
    out[centre] = G[0] - G[-1]
    return out


def hilbert_apply_pv(f, grid=HILBERT_GRID, far_field=True):
    """(H g)(x) = (1/pi) PV integral of g(t) / (x - t) dt.

    The singular node is dropped and replaced by the locally linear
    correction -h g'(x); on a uniform grid the remaining sum is a discrete
    convolution with 1/k, evaluated by FFT. With ``far_field`` the mass
    beyond the grid is added in closed form for a g that decays like 1/t.
    """
    g = np.asarray(f, dtype=complex)
    one = g.ndim == 1
    G = g[:, None] if one else g
    P = G.shape[0]
    k = np.arange(-(P - 1), P)
    kern = np.zeros(k.size)
    kern[k != 0] = 1.0 / k[k != 0]
    out = np.empty_like(G)
    for c in range(G.shape[1]):
        s = fftconvolve(G[:, c], kern)[P - 1:2 * P - 1]
        d = np.zeros(P, dtype=complex)
        d[1:-1] = 0.5 * (G[2:, c] - G[:-2, c])
        out[:, c] = s - d
    if far_field:
        out += _far_field(G, grid)
    out /= np.pi
    return out[:, 0] if one else out


def pv_reference(g, x, cutoff=1e4):
    """Adaptive-quadrature value of (1/pi) PV integral of g(t) / (x - t) dt."""
    a, b = x - 1.0, x + 1.0
    core = quad(g, a, b, weight="cauchy", wvar=x, limit=200)[0]
    left = quad(lambda t: g(t) / (t - x), -cutoff, a, limit=400)[0]
    right = quad(lambda t: g(t) / (t - x), b, cutoff, limit=400)[0]
    return -(core + left + right) / np.pi


def _require_order_two(sigma):
    sigma = np.asarray(sigma, dtype=int)
    n = sigma.size
    if sorted(sigma.tolist()) != list(range(n)):
        raise PreconditionError("sigma must map the truncated index range onto itself")
    if np.any(sigma[sigma] != np.arange(n)):
        raise PreconditionError("sigma must satisfy sigma o sigma = id")
    return sigma


def sigma_diagonal_member(eigenvalues, sigma):
    """diag(conj(xi_sigma(j))) with its permutation-factor witness C_sigma."""
    xi = np.asarray(eigenvalues, dtype=complex)
    sigma = _require_order_two(sigma)
    if sigma.size != xi.size:
        raise PreconditionError("sigma and eigenvalues differ in length")
    member = np.conj(xi[sigma])
    C = permutation_conjugation(sigma)
    S = C.factor
    res = np.max(np.abs(S @ np.diag(np.conj(xi)) @ np.conj(S) - np.diag(member)))
    if res > 1e-12:
        raise PreconditionError(f"C_sigma U C_sigma differs from the member by {res:.3e}")
    return member, C


_POW_MINUS_I = np.array([1, -1j, -1, 1j])


def fourier_eigenvalues(nmax):
    """(-i)^n for n = 0..nmax, exact."""
    return _POW_MINUS_I[np.arange(nmax + 1) % 4]


def fourier_sigma(nmax):
    """Fix even n and swap 1<->3, 5<->7, ...; refuses a truncation that splits a pair."""
    sigma = np.arange(nmax + 1)
    for a in range(1, nmax + 1, 4):
        if a + 2 > nmax:
            raise PreconditionError(f"nmax={nmax} splits the pair {a}<->{a + 2}")
        sigma[a], sigma[a + 2] = a + 2, a
    return sigma


def hilbert_indices(K):
    return np.arange(-K, K)


def hilbert_eigenvalues(K):
    n = hilbert_indices(K)
    return np.where(n >= 0, -1j, 1j)


def hilbert_sigma(K):
    """Pair n with -n-1 on the index range -K..K-1 (positions offset by K)."""
    n = hilbert_indices(K)
    return (-n - 1) + K
