"""Multiplication symbols on the unit circle and the conjugations they induce.

Angles live in [-pi, pi). A symbol phi is described by the angle action
alpha of its conjugate: conj(phi(e^{i t})) = e^{i alpha(t)}. Membership of
M_phi in the conjugate orbit of the shift needs three things: alpha is an
involution, the pushforward density h of alpha is positive and integrable,
and h * (h o alpha) = 1. The conjugation is then C f = sqrt(h) conj(f o alpha).
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .numerics import PreconditionError

COLLAR = 4
OVERSAMPLE = 64
DEFAULT_TOL = 1e-3
MIN_DENSITY = 1e-6
MASS_TOL = 1e-3
SYMBOL_TOL = 1e-9


class DomainError(ValueError):
    """A map or sample lies outside the domain an operation handles."""


def wrap(t):
    """Angles reduced to [-pi, pi)."""
    return np.mod(np.asarray(t, dtype=float) + np.pi, 2 * np.pi) - np.pi


def circle_distance(s, t):
    return np.abs(wrap(np.asarray(s) - np.asarray(t)))


def theta_grid(grid_size):
    return -np.pi + 2 * np.pi * np.arange(grid_size) / grid_size


@dataclass(frozen=True)
class CircleMap:
    """Piecewise smooth self-map of the circle acting on angles."""

    forward: Callable
    derivative: Optional[Callable] = None
    piece_boundaries: tuple = ()

    def __call__(self, theta):
        return wrap(self.forward(np.asarray(theta, dtype=float)))

    def pieces(self):
        cuts = sorted({float(wrap(b)) for b in self.piece_boundaries} | {-np.pi})
        return list(zip(cuts, cuts[1:] + [np.pi]))


@dataclass(frozen=True)
class SampledFunction:
    grid_size: int
    samples: np.ndarray = field(repr=False)
    valid: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        if self.samples.shape != (self.grid_size,):
            raise PreconditionError("sample count does not match the grid size")

    @property
    def theta(self):
        return theta_grid(self.grid_size)


def sample(f, grid_size):
    return SampledFunction(grid_size, np.asarray(f(theta_grid(grid_size)), dtype=complex))


# ---- map catalog ----------------------------------------------------------


def identity_map():
    return CircleMap(lambda t: t, lambda t: np.ones_like(t))


def reflection_map():
    """theta -> -theta, the angle action of xi -> conj(xi)."""
    return CircleMap(lambda t: -t, lambda t: -np.ones_like(t))


def _solve_increasing(omega, domega, s, lo=0.0, hi=np.pi, iters=80):
    # safeguarded Newton for omega(x) = s on [lo, hi], omega increasing
    s = np.asarray(s, dtype=float)
    a, b = np.full_like(s, lo), np.full_like(s, hi)
    x = lo + (hi - lo) * (s - omega(lo)) / (omega(hi) - omega(lo))
    for _ in range(iters):
        r = omega(x) - s
        a = np.where(r < 0, x, a)
        b = np.where(r >= 0, x, b)
        d = domega(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            xn = x - r / d
        bad = ~np.isfinite(xn) | (xn < a) | (xn > b)
        xn = np.where(bad, 0.5 * (a + b), xn)
        if np.all(np.abs(xn - x) <= 2e-15 * (1 + np.abs(x))):
            return xn
        x = xn
    return x


def flip_from_increasing(omega, domega, omega_inv=None):
    """Involution alpha = -omega on [0, pi) and omega^{-1}(-t) on [-pi, 0).

    ``omega`` must increase from 0 to pi on [0, pi].
    """
    if omega_inv is None:
        omega_inv = lambda s: _solve_increasing(omega, domega, s)

    def fwd(t):
        t = np.asarray(t, dtype=float)
        out = np.empty_like(t)
        pos = t >= 0
        out[pos] = -omega(t[pos])
        out[~pos] = omega_inv(-t[~pos])
        return out

    def der(t):
        t = np.asarray(t, dtype=float)
        out = np.empty_like(t)
        pos = t >= 0
        out[pos] = -domega(t[pos])
        with np.errstate(divide="ignore"):
            out[~pos] = -1.0 / domega(omega_inv(-t[~pos]))
        return out

    return CircleMap(fwd, der, (0.0,))


def omega_square():
    """omega(t) = t^2 / pi, whose flip has density 2t/pi and sqrt(pi)/(2 sqrt(-t))."""
    return flip_from_increasing(
        lambda t: t * t / np.pi, lambda t: 2 * t / np.pi, lambda s: np.sqrt(np.pi * s)
    )


def omega_smooth(eps=0.5):
    """omega(t) = t - eps sin t, a flip with bounded density."""
    return flip_from_increasing(lambda t: t - eps * np.sin(t), lambda t: 1 - eps * np.cos(t))


def omega_square_density(theta):
    theta = np.asarray(theta, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(theta > 0, 2 * theta / np.pi, np.sqrt(np.pi) / (2 * np.sqrt(-theta)))


def increasing_psi_map(psi):
    """Angle action of conj(e^{i psi(t)}) for psi increasing on [0, 2 pi]."""
    return CircleMap(lambda t: -psi(np.mod(t, 2 * np.pi)), None, (0.0,))


def piecewise_map(pieces):
    """Build a map from catalog pieces ``[(start, end, tag, params), ...]``.

    Tags: identity, reflection (t -> -t), negation-flip (t -> t + pi),
    constant (t -> value), power (t -> sign * scale * (|t - origin| / scale)^exponent).
    """
    funcs = []
    for start, end, tag, params in pieces:
        funcs.append((float(start), float(end)) + _catalog(tag, params))

    def pick(t, which):
        t = np.asarray(t, dtype=float)
        out = np.full_like(t, np.nan)
        for a, b, f, df in funcs:
            m = (t >= a) & (t < b)
            out[m] = (f if which == 0 else df)(t[m])
        if np.any(np.isnan(out)):
            raise DomainError("pieces do not cover [-pi, pi)")
        return out

    bounds = tuple(sorted({a for a, _, _, _ in funcs} | {b for _, b, _, _ in funcs}))
    return CircleMap(lambda t: pick(wrap(t), 0), lambda t: pick(wrap(t), 1), bounds)


def _catalog(tag, p):
    if tag == "identity":
        return (lambda t: t, lambda t: np.ones_like(t))
    if tag == "reflection":
        return (lambda t: -t, lambda t: -np.ones_like(t))
    if tag == "negation-flip":
        return (lambda t: t + np.pi, lambda t: np.ones_like(t))
    if tag == "constant":
        v = float(p["value"])
        return (lambda t: np.full_like(t, v), lambda t: np.zeros_like(t))
    if tag == "power":
        e = float(p["exponent"])
        s = float(p.get("sign", 1.0))
        L = float(p.get("scale", np.pi))
        x0 = float(p.get("origin", 0.0))
        if e <= 0 or L <= 0:
            raise DomainError("power pieces need positive exponent and scale")

        def f(t):
            return s * L * (np.abs(t - x0) / L) ** e

        def df(t):
            u = np.abs(t - x0) / L
            with np.errstate(divide="ignore"):
                return s * e * u ** (e - 1) * np.sign(t - x0)

        return (f, df)
    raise DomainError(f"unknown map tag {tag!r}")


# ---- condition (a) --------------------------------------------------------


def involution_residual(alpha, grid_size):
    th = theta_grid(grid_size)
    return float(np.max(circle_distance(alpha(alpha(th)), th)))


def involution_check(alpha, grid_size, tol=DEFAULT_TOL):
    """True iff alpha(alpha(t)) = t on the grid within ``tol``."""
    if grid_size < 2 ** 10:
        raise PreconditionError("grid_size must be at least 2**10")
    return involution_residual(alpha, grid_size) <= tol


# ---- pieces, collar and prescan -------------------------------------------


@dataclass
class _Piece:
    a: float
    b: float
    x: np.ndarray
    y: np.ndarray
    # samples plus the one-sided limits at both ends
    xe: np.ndarray
    ye: np.ndarray


def _sample_pieces(alpha, grid_size):
    out = []
    for a, b in alpha.pieces():
        n = max(OVERSAMPLE, int(np.ceil(OVERSAMPLE * grid_size * (b - a) / (2 * np.pi))))
        x = a + (b - a) * (np.arange(n) + 0.5) / n
        y = np.unwrap(alpha(x))
        d = 1e-12 * max(1.0, b - a)
        ya, yb = alpha(np.array([a + d, b - d]))
        xe = np.concatenate([[a + d], x, [b - d]])
        ye = np.concatenate([[y[0] + wrap(ya - y[0])], y, [y[-1] + wrap(yb - y[-1])]])
        out.append(_Piece(a, b, x, y, xe, ye))
    return out


def _boundary_points(alpha):
    pts = [-np.pi]
    for a, b in alpha.pieces():
        d = 1e-12 * max(1.0, b - a)
        pts += [a, float(alpha(np.array([a + d]))[0]), float(alpha(np.array([b - d]))[0])]
    return np.array(pts)


def collar_mask(alpha, grid_size, width=COLLAR):
    """Grid nodes within ``width`` cells of a piece boundary or its image."""
    th = theta_grid(grid_size)
    step = 2 * np.pi / grid_size
    d = circle_distance(th[:, None], _boundary_points(alpha)[None, :])
    return np.any(d <= width * step * (1 + 1e-9), axis=1)


@dataclass(frozen=True)
class PrescanReport:
    range_ok: bool
    injective_ok: bool
    max_gap: float
    overlap: float

    @property
    def ok(self):
        return self.range_ok and self.injective_ok


def _merge(segs):
    merged = []
    for s, e in sorted(segs):
        if merged and s <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], e)
        else:
            merged.append([s, e])
    return merged


def prescan(alpha, grid_size):
    """Necessary conditions: the image covers the circle and alpha is injective.

    Coverage allows gaps up to one cell; injectivity requires strictly
    monotone samples in each piece and image overlaps of at most two cells.
    """
    step = 2 * np.pi / grid_size
    monotone = True
    segs, total = [], 0.0
    for p in _sample_pieces(alpha, grid_size):
        dy = np.diff(p.ye)
        if not (np.all(dy > 0) or np.all(dy < 0)):
            monotone = False
        lo, hi = float(p.ye.min()), float(p.ye.max())
        total += hi - lo
        if hi - lo >= 2 * np.pi:
            segs.append((0.0, 2 * np.pi))
            continue
        s = float(np.mod(lo + np.pi, 2 * np.pi))
        e = s + (hi - lo)
        segs += [(s, 2 * np.pi), (0.0, e - 2 * np.pi)] if e > 2 * np.pi else [(s, e)]
    merged = _merge(segs)
    covered = sum(e - s for s, e in merged)
    gaps = [b[0] - a[1] for a, b in zip(merged, merged[1:])]
    gaps.append(merged[0][0] + 2 * np.pi - merged[-1][1])
    gap = max(gaps)
    overlap = max(0.0, total - covered)
    return PrescanReport(
        bool(gap <= step * (1 + 1e-9)), bool(monotone and overlap <= 2 * step), float(gap), float(overlap)
    )


# ---- pushforward density --------------------------------------------------


def _require_monotone(pieces):
    for p in pieces:
        dy = np.diff(p.y)
        if not (np.all(dy > 0) or np.all(dy < 0)):
            raise DomainError(f"alpha is not monotone on [{p.a:.6g}, {p.b:.6g})")


def _ecdf(pieces):
    y = np.sort(wrap(np.concatenate([p.y for p in pieces])))
    K = y.size
    F = (np.arange(K) + 0.5) / K
    ye = np.concatenate([y - 2 * np.pi, y, y + 2 * np.pi])
    Fe = np.concatenate([F - 1, F, F + 1])
    return lambda t: np.interp(np.asarray(t, dtype=float), ye, Fe)


def _preimage_density(alpha, pieces):
    """h(t) = sum over preimages x of 1 / |alpha'(x)|, by bracketed Newton."""

    def h(t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for p in pieces:
            order = np.argsort(p.ye)
            ys, xs = p.ye[order], p.xe[order]
            for k in (-1, 0, 1):
                tt = t + 2 * np.pi * k
                hit = (tt >= ys[0]) & (tt <= ys[-1])
                if np.any(hit):
                    x = _invert_on_piece(alpha, p, ys, xs, tt[hit])
                    with np.errstate(divide="ignore"):
                        out[hit] += 1.0 / np.abs(alpha.derivative(x))
        return out

    return h


def _invert_on_piece(alpha, p, ys, xs, tgt):
    # monotone piece: the root lies between the two bracketing samples
    i = np.clip(np.searchsorted(ys, tgt), 1, ys.size - 1)
    a = np.minimum(xs[i - 1], xs[i])
    b = np.maximum(xs[i - 1], xs[i])
    x = np.interp(tgt, ys, xs)
    for _ in range(60):
        r = wrap(alpha(x) - tgt)
        d = alpha.derivative(x)
        right = (r < 0) == (d > 0)
        a = np.where(right, np.maximum(a, x), a)
        b = np.where(right, b, np.minimum(b, x))
        with np.errstate(divide="ignore", invalid="ignore"):
            xn = x - r / d
        bad = ~np.isfinite(xn) | (xn < a) | (xn > b)
        xn = np.where(bad, 0.5 * (a + b), xn)
        done = np.all(np.abs(xn - x) <= 2e-15 * (1 + np.abs(x)))
        x = xn
        if done:
            break
    return x


@dataclass(frozen=True)
class Density:
    """Pushforward density: grid samples plus a pointwise evaluator."""

    sampled: SampledFunction
    evaluate: Callable = field(repr=False)
    cdf: Callable = field(repr=False)
    method: str = "inverse-derivative"


def density(alpha, grid_size, use_derivative=True):
    """Pushforward density with its pointwise evaluator and pushforward CDF."""
    pieces = _sample_pieces(alpha, grid_size)
    _require_monotone(pieces)
    F = _ecdf(pieces)
    if use_derivative and alpha.derivative is not None:
        h_fn = _preimage_density(alpha, pieces)
        method = "inverse-derivative"
    else:
        eps = 0.5 * 2 * np.pi / grid_size
        h_fn = lambda t: 2 * np.pi * (F(np.asarray(t) + eps) - F(np.asarray(t) - eps)) / (2 * eps)
        method = "shrinking-interval"
    th = theta_grid(grid_size)
    collar = collar_mask(alpha, grid_size)
    h = np.empty(grid_size)
    h[~collar] = h_fn(th[~collar])
    # collar nodes carry the cell-averaged density so the operator stays defined
    half = np.pi / grid_size
    h[collar] = (F(th[collar] + half) - F(th[collar] - half)) * grid_size
    return Density(SampledFunction(grid_size, h, ~collar), h_fn, F, method)


def pushforward_density(alpha, grid_size, use_derivative=True):
    """h = d(m o alpha^{-1}) / dm on the grid; collar nodes flagged invalid."""
    return density(alpha, grid_size, use_derivative).sampled


# ---- the decision ---------------------------------------------------------


@dataclass(frozen=True)
class DecisionReport:
    member: bool
    prescan: PrescanReport
    a_ok: bool
    a_residual: float
    b_ok: Optional[bool]
    min_density: Optional[float]
    mass: Optional[float]
    c_ok: Optional[bool]
    c_residual: Optional[float]
    tolerance: float
    grid_size: int
    reason: str

    def __bool__(self):
        return self.member


def mult_orbit_decision(phi, alpha, grid_size, tol=DEFAULT_TOL, use_derivative=True):
    """Decide M_phi in the conjugate orbit of the shift via the three conditions.

    ``alpha`` is the angle action of conj(phi); a prescan for range and
    injectivity runs first and short-circuits on failure.
    """
    th = theta_grid(grid_size)
    mismatch = np.max(np.abs(np.conj(phi(th)) - np.exp(1j * alpha(th))))
    if mismatch > SYMBOL_TOL:
        raise PreconditionError(f"alpha is not the angle action of conj(phi): {mismatch:.3e}")
    a_res = involution_residual(alpha, grid_size)
    a_ok = a_res <= tol
    scan = prescan(alpha, grid_size)
    if not scan.ok:
        why = "essential range misses part of the circle" if not scan.range_ok else "not injective"
        return DecisionReport(False, scan, a_ok, a_res, None, None, None, None, None, tol, grid_size, why)
    dens = density(alpha, grid_size, use_derivative)
    h, valid = dens.sampled.samples, dens.sampled.valid
    min_h = float(np.min(h[valid]))
    collar = ~valid
    mass = float(np.sum(h[valid]) / grid_size + np.sum(h[collar]) / grid_size)
    b_ok = bool(min_h >= MIN_DENSITY and abs(mass - 1) <= MASS_TOL)
    img = alpha(th)
    img_collar = collar_mask_points(alpha, grid_size, img)
    keep = valid & ~img_collar
    c_res = float(np.max(np.abs(h[keep] * dens.evaluate(img[keep]) - 1)))
    c_ok = c_res <= tol
    member = bool(a_ok and b_ok and c_ok)
    reason = "all three conditions hold" if member else "failed: " + ", ".join(
        n for n, ok in (("(a)", a_ok), ("(b)", b_ok), ("(c)", c_ok)) if not ok
    )
    return DecisionReport(member, scan, a_ok, a_res, b_ok, min_h, mass, c_ok, c_res, tol, grid_size, reason)


def collar_mask_points(alpha, grid_size, points, width=COLLAR):
    step = 2 * np.pi / grid_size
    d = circle_distance(np.asarray(points)[:, None], _boundary_points(alpha)[None, :])
    return np.any(d <= width * step * (1 + 1e-9), axis=1)


def symbol_from_map(alpha):
    """phi with conj(phi) = e^{i alpha}."""
    return lambda t: np.exp(-1j * alpha(t))


# ---- symbol conjugations --------------------------------------------------


def _lagrange4(samples, t):
    # periodic four-point Lagrange interpolation on the uniform grid
    G = samples.size
    u = (wrap(t) + np.pi) * G / (2 * np.pi)
    i = np.floor(u).astype(int)
    s = u - i
    w = (
        -s * (s - 1) * (s - 2) / 6,
        (s + 1) * (s - 1) * (s - 2) / 2,
        -(s + 1) * s * (s - 2) / 2,
        (s + 1) * s * (s - 1) / 6,
    )
    return sum(wk * samples[(i + k) % G] for wk, k in zip(w, (-1, 0, 1, 2)))


def symbol_conjugation_apply(h, alpha, f, grid_size=None):
    """C f = sqrt(h) conj(f o alpha) on the grid.

    ``h`` and ``f`` may be sampled functions or pointwise callables; a
    sampled f is interpolated at the image points alpha(theta_m).
    """
    if isinstance(h, SampledFunction):
        G = h.grid_size
        hs = h.samples
        valid = h.valid
    else:
        G = grid_size if grid_size is not None else getattr(f, "grid_size", None)
        if G is None:
            raise PreconditionError("grid size required when h and f are callables")
        hs = np.asarray(h(theta_grid(G)), dtype=float)
        valid = None
    if isinstance(f, SampledFunction) and f.grid_size != G:
        raise PreconditionError("h and f live on different grids")
    if np.any(np.real(hs) < 0):
        raise DomainError("density has negative samples")
    img = alpha(theta_grid(G))
    fa = _lagrange4(f.samples, img) if isinstance(f, SampledFunction) else f(img)
    return SampledFunction(G, np.sqrt(np.real(hs)) * np.conj(fa), valid)


def symbol_conjugation(h_fn, alpha):
    """The conjugation as a map on pointwise callables."""

    def C(f):
        return lambda t: np.sqrt(h_fn(t)) * np.conj(f(alpha(t)))

    return C


def alpha_beta_member(alpha, beta, s, t, f, grid_size=None, check_modes=6):
    """Closed-form C M C f for C f = s conj(f o alpha) + i t beta conj(f).

    Requires s^2 + t^2 = 1, alpha a measure-preserving involution and
    beta o alpha = beta with beta in {-1, 1}. The closed form is checked
    against direct application of C M C on e^{ik theta}, |k| <= check_modes.
    """
    if abs(s * s + t * t - 1) > 1e-12:
        raise PreconditionError("need s^2 + t^2 = 1")
    G = f.grid_size if isinstance(f, SampledFunction) else grid_size
    if G is None:
        raise PreconditionError("grid size required for callable input")
    if not involution_check(alpha, G, 1e-9):
        raise PreconditionError("alpha is not an involution")
    h = pushforward_density(alpha, G).samples
    if np.max(np.abs(h - 1)) > 1e-6:
        raise PreconditionError("alpha is not measure preserving")
    th = theta_grid(G)
    a = alpha(th)
    b = beta(th)
    if np.max(np.abs(beta(a) - b)) > 1e-9 or np.max(np.abs(np.abs(b) - 1)) > 1e-12:
        raise PreconditionError("beta must be +-1 valued and alpha-invariant")

    def closed(fn):
        fa = fn(a)
        ff = fn(th)
        xi_bar, a_bar = np.exp(-1j * th), np.exp(-1j * a)
        return s * s * a_bar * ff + t * t * xi_bar * ff + 1j * s * t * b * (xi_bar - a_bar) * fa

    def C(fn):
        return lambda x: s * np.conj(fn(alpha(x))) + 1j * t * beta(x) * np.conj(fn(x))

    worst = 0.0
    for k in range(-check_modes, check_modes + 1):
        e = lambda x, k=k: np.exp(1j * k * x)
        Ce = C(e)
        direct = C(lambda x: np.exp(1j * x) * Ce(x))(th)
        worst = max(worst, float(np.max(np.abs(direct - closed(e)))))
    if worst > 1e-6:
        raise PreconditionError(f"closed form disagrees with direct CMC: {worst:.3e}")
    if isinstance(f, SampledFunction):
        fa = _lagrange4(f.samples, a)
        xi_bar, a_bar = np.exp(-1j * th), np.exp(-1j * a)
        out = s * s * a_bar * f.samples + t * t * xi_bar * f.samples + 1j * s * t * b * (xi_bar - a_bar) * fa
        return SampledFunction(G, out)
    return SampledFunction(G, closed(f))
