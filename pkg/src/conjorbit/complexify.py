"""Real block model of a unitary and its conjugate orbit.

For a conjugation J with J U J = U*, the J-real vectors form a real space
and U acts on pairs (h_r, h_c) as the orthogonal block matrix
[[Ur, -Uc], [Uc, Ur]]. Here the J-real space is the real span of the
Takagi basis of J, so Ur + i Uc is simply the matrix of U in that basis.
"""

from dataclasses import dataclass

import numpy as np

from .conjugations import (
    AntilinearOp,
    Conjugation,
    antilinear_star,
    c_real_basis,
    conjugation_from_symmetric,
)
from .numerics import (
    ConsistencyError,
    DimensionError,
    PreconditionError,
    as_square,
    haar_orthogonal,
    max_norm,
    unitary_check,
)
from .orbit import cuc

ADJOINT_TOL = 1e-8
BLOCK_TOL = 1e-10
CROSS_TOL = 1e-9
REAL_TOL = 1e-12


@dataclass(frozen=True)
class ComplexifiedBlocks:
    """Real blocks (Ur, Uc) of the complex matrix Ur + i Uc."""

    Ur: np.ndarray
    Uc: np.ndarray

    def __post_init__(self):
        Ur, Uc = np.asarray(self.Ur), np.asarray(self.Uc)
        if Ur.ndim != 2 or Ur.shape[0] != Ur.shape[1] or Ur.shape != Uc.shape:
            raise DimensionError("blocks must be square and of equal size")
        for name, B in (("Ur", Ur), ("Uc", Uc)):
            if np.iscomplexobj(B) and max_norm(B.imag) > REAL_TOL:
                raise PreconditionError(f"{name} has imaginary parts above {REAL_TOL:g}")
        object.__setattr__(self, "Ur", np.real(Ur).astype(float))
        object.__setattr__(self, "Uc", np.real(Uc).astype(float))

    @property
    def n(self):
        return self.Ur.shape[0]

    @property
    def complex_matrix(self):
        return self.Ur + 1j * self.Uc

    def relation_residuals(self):
        """Residuals of the four relations satisfied by blocks of a J-symmetric unitary."""
        Ur, Uc = self.Ur, self.Uc
        return {
            "square_sum": max_norm(Ur @ Ur + Uc @ Uc - np.eye(self.n)),
            "commute": max_norm(Ur @ Uc - Uc @ Ur),
            "symmetric_r": max_norm(Ur - Ur.T),
            "symmetric_c": max_norm(Uc - Uc.T),
        }


def realify(A):
    """Real 2n x 2n matrix of x -> A x in coordinates (Re x, Im x)."""
    A = np.asarray(A, dtype=complex)
    return np.block([[A.real, -A.imag], [A.imag, A.real]])


def derealify(R, tol=BLOCK_TOL):
    """Inverse of ``realify``; refuses a real matrix that is not complex-linear."""
    R = as_square(R, "real block matrix")
    n2 = R.shape[0]
    if n2 % 2:
        raise DimensionError("block matrix must have even size")
    n = n2 // 2
    a, b, c, d = R[:n, :n], R[:n, n:], R[n:, :n], R[n:, n:]
    if max_norm(a - d) > tol or max_norm(b + c) > tol:
        raise PreconditionError("block pattern [[A, -B], [B, A]] violated")
    return 0.5 * (a + d) + 0.5j * (c - b)


def complexify_blocks(U, C):
    """Blocks of U in the C-real basis; C must satisfy C U C = U*."""
    U = as_square(U).astype(complex)
    if not unitary_check(U):
        raise PreconditionError("U is not unitary")
    if C.factor.shape != U.shape:
        raise DimensionError("conjugation and matrix sizes differ")
    res = max_norm(cuc(C, U).matrix - U.conj().T)
    if res > ADJOINT_TOL:
        raise PreconditionError(f"C U C differs from U* by {res:.3e}; use adjoint_witness(U)")
    W = c_real_basis(C)
    M = W.conj().T @ U @ W
    return ComplexifiedBlocks(M.real, M.imag)


def hat_matrix(blocks):
    """The orthogonal block operator [[Ur, -Uc], [Uc, Ur]]."""
    H = np.block([[blocks.Ur, -blocks.Uc], [blocks.Uc, blocks.Ur]])
    derealify(H)
    return H


def c_linear_pattern(R, tol=BLOCK_TOL):
    """Does the 2x2 block matrix [[Wrr, Wrc], [Wcr, Wcc]] commute with multiplication by i?"""
    try:
        derealify(R, tol)
    except PreconditionError:
        return False
    return True


def jhat(n):
    return np.diag(np.concatenate([np.ones(n), -np.ones(n)]))


def jhat_symmetry_check(blocks, tol=BLOCK_TOL):
    """Is J^ U^ J^ equal to both [[Ur, Uc], [-Uc, Ur]] and the transpose of U^?"""
    H = np.block([[blocks.Ur, -blocks.Uc], [blocks.Uc, blocks.Ur]])
    J = jhat(blocks.n)
    JHJ = J @ H @ J
    flipped = np.block([[blocks.Ur, blocks.Uc], [-blocks.Uc, blocks.Ur]])
    return max_norm(JHJ - flipped) <= tol and max_norm(JHJ - H.T) <= tol


def wblock_from_angles(O, theta):
    """Wr = O diag(cos theta) O^t and Wc = O diag(sin theta) O^t."""
    O = np.asarray(O, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if O.shape != (theta.size, theta.size):
        raise DimensionError("O and theta sizes differ")
    return ComplexifiedBlocks((O * np.cos(theta)) @ O.T, (O * np.sin(theta)) @ O.T)


def wblock_generate(n, seed, theta=None):
    """Random blocks satisfying the four relations; Wr + i Wc is symmetric unitary."""
    if n < 1:
        raise DimensionError("n must be at least 1")
    rng = np.random.default_rng(seed)
    O = haar_orthogonal(n, rng)
    if theta is None:
        theta = rng.uniform(-np.pi, np.pi, n)
    return wblock_from_angles(O, theta)


def _require_w_relations(Wb, tol=BLOCK_TOL):
    for name, res in Wb.relation_residuals().items():
        if res > tol:
            raise PreconditionError(f"W-blocks fail {name}: residual {res:.3e}")


def orbit_via_blocks(U, C, Wb):
    """V = W^ U^* W^* in the block model, returned as a complex matrix.

    The result equals S' conj(U) S'* with S' = B (Wr + i Wc) B^t, B the
    C-real basis; both routes are compared before returning.
    """
    U = as_square(U).astype(complex)
    blocks = complexify_blocks(U, C)
    if Wb.n != blocks.n:
        raise DimensionError("W-blocks and U sizes differ")
    _require_w_relations(Wb)
    Uhat, What = hat_matrix(blocks), hat_matrix(Wb)
    Vhat = What @ Uhat.T @ What.T
    B = c_real_basis(C)
    X = realify(B.conj().T)
    V = derealify(X.T @ Vhat @ X, tol=1e-9)
    Sp = conjugation_from_symmetric(B @ Wb.complex_matrix @ B.T, tol=1e-9)
    res = max_norm(V - cuc(Sp, U).matrix)
    if res > CROSS_TOL:
        raise ConsistencyError(f"block route and S conj(U) S* route differ by {res:.3e}")
    return V


def model_fidelity(U, C):
    """max |X U X^-1 - U^| with X the real coordinate map through the C-real basis."""
    U = as_square(U).astype(complex)
    blocks = complexify_blocks(U, C)
    X = realify(c_real_basis(C).conj().T)
    return max_norm(X @ realify(U) @ X.T - hat_matrix(blocks))


@dataclass(frozen=True)
class AntilinearBlock2x2:
    """Antilinear map [[C1, C2], [C3, C4]] on the doubled space."""

    C1: AntilinearOp
    C2: AntilinearOp
    C3: AntilinearOp
    C4: AntilinearOp

    def __post_init__(self):
        shapes = {np.shape(op.factor) for op in (self.C1, self.C2, self.C3, self.C4)}
        if len(shapes) != 1 or len(next(iter(shapes))) != 2:
            raise DimensionError("all four blocks need the same square shape")

    @property
    def factor(self):
        return np.block([[self.C1.factor, self.C2.factor], [self.C3.factor, self.C4.factor]])

    def __call__(self, x):
        return self.factor @ np.conj(x)

    @classmethod
    def from_factor(cls, N):
        N = as_square(N, "block factor")
        n = N.shape[0] // 2
        return cls(*(AntilinearOp(N[r:r + n, c:c + n]) for r in (0, n) for c in (0, n)))


def _compose(A, B):
    # A B for antilinear A, B is complex-linear with matrix a conj(b)
    return np.asarray(A.factor) @ np.conj(B.factor)


def block_conjugation_residuals(B):
    """Residuals of the block identities for [[C1, C2], [C3, C4]] to be a conjugation."""
    C1, C2, C3, C4 = B.C1, B.C2, B.C3, B.C4
    n = np.shape(C1.factor)[0]
    I = np.eye(n)
    s1, s2, s4 = antilinear_star(C1), antilinear_star(C2), antilinear_star(C4)
    return {
        "c1_self_star": max_norm(C1.factor - s1.factor),
        "c4_self_star": max_norm(C4.factor - s4.factor),
        "c3_is_c2_star": max_norm(C3.factor - s2.factor),
        "row1_identity": max_norm(_compose(C1, s1) + _compose(C2, s2) - I),
        "row2_identity": max_norm(_compose(s2, C2) + _compose(C4, s4) - I),
        "zero_relation": max_norm(_compose(s2, C1) + _compose(C4, s2)),
    }


def block_conjugation_check(B, tol=BLOCK_TOL, trials=8, seed=0):
    """All block identities hold and the assembled map is an isometric involution."""
    if any(r > tol for r in block_conjugation_residuals(B).values()):
        return False
    rng = np.random.default_rng(seed)
    m = 2 * np.shape(B.C1.factor)[0]
    for _ in range(trials):
        x = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        y = B(x)
        if abs(np.linalg.norm(y) - np.linalg.norm(x)) > tol * max(1.0, np.linalg.norm(x)):
            return False
        if np.linalg.norm(B(y) - x) > tol * max(1.0, np.linalg.norm(x)):
            return False
    return True


def diagonal_block_conjugation(C1, C4):
    """[[C1, 0], [0, C4]] for conjugations C1 and C4."""
    Z = AntilinearOp(np.zeros_like(C1.factor))
    return AntilinearBlock2x2(C1, Z, Z, C4)


def rotate_block_conjugation(B, Y):
    """Y B Y* for a unitary Y on the doubled space; its factor is Y N Y^t."""
    Y = as_square(Y).astype(complex)
    if not unitary_check(Y):
        raise PreconditionError("rotation must be unitary")
    return AntilinearBlock2x2.from_factor(Y @ B.factor @ Y.T)


def circle_shift_blocks(grid_size):
    """Blocks of multiplication by xi on a circle grid under pointwise conjugation.

    Returns the blocks and the sampled coordinates (cos, sin) they should equal.
    """
    theta = 2 * np.pi * np.arange(grid_size) / grid_size
    U = np.diag(np.exp(1j * theta))
    blocks = complexify_blocks(U, Conjugation(np.eye(grid_size, dtype=complex)))
    return blocks, np.cos(theta), np.sin(theta)
