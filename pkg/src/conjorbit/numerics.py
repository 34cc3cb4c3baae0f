"""Dense complex linear algebra: unitary checks, Jacobi eigensolvers, Haar sampling.

Matrices are plain ``numpy`` complex arrays. The eigensolvers are cyclic
Jacobi iterations so every spectral result in the package traces back to
one small, inspectable routine.
"""

from dataclasses import dataclass

import numpy as np

DEFAULT_TOL = 1e-10
CLUSTER_TOL = 1e-8
PAIRING_TOL = 1e-8


class DimensionError(ValueError):
    """Input has the wrong shape or size."""


class PreconditionError(ValueError):
    """Input violates a documented precondition."""


class ConvergenceError(RuntimeError):
    """An iterative routine hit its iteration cap."""


class UnsupportedCaseError(ValueError):
    """Input lies outside what the library decides."""


class ConsistencyError(RuntimeError):
    """Two routes to the same quantity disagree."""


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_square(A, name="matrix"):
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise PreconditionError(f"{name} has non-finite entries")
    return A


def max_norm(A):
    A = np.asarray(A)
    return float(np.max(np.abs(A))) if A.size else 0.0


def unitary_residual(A):
    A = as_square(A)
    eye = np.eye(A.shape[0])
    AH = A.conj().T
    return max(max_norm(AH @ A - eye), max_norm(A @ AH - eye))


def unitary_check(A, tol=DEFAULT_TOL):
    """True iff both A*A - I and AA* - I are within ``tol`` in max norm."""
    return unitary_residual(A) <= tol


def _off_norm(A):
    off = A - np.diag(np.diag(A))
    return np.sqrt(np.sum(np.abs(off) ** 2))


def jacobi_eigh(A, tol=1e-15, max_sweeps=60):
    """Cyclic Jacobi eigensolver for a Hermitian (or real symmetric) matrix.

    Returns ``(w, V)`` with ``A V = V diag(w)``; eigenvalues are left in the
    order the rotations produce, so an already diagonal input returns V = I.
    Real input stays real.
    """
    A = as_square(A, "Hermitian matrix")
    real = not np.iscomplexobj(A)
    A = np.array(A, dtype=float if real else complex)
    A = 0.5 * (A + A.conj().T)
    n = A.shape[0]
    V = np.eye(n, dtype=A.dtype)
    scale = max(np.sqrt(np.sum(np.abs(A) ** 2)), np.finfo(float).tiny)
    for _ in range(max_sweeps):
        if _off_norm(A) <= tol * scale:
            return np.real(np.diag(A)).copy(), V
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                mag = abs(apq)
                if mag <= 1e-300 or mag <= 1e-18 * scale:
                    continue
                phase = apq / mag
                theta = (A[q, q].real - A[p, p].real) / (2.0 * mag)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # rotation u = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                ph = np.conj(phase)
                for M in (A, V):
                    cp, cq = M[:, p].copy(), M[:, q]
                    M[:, p] = c * cp - s * ph * cq
                    M[:, q] = s * cp + c * ph * cq
                rp, rq = A[p, :].copy(), A[q, :]
                A[p, :] = c * rp - s * phase * rq
                A[q, :] = s * rp + c * phase * rq
                A[p, q] = A[q, p] = 0.0
    if _off_norm(A) <= 1e-12 * scale:
        return np.real(np.diag(A)).copy(), V
    raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")


def clusters(values, threshold=CLUSTER_TOL):
    """Group indices whose values chain together within ``threshold``."""
    order = np.argsort(values, kind="stable")
    groups = [[order[0]]] if len(order) else []
    for a, b in zip(order[:-1], order[1:]):
        if values[b] - values[a] <= threshold:
            groups[-1].append(b)
        else:
            groups.append([b])
    return [sorted(g) for g in groups]


def refine_in_clusters(Q, values, B, threshold=CLUSTER_TOL):
    """Rotate columns of Q inside each cluster of ``values`` to diagonalize Q* B Q."""
    Q = Q.copy()
    for g in clusters(values, threshold):
        if len(g) < 2:
            continue
        block = Q[:, g].conj().T @ B @ Q[:, g]
        _, R = jacobi_eigh(block)
        Q[:, g] = Q[:, g] @ R
    return Q


def unitary_eig(U, tol=DEFAULT_TOL):
    """Eigendecomposition of a unitary through the commuting pair H, K.

    H = (U + U*)/2 is diagonalized by Jacobi; K = (U - U*)/(2i) is then
    diagonalized inside each cluster of H eigenvalues.
    """
    U = as_square(U)
    if not unitary_check(U, tol):
        raise PreconditionError(f"matrix is not unitary within {tol:g}")
    U = U.astype(complex)
    UH = U.conj().T
    H = 0.5 * (U + UH)
    K = (U - UH) / 2j
    h, Q = jacobi_eigh(H)
    Q = refine_in_clusters(Q, h, K)
    lam = np.einsum("ij,ij->j", Q.conj(), U @ Q)
    n = U.shape[0]
    if np.linalg.norm(Q @ np.diag(lam) @ Q.conj().T - U) > 10 * tol * max(n, 1):
        raise ConvergenceError("eigendecomposition failed its reconstruction check")
    return EigenDecomposition(lam, Q)


def haar_unitary(n, seed):
    """Haar-distributed n x n unitary: Gaussian matrix, QR, phase-fixed columns."""
    if n < 1:
        raise DimensionError("n must be at least 1")
    rng = np.random.default_rng(seed)
    Z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))


def haar_orthogonal(n, rng):
    """Haar-distributed real orthogonal matrix with the diagonal sign fix."""
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    s = np.sign(np.diag(R))
    s[s == 0] = 1.0
    return Q * s


def angles(values):
    """Arguments in [0, 2*pi)."""
    return np.mod(np.angle(np.asarray(values)), 2 * np.pi)


def multiset_equal(a, b, tol=PAIRING_TOL):
    """Compare unimodular multisets by angle with greedy pairing."""
    a, b = np.asarray(a).ravel(), np.asarray(b).ravel()
    if a.size != b.size:
        return False
    ta, tb = np.sort(angles(a)), np.sort(angles(b))
    used = np.zeros(tb.size, dtype=bool)
    for x in ta:
        d = np.abs(tb - x)
        d = np.minimum(d, 2 * np.pi - d)
        d[used] = np.inf
        k = int(np.argmin(d))
        if d[k] > tol:
            return False
        used[k] = True
    return True
