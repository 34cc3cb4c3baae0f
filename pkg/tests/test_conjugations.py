import numpy as np
import pytest
from hypothesis import given, strategies as st

from conjorbit.conjugations import (
    AntilinearOp,
    Conjugation,
    RealLinearOp,
    ValidationError,
    antilinear_star,
    c_real_basis,
    compose_conjugations,
    conjugation_from_symmetric,
    householder_factor,
    plain_conjugation,
    principal_half_phases,
    random_conjugation,
    real_linear_parts,
    symmetric_unitary_residuals,
    takagi_symmetric_unitary,
)
from conjorbit.numerics import DimensionError, PreconditionError, haar_unitary, max_norm


def _vec(rng, n):
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def test_identity_factor_is_plain_conjugation():
    C = conjugation_from_symmetric(np.eye(3))
    x = np.array([1 + 2j, -1j, 3.0])
    assert np.array_equal(C(x), np.conj(x))
    assert np.array_equal(C(C(x)), x)


def test_real_householder_is_conjugation():
    v = np.array([1.0, 2.0, -2.0])
    C = conjugation_from_symmetric(householder_factor(v))
    assert C.n == 3


def test_complex_householder_refused():
    with pytest.raises(PreconditionError):
        householder_factor(np.array([1.0, 1j]))


def test_complex_householder_is_not_symmetric():
    v = np.array([1.0, 1j]) / np.sqrt(2)
    H = np.eye(2) - 2 * np.outer(v, v.conj())
    with pytest.raises(ValidationError, match="symmetry"):
        conjugation_from_symmetric(H)


def test_validation_names_failed_property():
    with pytest.raises(ValidationError, match="symmetry"):
        conjugation_from_symmetric(np.array([[0, 1], [-1, 0]], dtype=complex))
    with pytest.raises(ValidationError, match="unitarity"):
        conjugation_from_symmetric(2 * np.eye(2))


def test_haar_w_wt_residuals():
    W = haar_unitary(8, 11)
    res = symmetric_unitary_residuals(W @ W.T)
    assert max(res.values()) <= 1e-12


def test_random_conjugation_seeding():
    C1 = random_conjugation(1, 3)
    assert abs(abs(C1.factor[0, 0]) - 1) < 1e-14
    S = random_conjugation(6, 2).factor
    assert max_norm(S - S.T) <= 1e-12 and max_norm(S @ np.conj(S) - np.eye(6)) <= 1e-12
    assert max_norm(random_conjugation(6, 2).factor - random_conjugation(6, 3).factor) > 1e-3
    with pytest.raises(DimensionError):
        random_conjugation(0, 1)


@given(st.integers(1, 16), st.integers(0, 10 ** 6))
def test_conjugation_is_antilinear_isometric_involution(n, seed):
    C = random_conjugation(n, seed)
    rng = np.random.default_rng(seed)
    for _ in range(4):
        x, y = _vec(rng, n), _vec(rng, n)
        a = complex(rng.standard_normal(), rng.standard_normal())
        assert abs(np.vdot(C(y), C(x)) - np.conj(np.vdot(y, x))) <= 1e-10 * (1 + abs(np.vdot(y, x)))
        assert np.linalg.norm(C(C(x)) - x) <= 1e-10 * np.linalg.norm(x)
        assert np.linalg.norm(C(a * x + y) - (np.conj(a) * C(x) + C(y))) <= 1e-10 * np.linalg.norm(x)


def test_takagi_identity_and_diagonal():
    assert np.allclose(takagi_symmetric_unitary(np.eye(3)), np.eye(3))
    th = np.array([0.3, -2.0, np.pi, 1.0])
    W = takagi_symmetric_unitary(np.diag(np.exp(1j * th)))
    assert np.allclose(np.abs(W), np.eye(4))
    assert np.allclose(np.diag(W), np.exp(0.5j * th))


def test_principal_branch_tie():
    assert principal_half_phases(np.array([-1.0 + 0j]))[0] == pytest.approx(1j)
    assert principal_half_phases(np.array([np.exp(-1j * np.pi)]))[0] == pytest.approx(1j)


@given(st.integers(1, 12), st.integers(0, 10 ** 6))
def test_takagi_round_trip(n, seed):
    S = random_conjugation(n, seed).factor
    W = takagi_symmetric_unitary(S)
    assert max_norm(W @ W.T - S) <= 1e-8
    assert max_norm(W.conj().T @ W - np.eye(n)) <= 1e-10


def test_takagi_degenerate_real_part():
    # Re S has a repeated eigenvalue; Im S splits it
    O = np.linalg.qr(np.random.default_rng(0).standard_normal((4, 4)))[0]
    S = O @ np.diag(np.exp(1j * np.array([0.5, -0.5, 2.0, -2.0]))) @ O.T
    W = takagi_symmetric_unitary(S)
    assert max_norm(W @ W.T - S) <= 1e-9


def test_takagi_rejects_non_symmetric():
    with pytest.raises(ValidationError):
        takagi_symmetric_unitary(haar_unitary(4, 1))


def test_c_real_basis_plain_and_flip():
    assert np.allclose(c_real_basis(plain_conjugation(3)), np.eye(3))
    C = conjugation_from_symmetric(np.fliplr(np.eye(3)))
    W = c_real_basis(C)
    for j in range(3):
        assert np.linalg.norm(C(W[:, j]) - W[:, j]) <= 1e-12
    e0 = np.array([0, 1, 0])
    s = (np.array([1, 0, 1])) / np.sqrt(2)
    a = 1j * (np.array([1, 0, -1])) / np.sqrt(2)
    for v in (e0, s, a):
        assert np.linalg.norm(C(v) - v) <= 1e-15
        assert np.linalg.norm(W @ (W.conj().T @ v) - v) <= 1e-12


def test_c_real_basis_random():
    C = random_conjugation(8, 9)
    W = c_real_basis(C)
    assert max(np.linalg.norm(C(W[:, j]) - W[:, j]) for j in range(8)) <= 1e-8
    assert max_norm(W.conj().T @ W - np.eye(8)) <= 1e-10


@given(st.integers(1, 10), st.integers(0, 10 ** 6))
def test_matrix_in_c_real_basis_is_conjugated(n, seed):
    C = random_conjugation(n, seed)
    A = haar_unitary(n, seed + 1) + 0.3 * haar_unitary(n, seed + 2)
    W = c_real_basis(C)
    CAC = C.factor @ np.conj(A) @ np.conj(C.factor)
    assert max_norm(W.conj().T @ CAC @ W - np.conj(W.conj().T @ A @ W)) <= 1e-8


def test_compose_conjugations():
    C1, C2 = random_conjugation(6, 1), random_conjugation(6, 2)
    assert max_norm(compose_conjugations(C1, C1) - np.eye(6)) <= 1e-12
    assert max_norm(compose_conjugations(C1, C2).conj().T - compose_conjugations(C2, C1)) <= 1e-12
    x = _vec(np.random.default_rng(0), 6)
    assert np.allclose(compose_conjugations(C1, C2) @ x, C1(C2(x)))
    u, v = np.exp(1j * np.arange(4)), np.exp(2j * np.arange(4) ** 2)
    G = compose_conjugations(Conjugation(np.diag(u)), Conjugation(np.diag(v)))
    assert np.allclose(G, np.diag(u * np.conj(v)))
    with pytest.raises(DimensionError):
        compose_conjugations(C1, random_conjugation(3, 1))


def test_antilinear_star():
    assert np.array_equal(antilinear_star(AntilinearOp(np.eye(3))).factor, np.eye(3))
    rng = np.random.default_rng(5)
    N = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    A = AntilinearOp(N)
    for _ in range(100):
        x, y = _vec(rng, 5), _vec(rng, 5)
        assert abs(np.vdot(y, A(x)) - np.conj(np.vdot(A.star()(y), x))) <= 1e-10
    assert np.array_equal(A.star().star().factor, N)


def test_real_linear_parts():
    rng = np.random.default_rng(6)
    P = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    Q = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    A = RealLinearOp(P, Q)
    Pc, Aa, dag = real_linear_parts(A)
    for _ in range(100):
        x, y = _vec(rng, 5), _vec(rng, 5)
        assert np.linalg.norm(Pc @ x + Aa(x) - A(x)) <= 1e-12
        assert abs(np.vdot(y, A(x)).real - np.vdot(dag(y), x).real) <= 1e-10
    _, Aa0, dag0 = real_linear_parts(RealLinearOp(P, np.zeros((5, 5))))
    assert np.array_equal(Aa0.factor, np.zeros((5, 5)))
    assert np.array_equal(dag0.linear_part, P.conj().T)
    Pz, _, _ = real_linear_parts(RealLinearOp(np.zeros((3, 3)), np.eye(3)))
    assert not Pz.any()


def test_real_linear_shape_mismatch():
    with pytest.raises(DimensionError):
        RealLinearOp(np.eye(2), np.eye(3))
