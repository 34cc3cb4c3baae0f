from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conjorbit.cli import q9_basis
from conjorbit.conjugations import (
    Conjugation,
    c_real_basis,
    compose_conjugations,
    conjugation_from_symmetric,
    plain_conjugation,
    random_conjugation,
)
from conjorbit.numerics import (
    DimensionError,
    PreconditionError,
    UnsupportedCaseError,
    haar_unitary,
    max_norm,
    multiset_equal,
)
from conjorbit.orbit import (
    adjoint_witness,
    cuc,
    diag_in_orbit,
    diag_member_witness,
    permutation_conjugation,
    same_member,
    self_in_orbit,
    symmetrizable_by_phases,
    two_by_two_factor,
    two_by_two_member,
)


def test_scalar_orbit_is_single_point():
    lam = np.exp(0.7j)
    for seed in range(3):
        V = cuc(random_conjugation(4, seed), lam * np.eye(4)).matrix
        assert max_norm(V - np.conj(lam) * np.eye(4)) <= 1e-12


def test_theta_n_pi_family_gives_adjoint():
    xi = np.exp(1j * np.array([0.4, -1.3]))
    for n in range(3):
        C = two_by_two_factor(n * np.pi, 0.9, n, phi=0.3)
        assert max_norm(cuc(C, np.diag(xi)).matrix - np.diag(np.conj(xi))) <= 1e-12


def test_two_by_two_half_odd_reverses():
    xi = np.exp(1j * np.array([0.4, -1.3]))
    C = two_by_two_factor(np.pi / 2, 0.0, 0, phi=1.1)
    assert max_norm(cuc(C, np.diag(xi)).matrix - np.diag(np.conj(xi[::-1]))) <= 1e-12


@given(
    st.floats(-np.pi, np.pi), st.floats(-np.pi, np.pi), st.integers(0, 7), st.floats(-np.pi, np.pi)
)
def test_two_by_two_closed_form(theta, alpha, n, phi):
    C = two_by_two_factor(theta, alpha, n, phi)
    assert max_norm(cuc(C, np.diag([1.0, -1.0])).matrix - two_by_two_member(theta, alpha, n)) <= 1e-12


def test_cuc_spectrum_is_conjugated():
    U = haar_unitary(8, 1)
    V = cuc(random_conjugation(8, 2), U).matrix
    assert multiset_equal(np.linalg.eigvals(V), np.conj(np.linalg.eigvals(U)))
    assert max_norm(V @ V.conj().T - np.eye(8)) <= 1e-10


def test_cuc_rejects_non_unitary_and_mismatch():
    with pytest.raises(PreconditionError):
        cuc(plain_conjugation(2), 2 * np.eye(2))
    with pytest.raises(DimensionError):
        cuc(plain_conjugation(3), np.eye(2))


def test_plain_conjugation_gives_conjugate_matrix():
    U = haar_unitary(5, 4)
    assert np.array_equal(cuc(plain_conjugation(5), U).matrix, np.conj(U))


def test_adjoint_witness_examples():
    U = np.diag([1.0, -1.0, -1.0])
    assert max_norm(cuc(plain_conjugation(3), U).matrix - U) == 0
    U = haar_unitary(8, 4)
    C = adjoint_witness(U)
    assert max_norm(cuc(C, U).matrix - U.conj().T) <= 1e-8
    C = adjoint_witness(np.array([[1j]]))
    assert cuc(C, np.array([[1j]])).matrix[0, 0] == pytest.approx(-1j)


def test_adjoint_witness_repeated_spectrum():
    Q = haar_unitary(6, 9)
    U = Q @ np.diag(np.exp(1j * np.array([1, 1, 1, 2, 2, 3.0]))) @ Q.conj().T
    C = adjoint_witness(U)
    assert max_norm(cuc(C, U).matrix - U.conj().T) <= 1e-8


def test_self_in_orbit():
    assert self_in_orbit(np.diag([1.0, -1.0]))
    assert not self_in_orbit(np.array([[1j]]))
    assert self_in_orbit(np.diag(np.exp(1j * np.array([0.7, -0.7]))))
    assert not self_in_orbit(np.diag(np.exp(1j * np.array([0.7, -0.7, 0.7]))))


def test_same_member_examples():
    U = np.diag(np.exp(1j * np.array([0.1, 1.2, 2.9])))
    C1 = Conjugation(np.diag(np.exp(1j * np.array([0.3, 1.0, -2.0]))))
    C2 = Conjugation(np.diag(np.exp(1j * np.array([2.3, -1.0, 0.5]))))
    assert same_member(C1, C1, U)
    assert same_member(C1, C2, U)
    mixer = random_conjugation(3, 8)
    assert not same_member(C1, mixer, U)
    assert max_norm(cuc(C1, U).matrix - cuc(mixer, U).matrix) > 1e-3


def test_same_member_agrees_with_direct_comparison():
    rng = np.random.default_rng(3)
    agree = 0
    for k in range(200):
        n = int(rng.integers(1, 6))
        xi = np.exp(1j * rng.uniform(0, 2 * np.pi, n))
        if k % 3 == 0:
            xi[: n // 2] = xi[0]
        U = np.diag(xi)
        C1 = random_conjugation(n, 2 * k)
        C2 = Conjugation(np.diag(np.exp(1j * rng.uniform(0, 6, n)))) if k % 2 else random_conjugation(n, 2 * k + 1)
        direct = max_norm(cuc(C1, U).matrix - cuc(C2, U).matrix) <= 1e-8
        agree += same_member(C1, C2, U) == direct
    assert agree == 200


def test_initial_characterization_round_trip():
    for seed in range(5):
        U = haar_unitary(6, seed)
        C1 = random_conjugation(6, 100 + seed)
        C = adjoint_witness(U)
        W = compose_conjugations(C1, C)
        CWC = C.factor @ np.conj(W) @ np.conj(C.factor)
        assert max_norm(CWC - W.conj().T) <= 1e-8
        assert max_norm(W @ U.conj().T @ W.conj().T - cuc(C1, U).matrix) <= 1e-8


def test_members_share_spectrum():
    U = haar_unitary(12, 2)
    a = np.linalg.eigvals(cuc(random_conjugation(12, 1), U).matrix)
    b = np.linalg.eigvals(cuc(random_conjugation(12, 2), U).matrix)
    assert multiset_equal(a, b)


def test_member_in_c_real_basis_is_entrywise_conjugate():
    C, U = random_conjugation(7, 3), haar_unitary(7, 4)
    W = c_real_basis(C)
    V = cuc(C, U).matrix
    assert max_norm(W.conj().T @ V @ W - np.conj(W.conj().T @ U @ W)) <= 1e-8


def test_symmetrizable_already_symmetric():
    S = random_conjugation(5, 1).factor
    z = symmetrizable_by_phases(S)
    assert np.allclose(z.phases, 1)


def test_symmetrizable_cyclic_permutation_columns():
    a, b, c = np.exp(1j * np.array([0.3, 1.0, 2.0]))
    e = np.eye(3)
    Q = np.column_stack([a * e[:, 2], b * e[:, 0], c * e[:, 1]])
    assert symmetrizable_by_phases(Q) is None


@given(st.integers(1, 9), st.integers(0, 10 ** 6))
def test_symmetrizable_recovers_injected_phases(n, seed):
    S = random_conjugation(n, seed).factor
    w = np.exp(1j * np.random.default_rng(seed).uniform(0, 2 * np.pi, n))
    z = symmetrizable_by_phases(S * w)
    assert z is not None
    Qz = S * w * z.phases
    assert max_norm(Qz - Qz.T) <= 1e-8
    assert np.allclose(np.abs(z.phases), 1, atol=1e-12)


def test_symmetrizable_free_components_get_phase_one():
    D = np.diag(np.exp(1j * np.array([0.4, 2.0, -1.0])))
    z = symmetrizable_by_phases(D)
    assert np.array_equal(z.phases, np.ones(3))
    assert len(set(z.component_labels.tolist())) == 3


def test_symmetrizable_modulus_mismatch():
    assert symmetrizable_by_phases(haar_unitary(4, 5)) is None


def test_symmetrizable_requires_unitary():
    with pytest.raises(PreconditionError):
        symmetrizable_by_phases(np.ones((2, 2)))


def test_diag_in_orbit_diagonal_orderings():
    xi = np.exp(1j * np.array([0.2, 1.1, 2.5, 4.4]))
    U = np.diag(xi)
    assert diag_in_orbit(U, [1, 0, 2, 3], labels=xi)
    assert not diag_in_orbit(U, [1, 2, 0, 3], labels=xi)
    assert diag_in_orbit(np.array([[np.exp(0.4j)]]), [0])


def test_diag_in_orbit_q9_none():
    Q = q9_basis()
    xi = np.exp(1j * np.array([0.5, 2.0, 4.2]))
    U = Q @ np.diag(xi) @ Q.conj().T
    assert not any(diag_in_orbit(U, p, labels=xi) for p in permutations(range(3)))


def test_q9_with_printed_sign_is_not_unitary():
    Q = q9_basis()
    Q[1, 0] = -Q[1, 0]
    assert max_norm(Q.conj().T @ Q - np.eye(3)) > 0.1


def test_diag_in_orbit_default_order_by_angle():
    xi = np.exp(1j * np.array([0.2, 1.1, 2.5]))
    U = np.diag(xi[[2, 0, 1]])
    assert diag_in_orbit(U, [1, 0, 2])
    assert not diag_in_orbit(U, [1, 2, 0])


def test_diag_in_orbit_repeated_eigenvalue_unsupported():
    with pytest.raises(UnsupportedCaseError):
        diag_in_orbit(np.diag([1.0, 1.0, -1.0]), [0, 1, 2])


def test_diag_in_orbit_bad_ordering():
    with pytest.raises(PreconditionError):
        diag_in_orbit(np.diag(np.exp(1j * np.arange(3))), [0, 0, 1])


def test_diag_member_witness_realizes_target():
    xi = np.exp(1j * np.array([0.3, 1.4, 2.2, 5.0]))
    V = random_conjugation(4, 7).factor
    sigma = np.array([2, 0, 3, 1])
    U = sum(xi[sigma[j]] * np.outer(V[:, j], V[:, j].conj()) for j in range(4))
    C = diag_member_witness(U, sigma, labels=xi)
    assert max_norm(cuc(C, U).matrix - np.diag(np.conj(xi[sigma]))) <= 1e-8


def test_permutation_conjugation_generates_sigma_member():
    xi = np.exp(1j * np.array([0.3, 1.4, 2.2, 5.0, 3.3]))
    sigma = np.array([3, 1, 4, 0, 2])
    C = permutation_conjugation(sigma, np.exp(1j * np.arange(5)))
    V = cuc(C, np.diag(xi)).matrix
    assert max_norm(V - np.diag(np.conj(xi[sigma]))) <= 1e-12
    with pytest.raises(PreconditionError):
        permutation_conjugation([1, 2, 0])


def test_two_sigma_members_coincide_iff_composition_fixes_eigenvalues():
    rng = np.random.default_rng(0)
    xi = np.exp(1j * np.array([0.0, 0.0, 1.0, 1.0, 2.0, 3.0]))
    involutions = []
    for p in permutations(range(6)):
        p = np.array(p)
        if np.all(p[p] == np.arange(6)):
            involutions.append(p)
    for _ in range(60):
        s1 = involutions[rng.integers(len(involutions))]
        s2 = involutions[rng.integers(len(involutions))]
        V1 = cuc(permutation_conjugation(s1), np.diag(xi)).matrix
        V2 = cuc(permutation_conjugation(s2), np.diag(xi)).matrix
        predicted = np.allclose(xi[s1[s2]], xi)
        assert predicted == (max_norm(V1 - V2) <= 1e-12)
