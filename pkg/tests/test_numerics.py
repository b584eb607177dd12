import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bottlenecklab import numerics
from bottlenecklab.errors import EmptyInput, NonSquare, NotHermitian

from conftest import random_density, random_projector, random_unitary


def test_trace_norm_diag():
    M = np.diag([3.0, -4.0, 0.0]).astype(complex)
    assert numerics.trace_norm(M) == pytest.approx(7.0, abs=1e-10)


def test_trace_norm_jordan_block():
    # singular values of [[0,1],[0,0]] are {1, 0}
    M = np.array([[0, 1], [0, 0]], dtype=complex)
    assert numerics.trace_norm(M) == pytest.approx(1.0, abs=1e-10)
    assert numerics.operator_norm(M) == pytest.approx(1.0, abs=1e-10)


def test_trace_norm_rejects_nonsquare():
    with pytest.raises(NonSquare):
        numerics.trace_norm(np.zeros((2, 3)))


def test_unitary_invariance(rng):
    M = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    U = random_unitary(rng, 6)
    W = random_unitary(rng, 6)
    assert numerics.trace_norm(U @ M @ W) == pytest.approx(
        numerics.trace_norm(M), abs=1e-8
    )
    assert numerics.operator_norm(U @ M @ W) == pytest.approx(
        numerics.operator_norm(M), abs=1e-8
    )


def test_projector_contracts_trace_norm(rng):
    # ||P O||_1 <= ||O||_1 for projectors P, the workhorse inequality
    for _ in range(25):
        dim = int(rng.integers(2, 9))
        O = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        P = random_projector(rng, dim, int(rng.integers(1, dim)))
        assert numerics.trace_norm(P @ O) <= numerics.trace_norm(O) + 1e-10


def test_hermitian_path_matches_svd(rng):
    H = rng.normal(size=(8, 8))
    H = (H + H.T) / 2 + 0j
    direct = np.linalg.svd(H, compute_uv=False).sum()
    assert numerics.trace_norm(H) == pytest.approx(direct, abs=1e-9)


def test_orthonormal_column_basis_rank_cutoff(rng):
    v = np.array([1.0, 0.0, 0.0], dtype=complex)
    w = np.array([0.0, 1.0, 0.0], dtype=complex)
    # third vector is a near-duplicate, rank must stay 2
    basis = numerics.orthonormal_column_basis([v, w, v + 1e-12 * w])
    assert basis.shape == (3, 2)
    gram = basis.conj().T @ basis
    assert np.abs(gram - np.eye(2)).max() < 1e-10


def test_orthonormal_column_basis_empty_input():
    with pytest.raises(EmptyInput):
        numerics.orthonormal_column_basis([])


def test_orthonormal_column_basis_zero_vectors():
    out = numerics.orthonormal_column_basis([np.zeros(4, dtype=complex)])
    assert out.shape == (4, 0)


def test_orthonormalization_idempotent(rng):
    A = rng.normal(size=(8, 3)) + 1j * rng.normal(size=(8, 3))
    B1 = numerics.orthonormal_column_basis(A)
    B2 = numerics.orthonormal_column_basis(B1)
    assert np.allclose(B1 @ B1.conj().T, B2 @ B2.conj().T, atol=1e-10)


def test_hermitian_eigensystem_pauli_x():
    X = np.array([[0, 1], [1, 0]], dtype=complex)
    w, V = numerics.hermitian_eigensystem(X)
    assert np.allclose(w, [-1.0, 1.0], atol=1e-12)
    recon = V @ np.diag(w) @ V.conj().T
    assert np.abs(recon - X).max() < 1e-8


def test_hermitian_eigensystem_rejects_nonhermitian():
    M = np.array([[0, 1], [0, 0]], dtype=complex)
    with pytest.raises(NotHermitian):
        numerics.hermitian_eigensystem(M)


def test_eigensystem_phase_fixing_deterministic(rng):
    H = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    H = H + H.conj().T
    w1, V1 = numerics.hermitian_eigensystem(H)
    w2, V2 = numerics.hermitian_eigensystem(H.copy())
    assert np.array_equal(V1, V2)
    # first significant entry of each column is real positive
    for j in range(6):
        col = V1[:, j]
        lead = col[np.flatnonzero(np.abs(col) > 1e-12)[0]]
        assert abs(lead.imag) < 1e-12 and lead.real > 0


def test_eigensystem_reconstruction_scale(rng):
    H = 1e6 * (rng.normal(size=(10, 10)) + 1j * rng.normal(size=(10, 10)))
    H = H + H.conj().T
    w, V = numerics.hermitian_eigensystem(H)
    resid = np.abs(V @ np.diag(w) @ V.conj().T - H).max()
    assert resid <= 1e-8 * numerics.operator_norm(H)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 10), st.integers(0, 2**31 - 1))
def test_trace_norm_triangle(dim, seed):
    r = np.random.default_rng(seed)
    A = r.normal(size=(dim, dim)) + 1j * r.normal(size=(dim, dim))
    B = r.normal(size=(dim, dim)) + 1j * r.normal(size=(dim, dim))
    assert numerics.trace_norm(A + B) <= (
        numerics.trace_norm(A) + numerics.trace_norm(B) + 1e-9
    )


def test_density_matrix_validation(rng):
    rho = random_density(rng, 8)
    dm = numerics.DensityMatrix(rho)
    assert dm.n == 3
    assert dm.validate() >= -1e-10
    with pytest.raises(NotHermitian):
        bad = rho.copy()
        bad[0, 1] += 1e-3
        numerics.DensityMatrix(bad)
    with pytest.raises(ValueError):
        numerics.DensityMatrix(rho * 2.0)


def test_maximally_mixed_and_pure():
    mm = numerics.maximally_mixed(2)
    assert mm.mat.trace() == pytest.approx(1.0)
    psi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    dm = numerics.pure_state_density(psi)
    assert numerics.trace_norm(dm.mat @ dm.mat - dm.mat) < 1e-12
