import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from neurochan import ChannelSet, ctrb_rank, eigenvalues, gramian, hurwitz_margin, mat_exp, nullspace
from neurochan.errors import DimensionError, DomainError
from neurochan.numerics import is_nonsingular, smallest_singular_value


# --- independent oracles ------------------------------------------------------

def taylor_expm(M, t, terms=30):
    """Term-by-term Taylor summation of exp(M t)."""
    Mt = np.asarray(M, dtype=float) * t
    out = np.eye(Mt.shape[0])
    term = np.eye(Mt.shape[0])
    for k in range(1, terms + 1):
        term = term @ Mt / k
        out = out + term
    return out


def simpson_gramian(A, B, P, T, panels=10_000):
    """Composite-Simpson quadrature of the Gramian integrand."""
    import scipy.linalg

    A = np.asarray(A, dtype=float)
    Q = B @ P @ B.T

    def integrand(s):
        E = scipy.linalg.expm(A * (T - s))
        return E @ Q @ E.T

    h = T / panels
    total = integrand(0.0) + integrand(T)
    for i in range(1, panels):
        total += (4 if i % 2 else 2) * integrand(i * h)
    return total * h / 3.0


# --- matrix exponential -------------------------------------------------------

def test_mat_exp_of_zero_is_identity():
    assert np.allclose(mat_exp(np.zeros((2, 2)), 1.0), np.eye(2), atol=1e-14)


def test_mat_exp_nilpotent_shift_block():
    h = 0.37
    out = mat_exp([[0.0, 1.0], [0.0, 0.0]], h)
    assert np.allclose(out, [[1.0, h], [0.0, 1.0]], atol=1e-14)


def test_mat_exp_matches_taylor_oracle():
    rng = np.random.default_rng(11)
    for _ in range(5):
        M = rng.uniform(-1.0, 1.0, (3, 3))
        assert np.allclose(mat_exp(M, 0.7), taylor_expm(M, 0.7), atol=1e-9)


def test_mat_exp_rejects_non_square():
    with pytest.raises(DimensionError):
        mat_exp(np.zeros((2, 3)), 1.0)


@settings(max_examples=60, deadline=None)
@given(
    entries=st.lists(st.floats(-1.0, 1.0), min_size=4, max_size=4),
    s=st.floats(0.0, 1.0),
    t=st.floats(0.0, 1.0),
)
def test_mat_exp_semigroup_property(entries, s, t):
    M = np.array(entries).reshape(2, 2)
    lhs = mat_exp(M, s) @ mat_exp(M, t)
    assert np.allclose(lhs, mat_exp(M, s + t), atol=1e-9)


# --- eigenvalues and Hurwitz margins -------------------------------------------

def test_eigenvalues_double_root():
    spec = eigenvalues([[0.0, 1.0], [-1.0, -2.0]])
    assert np.allclose(spec.eigenvalues, [-1.0, -1.0], atol=1e-9)
    assert spec.max_real_part == pytest.approx(-1.0, abs=1e-9)


def test_eigenvalues_diagonal():
    spec = eigenvalues(np.diag([-2.0, -6.0]))
    assert np.allclose(np.sort(spec.eigenvalues.real), [-6.0, -2.0], atol=1e-12)


def test_eigenvalues_companion_of_quadratic():
    # companion of s^2 + 3 s + 2 = (s + 1)(s + 2)
    spec = eigenvalues([[0.0, 1.0], [-2.0, -3.0]])
    assert np.allclose(np.sort(spec.eigenvalues.real), [-2.0, -1.0], atol=1e-10)


def test_eigenvalue_residuals_random():
    rng = np.random.default_rng(3)
    for n in (2, 4, 6):
        M = rng.uniform(-1.0, 1.0, (n, n))
        norm = np.linalg.norm(M, 2)
        for lam in eigenvalues(M).eigenvalues:
            shifted = M - lam * np.eye(n)
            assert abs(np.linalg.det(shifted)) < 1e-7 * (1.0 + norm) ** n
            sv = np.linalg.svd(shifted, compute_uv=False)
            assert sv[-1] < 1e-6 * (1.0 + norm)


def test_hurwitz_margin_symmetric_example():
    # eigenvalues of -2 [[2,1],[1,2]] are -2 and -6
    assert hurwitz_margin([[-4.0, -2.0], [-2.0, -4.0]]) == pytest.approx(-2.0, abs=1e-10)


def test_hurwitz_margin_double_integrator_is_zero():
    assert hurwitz_margin([[0.0, 1.0], [0.0, 0.0]]) == pytest.approx(0.0, abs=1e-12)


def test_hurwitz_margin_second_gain_set(three_channel_plant):
    K = np.array([[-2.0, -3.0], [-1.0, -2.4], [0.0, -0.5]])
    margin = hurwitz_margin(three_channel_plant.A + three_channel_plant.B @ K)
    assert margin > 0
    assert margin == pytest.approx(0.066, abs=0.01)


# --- Gramians -------------------------------------------------------------------

def test_gramian_drift_free_identity_inputs():
    W = gramian(np.zeros((2, 2)), np.eye(2), ChannelSet.full(2), 1.0)
    assert np.allclose(W, np.eye(2), atol=1e-12)


def test_gramian_singular_for_dead_channel(three_channel_plant):
    W = gramian(three_channel_plant.A, three_channel_plant.B, ChannelSet(3, (2,)), 1.0)
    assert abs(np.linalg.det(W)) < 1e-12
    assert not is_nonsingular(W)


def test_gramian_nonsingular_for_live_channel(three_channel_plant):
    W = gramian(three_channel_plant.A, three_channel_plant.B, ChannelSet(3, (1,)), 1.0)
    assert is_nonsingular(W)


def test_gramian_rejects_nonpositive_horizon():
    with pytest.raises(DomainError):
        gramian(np.zeros((2, 2)), np.eye(2), ChannelSet.full(2), 0.0)


def test_gramian_matches_simpson_quadrature():
    rng = np.random.default_rng(5)
    for _ in range(2):
        A = rng.uniform(-1.0, 1.0, (3, 3))
        B = rng.uniform(-1.0, 1.0, (3, 5))
        channels = ChannelSet(5, (1, 3, 4))
        P = channels.projection()
        W = gramian(A, B, channels, 1.0)
        assert np.allclose(W, simpson_gramian(A, B, P, 1.0), atol=1e-7)


def test_gramian_nonsingularity_matches_ctrb_rank():
    # oracle equivalence over the exhaustive lattice of small random systems
    from neurochan import enumerate_subsets

    rng = np.random.default_rng(17)
    for n, m in ((2, 4), (3, 5)):
        A = rng.uniform(-1.0, 1.0, (n, n))
        B = rng.uniform(-1.0, 1.0, (n, m))
        for channels in enumerate_subsets(m):
            P = channels.projection()
            by_rank = ctrb_rank(A, B @ P) == n
            by_gramian = is_nonsingular(gramian(A, B, channels, 1.0))
            assert by_rank == by_gramian, channels.label()


# --- rank and nullspace ----------------------------------------------------------

def test_ctrb_rank_three_channel_system(three_channel_plant):
    assert ctrb_rank(three_channel_plant.A, three_channel_plant.B) == 2


def test_ctrb_rank_zero_column():
    assert ctrb_rank(np.zeros((2, 2)), np.zeros((2, 1))) == 0


def test_ctrb_rank_single_channel(three_channel_plant):
    # [b, Ab] = [(1,0), (0,0)] for the middle column
    b = three_channel_plant.B[:, [1]]
    assert ctrb_rank(three_channel_plant.A, b) == 1


def test_nullspace_of_wide_input_matrix(three_channel_plant):
    basis = nullspace(three_channel_plant.B)
    assert len(basis) == 1
    expected = np.array([1.0, 1.0, -1.0]) / math.sqrt(3.0)
    assert abs(abs(basis[0] @ expected) - 1.0) < 1e-12


def test_nullspace_of_identity_is_empty():
    assert nullspace(np.eye(3)) == []


def test_nullspace_of_zero_matrix_is_full():
    basis = nullspace(np.zeros((2, 3)))
    assert len(basis) == 3
    G = np.array([[u @ v for v in basis] for u in basis])
    assert np.allclose(G, np.eye(3), atol=1e-12)


def test_smallest_singular_value_of_zero():
    assert smallest_singular_value(np.zeros((2, 2))) == 0.0
