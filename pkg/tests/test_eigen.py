import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from liftgeo.eigen import charpoly, eigenvalues, hessenberg, sort_spectrum
from liftgeo.errors import NonConvergence


def _match(a, b):
    """Greedy multiset distance between two eigenvalue lists."""
    b = list(b)
    worst = 0.0
    for z in a:
        k = int(np.argmin([abs(z - w) for w in b]))
        worst = max(worst, abs(z - b.pop(k)))
    return worst


def test_diagonal():
    np.testing.assert_allclose(sort_spectrum(eigenvalues(np.diag([3.0, 1.0, 2.0]))), [1, 2, 3], atol=1e-14)


def test_rotation_by_quarter_turn():
    lam = sort_spectrum(eigenvalues(np.array([[0.0, -1.0], [1.0, 0.0]])))
    np.testing.assert_allclose(lam, [-1j, 1j], atol=1e-14)


def test_zero_matrix_spectrum():
    np.testing.assert_array_equal(eigenvalues(np.zeros((4, 4))), np.zeros(4))


def test_random_6x6_against_characteristic_polynomial():
    m = np.random.default_rng(42).standard_normal((6, 6))
    assert _match(eigenvalues(m), np.roots(charpoly(m))) < 1e-7


def test_charpoly_oracle_itself():
    np.testing.assert_allclose(charpoly(np.diag([1.0, 2.0, 3.0])), [1, -6, 11, -6])


def test_hessenberg_is_similarity():
    m = np.random.default_rng(1).standard_normal((5, 5))
    H, Q = hessenberg(m)
    np.testing.assert_allclose(Q @ H @ Q.conj().T, m, atol=1e-12)
    assert np.abs(np.tril(H, -2)).max() == 0.0


def test_eigenvector_residuals():
    m = np.random.default_rng(3).standard_normal((6, 6))
    lam, V = eigenvalues(m, vectors=True)
    for j in range(6):
        assert np.linalg.norm(m @ V[:, j] - lam[j] * V[:, j]) <= 1e-8 * np.linalg.norm(m, 2)


def test_defective_jordan_block():
    m = np.array([[2.0, 1.0, 0.0], [0.0, 2.0, 1.0], [0.0, 0.0, 2.0]])
    assert np.abs(eigenvalues(m) - 2.0).max() < 1e-5


def test_iteration_cap_raises():
    with pytest.raises(NonConvergence):
        eigenvalues(np.array([[0.0, -1.0], [1.0, 0.0]]), max_iter=0)


def test_bad_input():
    with pytest.raises(ValueError):
        eigenvalues(np.ones((2, 3)))
    with pytest.raises(ValueError):
        eigenvalues(np.array([[np.nan]]))


def test_sort_is_lexicographic():
    lam = sort_spectrum(np.array([1 + 1j, -1 + 0j, 1 - 1j, 0j]))
    np.testing.assert_array_equal(lam, [-1, 0, 1 - 1j, 1 + 1j])


@given(arrays(np.float64, st.tuples(st.integers(1, 7)).map(lambda t: (t[0], t[0])),
              elements=st.floats(-5, 5, allow_nan=False)))
def test_matches_polynomial_oracle_and_trace(m):
    lam = eigenvalues(m)
    scale = max(1.0, np.abs(m).max())
    assert abs(lam.sum() - np.trace(m)) <= 1e-9 * scale * len(m)
    roots = np.roots(charpoly(m)) if len(m) > 0 else []
    # polynomial roots are only well conditioned for simple eigenvalues; compare through the polynomial instead
    resid = np.abs(np.polyval(charpoly(m), lam))
    assert resid.max() <= 1e-6 * scale ** len(m) * len(m)
    assert len(roots) == len(lam)
