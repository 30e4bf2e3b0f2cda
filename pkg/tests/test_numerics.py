import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from probtele import numerics as nx
from probtele.errors import ConvergenceError, DimensionError, SingularError
from probtele.eta_search import UnitaryParams


def naive_matmul(a, b):
    rows, inner, cols = len(a), len(b), len(b[0])
    out = [[0j] * cols for _ in range(rows)]
    for i in range(rows):
        for j in range(cols):
            for k in range(inner):
                out[i][j] += a[i][k] * b[k][j]
    return np.array(out)


def rand_complex(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


complex_square = st.integers(2, 4).flatmap(
    lambda n: st.tuples(
        arrays(np.float64, (n, n), elements=st.floats(-1, 1, allow_nan=False)),
        arrays(np.float64, (n, n), elements=st.floats(-1, 1, allow_nan=False)),
    ).map(lambda ab: ab[0] + 1j * ab[1])
)


class TestMatmul:
    def test_identity(self, rng):
        m = rand_complex(rng, 2, 2)
        np.testing.assert_array_equal(nx.matmul(np.eye(2), m), m)

    def test_diagonal(self):
        d = np.diag([0.6, 0.8])
        np.testing.assert_allclose(nx.matmul(d, d), np.diag([0.36, 0.64]), atol=1e-15)

    @pytest.mark.parametrize("shape", [(2, 2, 2), (3, 4, 2)])
    def test_against_triple_loop(self, rng, shape):
        a = rand_complex(rng, shape[0], shape[1])
        b = rand_complex(rng, shape[1], shape[2])
        np.testing.assert_allclose(nx.matmul(a, b), naive_matmul(a.tolist(), b.tolist()), atol=1e-13)

    def test_mismatch(self):
        with pytest.raises(DimensionError):
            nx.matmul(np.eye(2), np.eye(3))


def test_adjoint_examples(rng):
    np.testing.assert_array_equal(nx.adjoint(np.eye(3)), np.eye(3))
    np.testing.assert_array_equal(nx.adjoint(np.array([[0, 1j], [0, 0]])), np.array([[0, 0], [-1j, 0]]))
    m = rand_complex(rng, 3, 2)
    np.testing.assert_array_equal(nx.adjoint(nx.adjoint(m)), m)


class TestTrace:
    def test_identity(self):
        assert nx.trace(np.eye(4)) == 4

    def test_inverse_diag(self):
        # 1/0.36 + 1/0.64 = 2.7777... + 1.5625
        assert nx.trace(np.diag([1 / 0.36, 1 / 0.64])).real == pytest.approx(4.3402777777777777, abs=1e-13)

    def test_cyclic(self, rng):
        a, b = rand_complex(rng, 3, 3), rand_complex(rng, 3, 3)
        assert abs(nx.trace(a @ b) - nx.trace(b @ a)) < 1e-12

    def test_non_square(self):
        with pytest.raises(DimensionError):
            nx.trace(np.ones((2, 3)))


class TestInverse:
    def test_examples(self):
        np.testing.assert_allclose(nx.inverse(np.eye(2)), np.eye(2))
        np.testing.assert_allclose(nx.inverse(np.diag([0.6, 0.8])), np.diag([1 / 0.6, 1 / 0.8]), atol=1e-15)

    def test_random_residual(self, rng):
        a = rand_complex(rng, 4, 4) + 4 * np.eye(4)
        assert nx.max_abs(a @ nx.inverse(a) - np.eye(4)) <= 1e-9

    def test_singular(self):
        with pytest.raises(SingularError):
            nx.inverse(np.diag([1.0, 0.0]))
        with pytest.raises(SingularError):
            nx.inverse(np.array([[1.0, 2.0], [2.0, 4.0]]))


class TestSvd:
    def test_diagonal(self):
        res = nx.svd(np.diag([0.8, 0.6]))
        np.testing.assert_allclose(res.singular_values, [0.8, 0.6])
        np.testing.assert_allclose(res.left, np.eye(2), atol=1e-15)

    def test_worked_channel(self):
        # QQ^dagger has eigenvalues 0.64 and 0.36
        res = nx.svd(np.array([[-0.1, -0.7], [0.7, 0.1]]))
        np.testing.assert_allclose(res.singular_values, [0.8, 0.6], atol=1e-14)

    def test_random_reconstruction(self, rng):
        a = rand_complex(rng, 2, 2)
        res = nx.svd(a)
        assert nx.max_abs(res.reconstruct() - a) < 1e-10
        assert nx.max_abs(nx.adjoint(res.left) @ a @ res.right - np.diag(res.singular_values)) <= 1e-9

    def test_phase_convention_is_deterministic(self, rng):
        a = rand_complex(rng, 3, 3)
        r1, r2 = nx.svd(a), nx.svd(a.copy())
        np.testing.assert_array_equal(r1.left, r2.left)
        for k in range(3):
            col = r1.left[:, k]
            big = col[np.argmax(np.abs(col))]
            assert abs(big.imag) < 1e-15 and big.real > 0

    def test_non_convergence_is_reported(self, monkeypatch):
        def boom(*args, **kwargs):
            raise np.linalg.LinAlgError("SVD did not converge")

        monkeypatch.setattr(np.linalg, "svd", boom)
        with pytest.raises(ConvergenceError):
            nx.svd(np.eye(2))


class TestKron:
    def test_identity(self):
        np.testing.assert_array_equal(nx.kron(np.eye(2), np.eye(2)), np.eye(4))

    def test_diag(self):
        np.testing.assert_array_equal(nx.kron(np.diag([2.0, 3.0]), np.eye(2)), np.diag([2.0, 2.0, 3.0, 3.0]))

    def test_mixed_product(self, rng):
        a, b, c, d = (rand_complex(rng, 2, 2) for _ in range(4))
        lhs = nx.kron(a, b) @ nx.kron(c, d)
        assert nx.max_abs(lhs - nx.kron(a @ c, b @ d)) < 1e-12


class TestIsUnitary:
    def test_examples(self):
        assert nx.is_unitary(np.eye(2), 1e-9)
        assert not nx.is_unitary(np.diag([0.6, 0.8]), 1e-9)

    def test_parametrized_unitary(self, rng):
        for _ in range(20):
            params = UnitaryParams(*rng.uniform(0, 2 * math.pi, 4))
            assert nx.is_unitary(params.matrix(), 1e-9)

    def test_non_square(self):
        assert not nx.is_unitary(np.ones((2, 3)))


def test_equal_up_to_phase(rng):
    u = nx.random_unitary(3, rng)
    assert nx.equal_up_to_phase(np.exp(0.7j) * u, u)
    assert not nx.equal_up_to_phase(u @ np.diag([1, 1, -1]), u)


@given(complex_square)
@settings(max_examples=60, deadline=None)
def test_trace_of_gram_is_frobenius(a):
    assert abs(nx.trace(nx.adjoint(a) @ a) - np.sum(np.abs(a) ** 2)) <= 1e-12


@given(complex_square)
@settings(max_examples=60, deadline=None)
def test_svd_invariants(a):
    res = nx.svd(a)
    assert nx.is_unitary(res.left, 1e-9) and nx.is_unitary(res.right, 1e-9)
    assert nx.max_abs(nx.adjoint(res.left) @ a @ res.right - np.diag(res.singular_values)) <= 1e-9
    assert np.all(np.diff(res.singular_values) <= 0)
    assert np.all(res.singular_values >= 0)


@given(complex_square)
@settings(max_examples=60, deadline=None)
def test_inverse_residual_when_well_conditioned(a):
    if np.linalg.cond(a) >= 1e6:
        return
    assert nx.max_abs(a @ nx.inverse(a) - np.eye(a.shape[0])) <= 1e-9
