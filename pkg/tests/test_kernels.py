import numpy as np
import pytest

from symkern.errors import DimensionMismatch
from symkern.kernels import (
    FAMILIES,
    KernelSpec,
    grad2_accumulate,
    kernel_eval,
    kernel_grad2,
    kernel_mixed2,
    mixed2_accumulate,
    mixed2_field,
    mixed2_self,
)


def fd_grad2(spec, x, y, h=1e-5):
    out = np.zeros_like(y, dtype=float)
    for b in range(y.size):
        e = np.zeros_like(y)
        e[b] = h
        out[b] = (kernel_eval(spec, x, y + e) - kernel_eval(spec, x, y - e)) / (2 * h)
    return out


def fd_mixed2(spec, x, y, a, b, h=1e-5):
    ea = np.zeros_like(x)
    eb = np.zeros_like(y)
    ea[a] = h
    eb[b] = h
    return (
        kernel_eval(spec, x + ea, y + eb)
        - kernel_eval(spec, x + ea, y - eb)
        - kernel_eval(spec, x - ea, y + eb)
        + kernel_eval(spec, x - ea, y - eb)
    ) / (4 * h * h)


def test_value_at_coincidence_is_one():
    for fam in FAMILIES:
        spec = KernelSpec(fam, 1.7)
        x = np.array([0.3, -1.2])
        assert kernel_eval(spec, x, x) == pytest.approx(1.0)


def test_imq_unit_distance():
    spec = KernelSpec("imq", 1.0)
    assert kernel_eval(spec, np.array([1.0]), np.array([0.0])) == pytest.approx(
        1 / np.sqrt(2), abs=1e-12
    )


def test_matern32_origin():
    spec = KernelSpec("matern32", 2.0)
    assert kernel_eval(spec, np.zeros(3), np.zeros(3)) == pytest.approx(1.0)


def test_grad2_zero_at_coincidence():
    for fam in FAMILIES:
        spec = KernelSpec(fam, 1.3)
        x = np.array([0.5, 2.0])
        assert np.allclose(kernel_grad2(spec, x, x), 0.0)


def test_grad2_gaussian_example():
    spec = KernelSpec("gaussian", 1.0)
    g = kernel_grad2(spec, np.array([1.0]), np.array([0.0]))
    assert g[0] == pytest.approx(2 * np.exp(-1.0), rel=1e-12)


def test_grad2_imq_example():
    spec = KernelSpec("imq", 1.0)
    g = kernel_grad2(spec, np.array([0.0, 0.0]), np.array([1.0, 0.0]))
    assert g[0] == pytest.approx(-(2.0 ** -1.5), rel=1e-12)
    assert g[1] == 0.0


def test_mixed2_coincident_values():
    assert kernel_mixed2(KernelSpec("gaussian", 1.0), np.zeros(2), np.zeros(2), 0, 0) \
        == pytest.approx(2.0)
    assert kernel_mixed2(KernelSpec("matern32", 3.0), np.zeros(2), np.zeros(2), 1, 1) \
        == pytest.approx(9.0)
    assert kernel_mixed2(KernelSpec("gaussian", 1.0), np.zeros(2), np.zeros(2), 0, 1) == 0.0


def test_mixed2_offdiagonal_orthogonal_displacement():
    spec = KernelSpec("gaussian", 1.0)
    val = kernel_mixed2(spec, np.array([1.0, 0.0]), np.array([0.0, 0.0]), 0, 1)
    assert val == pytest.approx(0.0, abs=1e-15)


def test_kernel_symmetry():
    rng = np.random.default_rng(2)
    for fam in FAMILIES:
        spec = KernelSpec(fam, 1.5)
        for _ in range(20):
            x, y = rng.standard_normal((2, 3))
            assert kernel_eval(spec, x, y) == kernel_eval(spec, y, x)
            a, b = rng.integers(0, 3, 2)
            lhs = kernel_mixed2(spec, x, y, int(a), int(b))
            rhs = kernel_mixed2(spec, y, x, int(b), int(a))
            assert lhs == pytest.approx(rhs, abs=1e-14)


@pytest.mark.parametrize("fam", FAMILIES)
def test_fd_consistency(fam):
    rng = np.random.default_rng(42)
    spec = KernelSpec(fam, 1.5)
    for _ in range(100):
        d = int(rng.integers(1, 5))
        x = rng.uniform(-2, 2, d)
        u = rng.standard_normal(d)
        r = rng.uniform(0.1, 5.0 / spec.epsilon)
        y = x + r * u / np.linalg.norm(u)
        g = kernel_grad2(spec, x, y)
        g_fd = fd_grad2(spec, x, y)
        assert np.linalg.norm(g - g_fd) <= 1e-6 * np.linalg.norm(g)
        a, b = int(rng.integers(0, d)), int(rng.integers(0, d))
        m = kernel_mixed2(spec, x, y, a, b)
        m_fd = fd_mixed2(spec, x, y, a, b)
        assert abs(m - m_fd) <= 1e-4 * max(abs(m), mixed2_self(spec))


def test_matern32_near_coincident_limit():
    for eps in (0.5, 1.0, 3.0):
        spec = KernelSpec("matern32", eps)
        x = np.zeros(2)
        y = np.array([1e-8, 0.0])
        for a in range(2):
            for b in range(2):
                limit = eps**2 if a == b else 0.0
                got = kernel_mixed2(spec, x, y, a, b)
                assert abs(got - limit) <= 1e-6 * eps**2


def test_plain_gramian_positive_semidefinite():
    rng = np.random.default_rng(9)
    pts = rng.uniform(-3, 3, (20, 4))
    for fam in FAMILIES:
        spec = KernelSpec(fam, 1.0)
        K = np.array([[kernel_eval(spec, a, b) for b in pts] for a in pts])
        assert np.min(np.linalg.eigvalsh(K)) > -1e-10


def test_mixed2_field_matches_scalar():
    rng = np.random.default_rng(4)
    X = rng.uniform(-2, 2, (15, 3))
    X[3] = X[7]                     # force a coincident pair
    for fam in FAMILIES:
        spec = KernelSpec(fam, 2.0)
        F = mixed2_field(spec, X, X[7], 1)
        for i in range(X.shape[0]):
            for b in range(3):
                assert F[i, b] == pytest.approx(
                    kernel_mixed2(spec, X[i], X[7], b, 1), abs=1e-14
                )


def test_accumulators_match_scalar_sums():
    rng = np.random.default_rng(6)
    centers = rng.uniform(-1, 1, (8, 2))
    alphas = rng.integers(0, 2, 8)
    coeffs = rng.standard_normal(8)
    X = rng.uniform(-1, 1, (10, 2))
    X[0] = centers[2]
    for fam in FAMILIES:
        spec = KernelSpec(fam, 1.2)
        vals = grad2_accumulate(spec, X, centers, alphas, coeffs)
        grads = mixed2_accumulate(spec, X, centers, alphas, coeffs)
        for i, x in enumerate(X):
            v = sum(c * kernel_grad2(spec, x, ctr)[a]
                    for c, ctr, a in zip(coeffs, centers, alphas))
            assert vals[i] == pytest.approx(v, abs=1e-12)
            for b in range(2):
                g = sum(c * kernel_mixed2(spec, x, ctr, b, int(a))
                        for c, ctr, a in zip(coeffs, centers, alphas))
                assert grads[i, b] == pytest.approx(g, abs=1e-12)


def test_dimension_mismatch():
    spec = KernelSpec("gaussian", 1.0)
    with pytest.raises(DimensionMismatch):
        kernel_eval(spec, np.zeros(2), np.zeros(3))


def test_bad_spec_rejected():
    with pytest.raises(ValueError):
        KernelSpec("cubic", 1.0)
    with pytest.raises(ValueError):
        KernelSpec("gaussian", -1.0)
