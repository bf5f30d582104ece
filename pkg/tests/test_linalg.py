"""Rank detection, Takagi factorization, and the two proximal operators.

svt and complex_soft_threshold are checked against closed forms on diagonal
or scalar inputs (where the prox is elementary) and against their defining
identities at the extreme thresholds.
"""

import numpy as np
import pytest

from mrank.linalg import (
    DEFAULT_RANK_TOL,
    complex_l1,
    complex_soft_threshold,
    nuclear_norm,
    numerical_rank,
    spectral_norm,
    svd,
    svt,
    takagi,
)


def crandn(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def rand_symmetric(rng, n):
    a = crandn(rng, (n, n))
    return (a + a.T) / 2


# ------------------------------------------------------------------- ranks


def test_numerical_rank_constructed_spectrum():
    u = np.linalg.qr(np.random.default_rng(0).standard_normal((6, 6)))[0]
    s = np.array([10.0, 1.0, 1e-4, 1e-9, 0.0, 0.0])
    m = (u * s) @ u.T
    assert numerical_rank(m, 1e-8) == 3  # strict: 1e-9/10 < 1e-8 < 1e-4/10
    assert numerical_rank(m, 1e-5) == 2
    assert numerical_rank(m, 1e-12) == 4
    assert numerical_rank(np.zeros((4, 7))) == 0


def test_norms_against_numpy():
    rng = np.random.default_rng(1)
    m = crandn(rng, (5, 8))
    s = np.linalg.svd(m, compute_uv=False)
    assert np.isclose(nuclear_norm(m), s.sum())
    assert np.isclose(spectral_norm(m), s[0])
    assert np.isclose(complex_l1(m), np.abs(m).sum())


def test_svd_reconstruct():
    rng = np.random.default_rng(2)
    m = crandn(rng, (6, 4))
    res = svd(m)
    assert np.allclose(res.reconstruct(), m, atol=1e-12)


# --------------------------------------------------------------------- svt


def test_svt_diagonal_closed_form():
    m = np.diag([5.0, 3.0, 1.0, 0.5])
    out = svt(m, 1.0)
    assert np.allclose(out, np.diag([4.0, 2.0, 0.0, 0.0]), atol=1e-12)


def test_svt_threshold_extremes():
    rng = np.random.default_rng(3)
    for _ in range(20):
        m = crandn(rng, (6, 5))
        assert np.allclose(svt(m, 0.0), m, atol=1e-12)
        assert np.allclose(svt(m, spectral_norm(m) + 1e-9), 0.0)


def test_svt_unitary_invariance():
    # prox of a unitarily invariant function commutes with unitaries
    rng = np.random.default_rng(4)
    m = crandn(rng, (5, 5))
    q = np.linalg.qr(crandn(rng, (5, 5)))[0]
    assert np.allclose(q @ svt(m, 0.7), svt(q @ m, 0.7), atol=1e-10)


def test_svt_prox_optimality():
    # svt(m, tau) minimizes tau*||x||_* + 0.5*||x - m||_F^2: no random
    # perturbation may beat it
    rng = np.random.default_rng(5)
    m = crandn(rng, (5, 4))
    tau = 0.9
    x = svt(m, tau)
    obj = tau * nuclear_norm(x) + 0.5 * np.linalg.norm(x - m) ** 2
    for _ in range(50):
        y = x + 0.1 * crandn(rng, x.shape)
        obj_y = tau * nuclear_norm(y) + 0.5 * np.linalg.norm(y - m) ** 2
        assert obj <= obj_y + 1e-12


# ------------------------------------------------------------ soft threshold


def test_complex_soft_threshold_scalar_oracle():
    z = np.array([[3.0 + 4.0j]])  # modulus 5
    out = complex_soft_threshold(z, 2.0)
    # shrink modulus to 3, keep phase
    assert np.allclose(out, z * 3.0 / 5.0, atol=1e-14)
    assert complex_soft_threshold(z, 5.0)[0, 0] == 0.0
    assert complex_soft_threshold(z, 7.0)[0, 0] == 0.0


def test_complex_soft_threshold_properties():
    rng = np.random.default_rng(6)
    z = crandn(rng, (7, 7))
    tau = 0.8
    out = complex_soft_threshold(z, tau)
    mod = np.abs(z)
    # phases preserved where nonzero, moduli shrunk by exactly tau
    nz = mod > tau
    assert np.allclose(np.abs(out[nz]), mod[nz] - tau, atol=1e-12)
    assert np.allclose(out[~nz], 0.0)
    assert np.allclose(np.angle(out[nz]), np.angle(z[nz]), atol=1e-12)
    assert np.array_equal(complex_soft_threshold(z, 0.0), z)


def test_complex_soft_threshold_prox_optimality():
    rng = np.random.default_rng(7)
    z = crandn(rng, (4, 4))
    tau = 0.6
    x = complex_soft_threshold(z, tau)
    obj = tau * complex_l1(x) + 0.5 * np.linalg.norm(x - z) ** 2
    for _ in range(50):
        y = x + 0.1 * crandn(rng, x.shape)
        obj_y = tau * complex_l1(y) + 0.5 * np.linalg.norm(y - z) ** 2
        assert obj <= obj_y + 1e-12


# ------------------------------------------------------------------- takagi


def test_takagi_reconstruction_random():
    rng = np.random.default_rng(8)
    for trial in range(100):
        n = int(rng.integers(1, 9))
        m = rand_symmetric(rng, n)
        res = takagi(m)
        assert np.linalg.norm(res.reconstruct() - m) <= 1e-9 * max(
            1.0, np.linalg.norm(m)
        )
        # W unitary, s nonincreasing and real
        assert np.allclose(res.w.conj().T @ res.w, np.eye(n), atol=1e-10)
        assert np.all(np.diff(res.s) <= 1e-12)
        assert np.all(res.s >= -1e-15)


def test_takagi_degenerate_spectrum():
    # repeated singular values force the block square-root path
    rng = np.random.default_rng(9)
    q = np.linalg.qr(crandn(rng, (5, 5)))[0]
    m = q @ np.diag([2.0, 2.0, 2.0, 1.0, 1.0]) @ q.T
    res = takagi(m)
    assert np.linalg.norm(res.reconstruct() - m) <= 1e-10 * np.linalg.norm(m)
    assert np.allclose(res.s, [2, 2, 2, 1, 1], atol=1e-10)


def test_takagi_rank_one_gives_symmetric_dyad():
    rng = np.random.default_rng(10)
    v = crandn(rng, 6)
    m = np.outer(v, v)
    res = takagi(m)
    assert res.s[0] > 0 and np.all(res.s[1:] <= 1e-10 * res.s[0])
    w = np.sqrt(res.s[0]) * res.w[:, 0]
    assert np.linalg.norm(np.outer(w, w) - m) <= 1e-10 * np.linalg.norm(m)


def test_takagi_input_validation():
    with pytest.raises(ValueError):
        takagi(np.zeros((3, 4)))
    rng = np.random.default_rng(11)
    with pytest.raises(ValueError):
        takagi(crandn(rng, (4, 4)))  # not symmetric


def test_default_rank_tol_value():
    assert DEFAULT_RANK_TOL == 1e-8
