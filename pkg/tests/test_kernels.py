import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from kernelforge import domains as D
from kernelforge import kernels as K
from kernelforge.domains import DomainError

from test_domains import random_interior


def test_chi_examples():
    assert K.chi_polynomial(D.TypeI(1, 1)).factored.pretty() == "(s+1)_1"
    assert K.chi_polynomial(D.TypeV()).factored.pretty() == "(s+1)_8 (s+4)_8"
    assert K.chi_polynomial(D.TypeVI()).degree == 27
    iv3 = K.chi_polynomial(D.TypeIV(3)).expanded
    assert iv3.coeffs == (3, Fraction(13, 2), Fraction(9, 2), 1)


def test_generic_factors_type_iv():
    # r = 2, a = n - 2, b = 0: (s+1)_{n-1} (s + n/2)_1
    f = K.chi_generic_factors(D.TypeIV(5))
    assert f.factors == ((1, 4), (Fraction(5, 2), 1))


def test_hua_ratio_exact_values():
    assert K.hua_ratio(D.TypeI(1, 1), 1) == Fraction(1, 2)
    assert K.hua_ratio(D.TypeI(1, 2), 1) == Fraction(1, 3)
    assert K.hua_ratio(D.TypeI(1, 1), "1/2") == Fraction(2, 3)
    assert isinstance(K.hua_ratio(D.TypeI(2, 2), 0.5), float)


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("s", [0.5, 1.0, 2.5])
def test_hua_ratio_on_balls_by_radial_quadrature(n, s):
    # uniform ball measure: |z|^2 ~ Beta(n, 1)
    val, _ = quad(lambda t: n * t ** (n - 1), 0, 1, weight="alg", wvar=(0, s))
    assert K.hua_ratio(D.TypeI(1, n), s) == pytest.approx(val, rel=1e-12)


def test_hua_ratio_float_matches_exact():
    d = D.TypeIII(3)
    assert K.hua_ratio(d, 0.75) == pytest.approx(float(K.hua_ratio(d, Fraction(3, 4))), rel=1e-14)


def test_hua_ratio_rejects_divergent():
    with pytest.raises(DomainError):
        K.hua_ratio(D.TypeI(1, 1), -1)


def test_bergman_kernel_disc_series():
    z, w = 0.4 + 0.3j, -0.2 + 0.1j
    series = sum((k + 1) * (z * w.conjugate()) ** k for k in range(200))
    kv = K.bergman_kernel(D.TypeI(1, 1), [[z]], [[w]])
    assert kv.normalization is K.Normalization.EXACT_VOLUME
    assert complex(kv.value) == pytest.approx(series, rel=1e-13)


def test_bergman_kernel_ball_series():
    rng = np.random.default_rng(0)
    z = random_interior(D.TypeI(1, 3), rng, 0.8)
    w = random_interior(D.TypeI(1, 3), rng, 0.8)
    t = complex(np.sum(z * w.conj()))
    series = sum(math.comb(3 + k, k) * t**k for k in range(400))
    assert complex(K.bergman_kernel(D.TypeI(1, 3), z, w).value) == pytest.approx(series, rel=1e-12)


@pytest.mark.parametrize(
    "spec, exponent",
    [("I:2,3", 5), ("III:3", 4), ("II:4", 3), ("II:5", 4)],
)
def test_bergman_kernel_matches_determinant_formula(spec, exponent):
    d = D.parse_domain(spec)
    rng = np.random.default_rng(1)
    z, w = random_interior(d, rng), random_interior(d, rng)
    det = np.linalg.det(np.eye(z.shape[0]) - z @ w.conj().T)
    kv = K.bergman_kernel(d, z, w)
    assert kv.normalization is K.Normalization.RATIO
    assert complex(kv.value) == pytest.approx(det ** (-exponent), rel=1e-9)


def test_bergman_kernel_type_iv():
    d = D.TypeIV(4)
    rng = np.random.default_rng(2)
    z, w = random_interior(d, rng), random_interior(d, rng)
    n = 1 - 2 * np.sum(z * w.conj()) + np.sum(z * z) * np.conj(np.sum(w * w))
    assert complex(K.bergman_kernel(d, z, w).value) == pytest.approx(n**-4, rel=1e-12)


def test_volume_modes():
    d = D.TypeI(2, 2)
    z = np.zeros((2, 2))
    assert K.bergman_kernel(d, z, volume=2.0).normalization is K.Normalization.MC_VOLUME
    assert float(K.bergman_kernel(d, z, volume=2.0)) == pytest.approx(0.5)
    with pytest.raises(DomainError):
        K.bergman_kernel(d, z, normalization="absolute-with-exact-volume")
    with pytest.raises(ValueError):
        K.bergman_kernel(d, z, normalization="absolute-with-mc-volume")


def test_weighted_ratio_disc():
    kv = K.weighted_kernel_ratio(D.TypeI(1, 1), 1, [[0.5]], [[0.5]])
    assert float(kv) == pytest.approx(8 / 3)
    assert kv.normalization is K.Normalization.RATIO


def test_weighted_ratio_at_origin_is_inverse_hua():
    for spec in ("I:2,3", "III:2", "IV:5", "II:4"):
        d = D.parse_domain(spec)
        z = np.zeros(d.shape())
        for mu in (Fraction(1, 2), 1, 3):
            r = float(K.weighted_kernel_ratio(d, mu, z, z))
            assert r == pytest.approx(float(1 / K.hua_ratio(d, mu)))


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(["I:1,2", "I:2,2", "II:4", "III:2", "IV:3"]), st.integers(0, 2**32 - 1),
       st.sampled_from([0, Fraction(1, 2), 1, 2.5]))
def test_weighted_kernel_hermitian_and_positive(spec, seed, mu):
    d = D.parse_domain(spec)
    rng = np.random.default_rng(seed)
    z, w = random_interior(d, rng), random_interior(d, rng)
    a = complex(K.weighted_kernel_ratio(d, mu, z, w).value)
    b = complex(K.weighted_kernel_ratio(d, mu, w, z).value)
    assert a == pytest.approx(b.conjugate(), rel=1e-10)
    assert float(K.weighted_kernel_ratio(d, mu, z, z)) > 0
    assert float(K.bergman_kernel(d, z)) > 0


def test_weighted_kernel_many_matches_scalar():
    d = D.TypeIII(2)
    rng = np.random.default_rng(3)
    z = random_interior(d, rng)
    ws = np.stack([random_interior(d, rng) for _ in range(5)])
    many = K.weighted_kernel_many(d, Fraction(1, 2), z, ws)
    for w, v in zip(ws, many):
        want = complex(K.weighted_kernel_ratio(d, Fraction(1, 2), z, w).value) * complex(
            K.bergman_kernel(d, z, w).value)
        assert v == pytest.approx(want, rel=1e-10)


def test_outside_points_rejected():
    with pytest.raises(DomainError):
        K.bergman_kernel(D.TypeI(1, 1), [[1.0]])


def test_virtual_decomposition_disc():
    assert list(K.virtual_decomposition(D.TypeI(1, 1), 1).coeffs) == [0, 1]
    assert list(K.virtual_decomposition(D.TypeI(1, 1), Fraction(1, 2)).coeffs) == [
        Fraction(1, 2), Fraction(1, 2)]
    with pytest.raises(DomainError):
        K.virtual_decomposition(D.TypeI(1, 1), -1)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["I:1,1", "I:2,2", "II:5", "III:3", "IV:4", "V"]),
       st.fractions(0, 4, max_denominator=4), st.integers(0, 30))
def test_taylor_recovery(spec, mu, k):
    d = D.parse_domain(spec)
    chi = K.chi_polynomial(d)
    vk = K.virtual_decomposition(d, mu)
    assert K.recover_weighted_ratio(vk, k) == chi.eval(k * mu) / chi.at_zero()


def test_f_eval_disc():
    vk = K.virtual_decomposition(D.TypeI(1, 1), 1)
    assert K.f_eval(vk, 0.5).real == pytest.approx(4.0)
    assert K.f_eval(vk, 0.5, 1).real == pytest.approx(16.0)
    # the off-by-one variant gives (1-t)^-1 instead of (1-t)^-2
    assert K.f_eval(vk, 0.5, 0, K.UNCORRECTED).real == pytest.approx(2.0)
    with pytest.raises(K.DivergenceError):
        K.f_eval(vk, 1.0)


@pytest.mark.parametrize("spec, mu", [("I:2,2", 1), ("III:2", Fraction(1, 2)), ("IV:3", 2)])
def test_f_eval_derivatives_by_cauchy_integral(spec, mu):
    # (1/m!) F^(m)(t) = mean over the circle |u - t| = r of F(u) (u - t)^-m
    vk = K.virtual_decomposition(D.parse_domain(spec), mu)
    t, r = 0.3, 0.2
    u = t + r * np.exp(2j * np.pi * np.arange(64) / 64)
    vals = np.array([K.f_eval(vk, x) for x in u])
    for m in range(4):
        oracle = np.mean(vals * (u - t) ** (-m))
        assert K.f_eval(vk, t, m) == pytest.approx(oracle, rel=1e-10)


def test_virtual_kernel_value_disc():
    # K(z) F(r / N) with F = (1-t)^-2
    z = 0.3
    n = 1 - z * z
    val = K.virtual_kernel_value(D.TypeI(1, 1), 1, [[z]], 0.2)
    assert float(val) == pytest.approx(n**-2 * (1 - 0.2 / n) ** -2)
    with pytest.raises(K.DivergenceError):
        K.virtual_kernel_value(D.TypeI(1, 1), 1, [[z]], 0.95)


@pytest.mark.parametrize("n, m", [(1, 1), (2, 1), (1, 3), (3, 2)])
def test_inflated_ball_off_diagonal(n, m):
    rng = np.random.default_rng(n * 10 + m)
    big = D.TypeI(1, n + m)
    p, q = random_interior(big, rng, 0.9).ravel(), random_interior(big, rng, 0.9).ravel()
    got = complex(K.inflated_kernel(D.TypeI(1, n), 1, m, p[:n].reshape(1, n), p[n:],
                                    q[:n].reshape(1, n), q[n:]).value)
    want = math.comb(n + m, m) * (1 - np.sum(p * q.conj())) ** (-(n + m + 1))
    assert got == pytest.approx(want, rel=1e-11)


def test_inflated_m0_is_bergman():
    d = D.TypeIV(3)
    z = random_interior(d, np.random.default_rng(4))
    assert complex(K.inflated_kernel(d, 1, 0, z, []).value) == pytest.approx(
        complex(K.bergman_kernel(d, z).value))


def test_inflated_rejects_outside_fiber():
    with pytest.raises(DomainError):
        K.inflated_kernel(D.TypeI(1, 1), 1, 1, [[0.6]], [0.9])


def test_ball_kernel_is_sum_of_harmonic_kernels():
    Z = np.array([0.3 + 0.1j, -0.2j])
    for rho in (0.7, 1.0, 2.0):
        total = sum(K.ball_harmonic(2, k, Z, rho) for k in range(400))
        assert K.ball_kernel(2, Z, rho=rho).real == pytest.approx(total, rel=1e-12)


def test_homogeneous_projection_polynomial():
    Z = np.array([0.4 + 0.2j, -0.3j])
    f = lambda w: 1 + w[..., 0] ** 2 * w[..., 1] + 3 * w[..., 1] ** 2
    assert K.homogeneous_projection(f, Z, 3) == pytest.approx(Z[0] ** 2 * Z[1])
    assert K.homogeneous_projection(f, Z, 2) == pytest.approx(3 * Z[1] ** 2)
    assert K.homogeneous_projection(f, Z, 1) == pytest.approx(0, abs=1e-15)
    pair = K.ball_pairing_projection(f, Z, 3, 2)
    assert pair == pytest.approx(Z[0] ** 2 * Z[1], abs=1e-13)
