"""Closed-form kernel mathematics.

Hua polynomials, weighted Bergman kernels, virtual Bergman kernels with the
derivative family used for inflated (Hartogs) domains, and harmonic analysis
on Hermitian balls.

Normalizations
--------------
Absolute kernel values need ``vol(Omega)`` with respect to the volume form
built from ``m1``. It is exactly 1 for the Hermitian balls ``I_{1,n}``; for
other domains values are returned multiplied by ``vol(Omega)`` (that is, in
units of the kernel at the origin) unless a Monte Carlo volume is supplied.

Generating-function convention
------------------------------
With ``q(k) = chi(k mu) / chi(0) = sum_j c_j (k+1)_j / j!`` the series
``F(t) = sum_k q(k) t^k`` equals ``sum_j c_j (1 - t)^(-(j+1))`` because
``sum_k binom(k+j, j) t^k = (1-t)^(-(j+1))``. The variant with exponent
``-j`` is available as ``convention="uncorrected"`` for comparison only; it
disagrees with the series.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from numbers import Rational
from typing import Callable, Sequence

import numpy as np

from . import domains as dom
from .domains import BranchError, DomainError, DomainType
from .polyalg import (
    FactorizedPoly,
    RationalPolynomial,
    as_fraction,
    binomial_basis_decompose,
    rising_factorial,
)

__all__ = [
    "DivergenceError",
    "SingularKernelError",
    "Normalization",
    "KernelValue",
    "ChiPolynomial",
    "VirtualKernel",
    "chi_polynomial",
    "chi_generic_factors",
    "hua_ratio",
    "weighted_kernel_ratio",
    "weighted_kernel_many",
    "bergman_kernel",
    "virtual_decomposition",
    "f_eval",
    "virtual_kernel_value",
    "inflated_kernel",
    "recover_weighted_ratio",
    "ball_kernel",
    "ball_harmonic",
    "homogeneous_projection",
    "ball_pairing_projection",
]

CORRECTED = "corrected"
UNCORRECTED = "uncorrected"


class DivergenceError(ValueError):
    """Series argument outside the unit disc (or point outside the Hartogs domain)."""


class SingularKernelError(ArithmeticError):
    """The generic norm vanishes at the requested pair of points."""


class Normalization(str, enum.Enum):
    RATIO = "ratio-to-unweighted-kernel"
    EXACT_VOLUME = "absolute-with-exact-volume"
    MC_VOLUME = "absolute-with-mc-volume"


@dataclass(frozen=True)
class KernelValue:
    value: complex
    normalization: Normalization

    @property
    def real(self) -> float:
        return complex(self.value).real

    def __complex__(self):
        return complex(self.value)

    def __float__(self):
        v = complex(self.value)
        if abs(v.imag) > 1e-12 * max(1.0, abs(v)):
            raise TypeError("kernel value is not real")
        return v.real


# -- Hua polynomials ----------------------------------------------------------


def chi_generic_factors(d: DomainType) -> FactorizedPoly:
    """Factors ``prod_j (s + 1 + (j-1) a/2)_{1 + b + (r-j) a}`` from the invariants."""
    inv = dom.invariants(d)
    r, a, b = inv.rank, inv.a, inv.b
    return FactorizedPoly(
        (1 + Fraction((j - 1) * a, 2), 1 + b + (r - j) * a) for j in range(1, r + 1)
    )


@dataclass(frozen=True)
class ChiPolynomial:
    domain: DomainType
    factored: FactorizedPoly
    expanded: RationalPolynomial

    @property
    def degree(self) -> int:
        return self.expanded.degree

    def __call__(self, s):
        return self.eval(s)

    def eval(self, s):
        """Exact for rationals, float otherwise."""
        if isinstance(s, (int, Rational, str)) and not isinstance(s, bool):
            return self.factored.eval(s)
        return self.factored.eval_real(s)

    def at_zero(self) -> Fraction:
        return self.factored.eval(0)


@lru_cache(maxsize=None)
def chi_polynomial(d: DomainType) -> ChiPolynomial:
    """Hua polynomial of ``d``, built two ways and checked for exact equality."""
    table = FactorizedPoly(d.chi_table_factors())
    generic = chi_generic_factors(d)
    expanded = table.expand()
    if generic.expand() != expanded:
        raise AssertionError(f"Hua polynomial tables disagree for {d.spec}")
    n = dom.invariants(d).dim
    if expanded.degree != n:
        raise AssertionError(f"deg chi = {expanded.degree} != dim {n} for {d.spec}")
    return ChiPolynomial(domain=d, factored=table, expanded=expanded)


def _is_exact(x) -> bool:
    return isinstance(x, (int, Rational, str)) and not isinstance(x, bool)


def hua_ratio(d: DomainType, s):
    """``chi(0)/chi(s)``, the Hua integral divided by the volume."""
    if _is_exact(s):
        s = as_fraction(s)
    if s <= -1:
        raise DomainError("the Hua integral needs s > -1")
    chi = chi_polynomial(d)
    if isinstance(s, Fraction):
        return chi.at_zero() / chi.eval(s)
    return float(chi.at_zero()) / chi.eval(float(s))


def _chi_ratio(d: DomainType, mu):
    """``chi(mu)/chi(0)``; exact for rational ``mu``."""
    if _is_exact(mu):
        return 1 / hua_ratio(d, as_fraction(mu))
    return 1.0 / hua_ratio(d, float(mu))


def _norm_power(n: complex, p: float) -> complex:
    """Principal-branch ``n**p``, refusing pairs with ``Re n <= 0``."""
    if n == 0:
        raise SingularKernelError("generic norm vanishes")
    if p == int(p):
        return n ** int(p)
    if n.real <= 0:
        raise BranchError("Re N(z, w) <= 0: no principal branch for non-integral power")
    return cmath.exp(p * cmath.log(n))


def _pair_norm(d: DomainType, z, w) -> tuple[complex, bool]:
    for pt in (z, w):
        if not dom.contains(d, pt):
            raise DomainError("point outside the domain")
    same = np.array_equal(np.asarray(z), np.asarray(w))
    n = dom.generic_norm(d, z, w)
    if same:
        n = complex(n.real, 0.0)
    return n, same


def weighted_kernel_ratio(d: DomainType, mu, z, w) -> KernelValue:
    """``K^(mu)(z, w) / K(z, w) = chi(mu)/chi(0) * N(z, w)^(-mu)``."""
    n, same = _pair_norm(d, z, w)
    ratio = float(_chi_ratio(d, mu))
    val = ratio * _norm_power(n, -float(mu))
    if same:
        val = complex(val.real, 0.0)
    return KernelValue(val, Normalization.RATIO)


def weighted_kernel_many(d: DomainType, mu, z, ws, normalization=None, volume=None) -> np.ndarray:
    """Weighted Bergman kernel ``K^(mu)(z, w)`` for a stack of ``w``.

    Equals ``chi(mu)/chi(0) N(z, w)^(-mu-g) / vol`` with the volume handled as
    in :func:`bergman_kernel`.
    """
    _, vol = _volume_mode(d, normalization, volume)
    ws = np.asarray(ws, dtype=complex)
    if not dom.contains(d, z) or not dom.contains_many(d, ws).all():
        raise DomainError("point outside the domain")
    n = dom.generic_norm_many(d, z, ws)
    if np.any(n == 0):
        raise SingularKernelError("generic norm vanishes")
    g = dom.invariants(d).genus
    p = -float(mu)
    if p != int(p):
        if np.any(n.real <= 0):
            raise BranchError("Re N(z, w) <= 0: no principal branch for non-integral power")
        weight = np.exp(p * np.log(n))
    else:
        weight = n ** int(p)
    return float(_chi_ratio(d, mu)) * weight * n ** (-g) / vol


def _volume_mode(d: DomainType, normalization, volume):
    if normalization is None:
        if isinstance(d, dom.TypeI) and d.m == 1:
            return Normalization.EXACT_VOLUME, 1.0
        if volume is not None:
            return Normalization.MC_VOLUME, float(volume)
        return Normalization.RATIO, 1.0
    normalization = Normalization(normalization)
    if normalization is Normalization.EXACT_VOLUME:
        if not (isinstance(d, dom.TypeI) and d.m == 1):
            raise DomainError("exact volume is only known for the balls I:1,n")
        return normalization, 1.0
    if normalization is Normalization.MC_VOLUME:
        if volume is None:
            raise ValueError("absolute-with-mc-volume needs a volume estimate")
        return normalization, float(volume)
    return normalization, 1.0


def bergman_kernel(d: DomainType, z, w=None, normalization=None, volume=None) -> KernelValue:
    """Unweighted Bergman kernel ``N(z, w)^(-g) / vol``.

    ``volume`` is a Monte Carlo estimate of ``vol(Omega)`` (see
    :func:`kernelforge.verify.mc_volume`); without it non-ball domains are
    reported in ratio mode, i.e. multiplied by the volume.
    """
    if w is None:
        w = z
    mode, vol = _volume_mode(d, normalization, volume)
    n, same = _pair_norm(d, z, w)
    g = dom.invariants(d).genus
    val = n ** (-g) / vol
    if same:
        val = complex(val.real, 0.0)
    return KernelValue(val, mode)


# -- virtual kernels -------------------------------------------------------------


@dataclass(frozen=True)
class VirtualKernel:
    """Coefficients of ``F_{chi,mu}`` in the basis ``(k+1)_j / j!``."""

    domain: DomainType
    mu: Fraction
    coeffs: tuple[Fraction, ...]

    def q(self, k: int) -> Fraction:
        """``sum_j c_j (k+1)_j / j!``."""
        return sum((c * comb(k + j, j) for j, c in enumerate(self.coeffs)), Fraction(0))

    def f(self, t, m: int = 0, convention: str = CORRECTED) -> complex:
        return f_eval(self, t, m, convention)


@lru_cache(maxsize=None)
def _virtual_decomposition(d: DomainType, mu: Fraction) -> VirtualKernel:
    chi = chi_polynomial(d)
    q = chi.expanded.compose_linear(mu) * (1 / chi.at_zero())
    coeffs = binomial_basis_decompose(q)
    n = dom.invariants(d).dim
    coeffs = coeffs + [Fraction(0)] * (n + 1 - len(coeffs))
    return VirtualKernel(domain=d, mu=mu, coeffs=tuple(coeffs))


def virtual_decomposition(d: DomainType, mu) -> VirtualKernel:
    """Exact ``c_{mu,j}``, ``j = 0..dim``, with ``chi(k mu)/chi(0) = sum c_j (k+1)_j/j!``."""
    mu = as_fraction(mu)
    if mu < 0:
        raise DomainError("virtual kernels need mu >= 0 (weights N^(k mu) must be integrable)")
    return _virtual_decomposition(d, mu)


def f_eval(
    vk: VirtualKernel, t, m: int = 0, convention: str = CORRECTED, one_minus_t=None
) -> complex:
    """``(1/m!) d^m/dt^m F(t)`` for ``|t| < 1``.

    ``one_minus_t`` may carry ``1 - t`` computed without cancellation.
    """
    t = complex(t)
    if abs(t) >= 1:
        raise DivergenceError(f"|t| = {abs(t)} >= 1")
    if m < 0:
        raise ValueError("m must be nonnegative")
    shift = {CORRECTED: 1, UNCORRECTED: 0}[convention]
    u = 1.0 / (complex(one_minus_t) if one_minus_t is not None else 1.0 - t)
    acc = 0j
    for j, c in enumerate(vk.coeffs):
        if c == 0:
            continue
        e = j + shift
        # (1/m!) d^m (1-t)^(-e) = (e)_m / m! * (1-t)^(-(e+m))
        scale = rising_factorial(e, m) / factorial(m)
        if scale == 0:
            continue
        acc += float(c * scale) * u ** (e + m)
    if t.imag == 0:
        return complex(acc.real, 0.0)
    return acc


def recover_weighted_ratio(vk: VirtualKernel, k: int) -> Fraction:
    """``k``-th Taylor coefficient of ``F`` at 0, i.e. ``chi(k mu)/chi(0)``."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    return vk.q(k)


def virtual_kernel_value(
    d: DomainType, mu, z, r: float, normalization=None, volume=None, convention: str = CORRECTED
) -> KernelValue:
    """Diagonal virtual kernel ``K(z) F(r / N(z, z)^mu)``."""
    vk = virtual_decomposition(d, mu)
    if r < 0:
        raise ValueError("r must be nonnegative")
    k = bergman_kernel(d, z, z, normalization, volume)
    nz = dom.generic_norm(d, z, z).real
    p = nz ** float(vk.mu)
    if r >= p:
        raise DivergenceError("r >= N(z,z)^mu: outside the Hartogs domain")
    val = complex(k.value).real * f_eval(vk, r / p, 0, convention).real
    return KernelValue(complex(val, 0.0), k.normalization)


def inflated_kernel(
    d: DomainType,
    mu,
    m: int,
    z,
    Z: Sequence[complex],
    w=None,
    W: Sequence[complex] | None = None,
    normalization=None,
    volume=None,
    convention: str = CORRECTED,
) -> KernelValue:
    """Bergman kernel of ``{(z, Z) : |Z|^2 < N(z, z)^mu}`` with ``Z`` in ``C^m``.

    The volume form is ``omega_V ^ omega_m`` with
    ``omega_m = ((i/2pi) ddbar |Z|^2)^m``. ``<Z, W>`` is linear in ``Z``.
    """
    if m < 0:
        raise ValueError("m must be nonnegative")
    if w is None:
        w, W = z, Z
    Z = np.asarray(Z, dtype=complex).reshape(-1)
    W = np.asarray(W, dtype=complex).reshape(-1)
    if len(Z) != m or len(W) != m:
        raise ValueError(f"fiber vectors must have length m={m}")
    vk = virtual_decomposition(d, mu)
    mu_f = float(vk.mu)
    for pt, vec in ((z, Z), (w, W)):
        if not dom.contains(d, pt):
            raise DomainError("base point outside the domain")
        if float(np.vdot(vec, vec).real) >= dom.generic_norm(d, pt, pt).real ** mu_f:
            raise DomainError("point outside the inflated domain")
    k = bergman_kernel(d, z, w, normalization, volume)
    n, same = _pair_norm(d, z, w)
    inner = complex(np.sum(Z * W.conj()))
    n_mu = _norm_power(n, mu_f)
    t = inner / n_mu
    one_minus_t = (n_mu - inner) / n_mu
    val = complex(k.value) * f_eval(vk, t, m, convention, one_minus_t) * _norm_power(n, -mu_f * m)
    if same and np.array_equal(Z, W):
        val = complex(val.real, 0.0)
    return KernelValue(val, k.normalization)


# -- Hermitian balls -------------------------------------------------------------


def ball_kernel(m: int, Z, T=None, rho: float = 1.0) -> complex:
    """Bergman kernel of ``B_m(rho)`` for ``omega_m``: ``rho^-2m (1 - <Z,T>/rho^2)^-(m+1)``."""
    Z = np.asarray(Z, dtype=complex).reshape(-1)
    T = Z if T is None else np.asarray(T, dtype=complex).reshape(-1)
    if len(Z) != m or len(T) != m:
        raise ValueError(f"vectors must have length {m}")
    r2 = rho * rho
    if float(np.vdot(Z, Z).real) >= r2 or float(np.vdot(T, T).real) >= r2:
        raise DomainError("point not inside the ball")
    inner = complex(np.sum(Z * T.conj()))
    return rho ** (-2 * m) * (1.0 - inner / r2) ** (-(m + 1))


def ball_harmonic(m: int, k: int, Z, rho: float = 1.0) -> float:
    """Reproducing kernel of the ``k``-homogeneous polynomials on ``B_m(rho)``, on the diagonal."""
    Z = np.asarray(Z, dtype=complex).reshape(-1)
    s = float(np.vdot(Z, Z).real)
    if s >= rho * rho:
        raise DomainError("point not inside the ball")
    return rho ** (-2 * m - 2 * k) * comb(k + m, m) * s**k


def homogeneous_projection(
    f: Callable[[np.ndarray], np.ndarray], Z, k: int, nodes: int | None = None, guard: int = 16
) -> complex:
    """Degree-``k`` homogeneous part of ``f`` at ``Z`` by the circle average.

    ``f`` must accept a stack of points with the coordinate on the last axis.
    Trapezoidal rule in ``theta`` on ``f(e^{2 pi i theta} Z) e^{-2 pi i k theta}``;
    ``nodes`` defaults to ``4 (k + guard)``, which is exact for polynomials of
    degree below the node count.
    """
    Z = np.asarray(Z, dtype=complex).reshape(-1)
    if nodes is None:
        nodes = 4 * (k + guard)
    ph = np.exp(2j * math.pi * np.arange(nodes) / nodes)
    vals = np.asarray(f(ph[:, None] * Z[None, :]), dtype=complex)
    return complex(np.mean(vals * ph ** (-k)))


def _simplex_rule(m: int, radius2: float, order: int):
    """Gauss rule on ``{u in R_+^m : sum u < radius2}`` by collapsed coordinates."""
    x, wts = np.polynomial.legendre.leggauss(order)
    x = 0.5 * (x + 1.0)
    wts = 0.5 * wts
    pts = [np.zeros(m)]
    ws = [1.0]
    for i in range(m):
        new_pts, new_ws = [], []
        for p, wt in zip(pts, ws):
            rem = radius2 - p[:i].sum()
            for xi, wi in zip(x, wts):
                q = p.copy()
                q[i] = rem * xi
                new_pts.append(q)
                new_ws.append(wt * wi * rem)
        pts, ws = new_pts, new_ws
    return np.array(pts), np.array(ws)


def ball_pairing_projection(
    f: Callable[[np.ndarray], np.ndarray],
    Z,
    k: int,
    m: int,
    rho: float = 1.0,
    radial_order: int = 12,
    angular_nodes: int = 16,
) -> complex:
    """Degree-``k`` part of ``f`` via the ball-kernel pairing.

    Integrates ``rho^(-2m-2k) binom(k+m, m) <Z, W>^k f(W)`` over ``B_m(rho)``
    against ``omega_m``. In coordinates ``W_i = sqrt(u_i) e^{i phi_i}`` one has
    ``omega_m = m! du dphi/(2 pi)^m`` on the simplex ``sum u_i < rho^2``; the
    angles use the trapezoid rule and the simplex a collapsed Gauss rule, so
    polynomial ``f`` is integrated exactly while ``k + deg f < angular_nodes``
    and ``k + deg f < 2 radial_order``.
    """
    Z = np.asarray(Z, dtype=complex).reshape(-1)
    if len(Z) != m:
        raise ValueError(f"Z must have length {m}")
    upts, uw = _simplex_rule(m, rho * rho, radial_order)
    phis = 2 * math.pi * np.arange(angular_nodes) / angular_nodes
    grids = np.meshgrid(*([phis] * m), indexing="ij")
    phase = np.exp(1j * np.stack([g.reshape(-1) for g in grids], axis=1))
    # (radial, angular, m)
    W = np.sqrt(upts)[:, None, :] * phase[None, :, :]
    inner = W.conj() @ Z
    vals = np.asarray(f(W), dtype=complex)
    integral = np.sum(uw[:, None] * inner**k * vals) / angular_nodes**m
    return complex(rho ** (-2 * m - 2 * k) * comb(k + m, m) * factorial(m) * integral)
