"""Irreducible bounded circled symmetric domains: registry and numerics.

Six types are modelled. Types I-IV have concrete matrix/vector realizations
and support membership, generic-norm evaluation and uniform sampling; the
exceptional types V and VI only carry their numerical invariants.

Independent complex coordinates of a point (used for sampling and for the
volume constant) are, per type:

* ``I_{m,n}``: all ``m*n`` entries, row-major;
* ``II_n``: entries ``x[i, j]`` with ``i < j``;
* ``III_n``: entries ``x[i, j]`` with ``i <= j``;
* ``IV_n``: the ``n`` vector components.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import ClassVar

import numpy as np

from . import core

__all__ = [
    "DomainError",
    "UnsupportedDomainError",
    "BranchError",
    "DomainType",
    "TypeI",
    "TypeII",
    "TypeIII",
    "TypeIV",
    "TypeV",
    "TypeVI",
    "Invariants",
    "DomainPoint",
    "VolumeConvention",
    "SampleBatch",
    "parse_domain",
    "invariants",
    "contains",
    "contains_many",
    "generic_norm_many",
    "generic_norm",
    "sample_uniform",
    "volume_convention",
    "pfaffian",
]


class DomainError(ValueError):
    """Invalid domain parameters or a point outside the domain."""


class UnsupportedDomainError(DomainError):
    """Operation needs a concrete realization (types V and VI have none)."""


class BranchError(ArithmeticError):
    """A square root or complex power has no unambiguous branch."""


@dataclass(frozen=True)
class Invariants:
    rank: int
    a: int
    b: int
    genus: int
    dim: int

    def as_dict(self) -> dict:
        return {"r": self.rank, "a": self.a, "b": self.b, "g": self.genus, "n": self.dim}


@dataclass(frozen=True)
class DomainType:
    """Base class; use one of the concrete ``Type*`` subclasses."""

    label: ClassVar[str] = ""
    concrete: ClassVar[bool] = True

    def _rab(self) -> tuple[int, int, int]:
        raise NotImplementedError

    def expected_dim(self) -> int:
        raise NotImplementedError

    def chi_table_factors(self) -> list[tuple]:
        """Rising-factorial factors of the per-type Hua polynomial table."""
        raise NotImplementedError

    @property
    def spec(self) -> str:
        """Canonical type-spec string, e.g. ``"I:2,3"``."""
        raise NotImplementedError

    # concrete realizations only
    def shape(self) -> tuple[int, ...]:
        raise UnsupportedDomainError(f"type {self.label} has no concrete realization")

    def n_coords(self) -> int:
        raise UnsupportedDomainError(f"type {self.label} has no concrete realization")

    def m1_weights(self) -> np.ndarray:
        """Weights ``w_i`` with ``m1(x, x) = sum w_i |u_i|^2`` in independent coordinates."""
        raise UnsupportedDomainError(f"type {self.label} has no concrete realization")

    def from_coords(self, u: np.ndarray) -> np.ndarray:
        raise UnsupportedDomainError(f"type {self.label} has no concrete realization")

    def validate_data(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        if x.shape != self.shape():
            raise DomainError(f"expected shape {self.shape()} for {self.spec}, got {x.shape}")
        return x

    def __str__(self) -> str:
        return self.spec


@dataclass(frozen=True)
class TypeI(DomainType):
    m: int
    n: int
    label: ClassVar[str] = "I"

    def __post_init__(self):
        if not (1 <= self.m <= self.n):
            raise DomainError(f"TypeI requires 1≤m≤n, got m={self.m}, n={self.n}")

    def _rab(self):
        return self.m, 2, self.n - self.m

    def expected_dim(self):
        return self.m * self.n

    def chi_table_factors(self):
        return [(j, self.n) for j in range(1, self.m + 1)]

    @property
    def spec(self):
        return f"I:{self.m},{self.n}"

    def shape(self):
        return (self.m, self.n)

    def n_coords(self):
        return self.m * self.n

    def m1_weights(self):
        return np.ones(self.n_coords())

    def from_coords(self, u):
        u = np.asarray(u, dtype=complex)
        return u.reshape(u.shape[:-1] + (self.m, self.n))


@dataclass(frozen=True)
class TypeII(DomainType):
    n: int
    label: ClassVar[str] = "II"

    def __post_init__(self):
        if self.n < 2:
            raise DomainError(f"TypeII requires n≥2, got n={self.n}")

    def _rab(self):
        return self.n // 2, 4, 0 if self.n % 2 == 0 else 2

    def expected_dim(self):
        return self.n * (self.n - 1) // 2

    def chi_table_factors(self):
        p = self.n // 2
        length = 2 * p - 1 if self.n % 2 == 0 else 2 * p + 1
        return [(2 * j - 1, length) for j in range(1, p + 1)]

    @property
    def spec(self):
        return f"II:{self.n}"

    def shape(self):
        return (self.n, self.n)

    def n_coords(self):
        return self.expected_dim()

    def m1_weights(self):
        # m1(x, x) = tr(x x*) / 2 = sum_{i<j} |x_ij|^2
        return np.ones(self.n_coords())

    def from_coords(self, u):
        u = np.asarray(u, dtype=complex)
        iu = np.triu_indices(self.n, 1)
        x = np.zeros(u.shape[:-1] + (self.n, self.n), dtype=complex)
        x[..., iu[0], iu[1]] = u
        x[..., iu[1], iu[0]] = -u
        return x

    def validate_data(self, x):
        x = super().validate_data(x)
        if not np.array_equal(x, -x.T):
            raise DomainError("TypeII data must be exactly antisymmetric")
        return x


@dataclass(frozen=True)
class TypeIII(DomainType):
    n: int
    label: ClassVar[str] = "III"

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"TypeIII requires n≥1, got n={self.n}")

    def _rab(self):
        return self.n, 1, 0

    def expected_dim(self):
        return self.n * (self.n + 1) // 2

    def chi_table_factors(self):
        from fractions import Fraction

        return [(Fraction(j + 1, 2), 1 + self.n - j) for j in range(1, self.n + 1)]

    @property
    def spec(self):
        return f"III:{self.n}"

    def shape(self):
        return (self.n, self.n)

    def n_coords(self):
        return self.expected_dim()

    def m1_weights(self):
        # tr(x x*) counts each off-diagonal entry twice
        iu = np.triu_indices(self.n)
        return np.where(iu[0] == iu[1], 1.0, 2.0)

    def from_coords(self, u):
        u = np.asarray(u, dtype=complex)
        iu = np.triu_indices(self.n)
        x = np.zeros(u.shape[:-1] + (self.n, self.n), dtype=complex)
        x[..., iu[0], iu[1]] = u
        x[..., iu[1], iu[0]] = u
        return x

    def validate_data(self, x):
        x = super().validate_data(x)
        if not np.array_equal(x, x.T):
            raise DomainError("TypeIII data must be exactly symmetric")
        return x


@dataclass(frozen=True)
class TypeIV(DomainType):
    n: int
    label: ClassVar[str] = "IV"

    def __post_init__(self):
        if self.n < 3:
            hint = "use I:1,1" if self.n == 1 else "IV_2 is reducible: a product of two discs"
            raise DomainError(f"TypeIV requires n≥3, got n={self.n} ({hint})")

    def _rab(self):
        return 2, self.n - 2, 0

    def expected_dim(self):
        return self.n

    def chi_table_factors(self):
        from fractions import Fraction

        return [(1, self.n - 1), (Fraction(self.n, 2), 1)]

    @property
    def spec(self):
        return f"IV:{self.n}"

    def shape(self):
        return (self.n,)

    def n_coords(self):
        return self.n

    def m1_weights(self):
        # m1 = q(x, xbar) = 2 sum |x_i|^2
        return np.full(self.n, 2.0)

    def from_coords(self, u):
        return np.asarray(u, dtype=complex)


@dataclass(frozen=True)
class TypeV(DomainType):
    label: ClassVar[str] = "V"
    concrete: ClassVar[bool] = False

    def _rab(self):
        return 2, 6, 4

    def expected_dim(self):
        return 16

    def chi_table_factors(self):
        return [(1, 8), (4, 8)]

    @property
    def spec(self):
        return "V"


@dataclass(frozen=True)
class TypeVI(DomainType):
    label: ClassVar[str] = "VI"
    concrete: ClassVar[bool] = False

    def _rab(self):
        return 3, 8, 0

    def expected_dim(self):
        return 27

    def chi_table_factors(self):
        return [(1, 9), (5, 9), (9, 9)]

    @property
    def spec(self):
        return "VI"


def parse_domain(text: str) -> DomainType:
    """Parse ``I:m,n | II:n | III:n | IV:n | V | VI``."""
    text = text.strip()
    label, _, rest = text.partition(":")
    label = label.strip().upper()
    try:
        args = [int(a) for a in rest.split(",")] if rest.strip() else []
    except ValueError:
        raise DomainError(f"cannot parse type spec {text!r}") from None
    arity = {"I": 2, "II": 1, "III": 1, "IV": 1, "V": 0, "VI": 0}
    if label not in arity:
        raise DomainError(f"unknown domain type {label!r} in {text!r}")
    if len(args) != arity[label]:
        raise DomainError(f"type {label} takes {arity[label]} parameter(s), got {len(args)}")
    cls = {"I": TypeI, "II": TypeII, "III": TypeIII, "IV": TypeIV, "V": TypeV, "VI": TypeVI}[label]
    return cls(*args)


def invariants(d: DomainType) -> Invariants:
    r, a, b = d._rab()
    g = 2 + a * (r - 1) + b
    n = r * (1 + b) + a * r * (r - 1) // 2
    if n != d.expected_dim():
        raise AssertionError(f"dimension mismatch for {d.spec}: {n} != {d.expected_dim()}")
    return Invariants(rank=r, a=a, b=b, genus=g, dim=n)


@dataclass(frozen=True)
class DomainPoint:
    domain: DomainType
    data: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "data", self.domain.validate_data(self.data))


def _data(d: DomainType, x) -> np.ndarray:
    if isinstance(x, DomainPoint):
        return x.data
    if not d.concrete:
        raise UnsupportedDomainError(f"type {d.label} has no concrete realization")
    return d.validate_data(x)


def contains(d: DomainType, x) -> bool:
    """Membership test (strict interior)."""
    if isinstance(x, DomainPoint):
        d, x = x.domain, x.data
    x = _data(d, x)
    if isinstance(d, TypeIV):
        s2 = float(np.vdot(x, x).real)
        q = complex(np.sum(x * x))
        return 1.0 - 2.0 * s2 + abs(q) ** 2 > 0.0 and 2.0 - 2.0 * s2 > 0.0
    return float(np.linalg.norm(x, 2)) < 1.0


def pfaffian(a: np.ndarray) -> complex:
    """Pfaffian of an antisymmetric matrix by pivoted Parlett-Reid elimination."""
    a = np.array(a, dtype=complex)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("pfaffian needs a square matrix")
    if n % 2:
        return 0j
    pf = 1.0 + 0j
    for k in range(0, n - 1, 2):
        kp = k + 1 + int(np.abs(a[k + 1 :, k]).argmax())
        if kp != k + 1:
            a[[k + 1, kp], k:] = a[[kp, k + 1], k:]
            a[k:, [k + 1, kp]] = a[k:, [kp, k + 1]]
            pf = -pf
        if a[k + 1, k] == 0:
            return 0j
        pf *= a[k, k + 1]
        if k + 2 < n:
            tau = a[k, k + 2 :] / a[k, k + 1]
            col = a[k + 2 :, k + 1].copy()
            a[k + 2 :, k + 2 :] += np.outer(tau, col) - np.outer(col, tau)
    return pf


def _type2_norm(x: np.ndarray, y: np.ndarray) -> complex:
    # det [[x, I], [-I, ybar]] = det(I + x ybar) and the block matrix is
    # antisymmetric, so its Pfaffian is the polynomial square root.
    n = x.shape[0]
    eye = np.eye(n)
    big = np.block([[x, eye], [-eye, y.conj()]])
    ref = np.block([[np.zeros((n, n)), eye], [-eye, np.zeros((n, n))]])
    return complex(pfaffian(big) / pfaffian(ref))


def generic_norm(d: DomainType, x, y) -> complex:
    """Generic norm ``N(x, y)``: holomorphic in ``x``, antiholomorphic in ``y``."""
    x = _data(d, x)
    y = _data(d, y)
    if isinstance(d, TypeI):
        return complex(np.linalg.det(np.eye(d.m) - x @ y.conj().T))
    if isinstance(d, TypeIII):
        return complex(np.linalg.det(np.eye(d.n) - x @ y.conj()))
    if isinstance(d, TypeIV):
        qxy = 2.0 * complex(np.sum(x * y.conj()))
        return 1.0 - qxy + complex(np.sum(x * x)) * complex(np.sum(y * y)).conjugate()
    if isinstance(d, TypeII):
        return _type2_norm(x, y)
    raise UnsupportedDomainError(f"generic norm not implemented for type {d.label}")


def contains_many(d: DomainType, xs) -> np.ndarray:
    """Vectorized :func:`contains` over a stack of points."""
    if not d.concrete:
        raise UnsupportedDomainError(f"type {d.label} has no concrete realization")
    xs = np.asarray(xs, dtype=complex)
    if isinstance(d, TypeIV):
        s2 = np.sum(np.abs(xs) ** 2, axis=-1)
        q = np.sum(xs * xs, axis=-1)
        return (1.0 - 2.0 * s2 + np.abs(q) ** 2 > 0.0) & (s2 < 1.0)
    return np.linalg.norm(xs, 2, axis=(-2, -1)) < 1.0


def generic_norm_many(d: DomainType, x, ys) -> np.ndarray:
    """``N(x, y)`` for a fixed ``x`` and a stack of ``y``."""
    x = _data(d, x)
    ys = np.asarray(ys, dtype=complex)
    if ys.shape[1:] != d.shape():
        raise DomainError(f"expected a stack of shape (*, {d.shape()})")
    if isinstance(d, TypeI):
        return np.linalg.det(np.eye(d.m) - x @ np.conj(np.swapaxes(ys, -1, -2)))
    if isinstance(d, TypeIII):
        return np.linalg.det(np.eye(d.n) - x @ np.conj(ys))
    if isinstance(d, TypeIV):
        qxy = 2.0 * np.sum(x * np.conj(ys), axis=-1)
        return 1.0 - qxy + np.sum(x * x) * np.conj(np.sum(ys * ys, axis=-1))
    if isinstance(d, TypeII):
        return np.array([_type2_norm(x, y) for y in ys])
    raise UnsupportedDomainError(f"generic norm not implemented for type {d.label}")


def type2_norm_by_pairing(x, y, tol: float = 1e-9) -> complex:
    """Type II generic norm from paired eigenvalues of ``x conj(y)``.

    Kept as an independent cross-check of the Pfaffian route. Eigenvalues of a
    product of two alternating matrices come in equal pairs (plus one zero for
    odd size); one representative per pair gives the square root.
    """
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    ev = list(np.linalg.eigvals(x @ y.conj()))
    n = len(ev)
    if n % 2:
        i0 = int(np.argmin(np.abs(ev)))
        if abs(ev[i0]) > tol:
            raise BranchError("odd-size type II product has no zero eigenvalue")
        ev.pop(i0)
    out = 1.0 + 0j
    while ev:
        lam = ev.pop(0)
        j = int(np.argmin([abs(lam - mu) for mu in ev]))
        if abs(ev[j] - lam) > tol * max(1.0, abs(lam)):
            raise BranchError("eigenvalues of x conj(y) do not pair up")
        ev.pop(j)
        out *= 1.0 + lam
    return out


@dataclass(frozen=True)
class VolumeConvention:
    """``omega = jacobian_to_lebesgue * dLeb`` in independent real coordinates."""

    jacobian_to_lebesgue: float


def volume_convention(d: DomainType) -> VolumeConvention:
    # alpha = (i/2pi) ddbar m1 = sum w_i dA_i / pi, so alpha^n = n! prod(w_i) dLeb / pi^n
    w = d.m1_weights()
    n = len(w)
    c = math.factorial(n) * float(np.prod(w)) / math.pi**n
    return VolumeConvention(jacobian_to_lebesgue=c)


@dataclass
class SampleBatch:
    domain: DomainType
    points: np.ndarray
    acceptance_rate: float
    drawn: int

    def __len__(self):
        return len(self.points)

    def as_points(self) -> list[DomainPoint]:
        return [DomainPoint(self.domain, p) for p in self.points]


def box_volume(d: DomainType) -> float:
    """Lebesgue volume of the sampling box: each complex coordinate in ``[-1, 1]^2``."""
    return 4.0 ** d.n_coords()


def draw_accepted(
    d: DomainType, rng: np.random.Generator, count: int, chunk: int = 65536, backend=None
):
    """Rejection-sample ``count`` interior coordinate rows.

    Returns ``(coords, norms, drawn)`` where ``coords`` has shape
    ``(count, 2*n_coords)`` (interleaved real/imag parts), ``norms`` holds
    ``N(x, x)`` for each accepted row and ``drawn`` counts candidates up to
    and including the last accepted one.
    """
    if not d.concrete:
        raise UnsupportedDomainError(f"cannot sample type {d.label}")
    width = 2 * d.n_coords()
    kept_c, kept_n = [], []
    have = 0
    drawn = 0
    seen = 0
    while have < count:
        need = count - have
        # size the draw from the running acceptance rate, capped at ``chunk``
        rate = have / seen if have else 1.0 / 64
        size = min(chunk, max(1024, int(1.25 * need / rate) + 64))
        cand = rng.uniform(-1.0, 1.0, size=(size, width))
        seen += size
        norms = core.diag_norm_batch(d, cand, backend=backend)
        idx = np.flatnonzero(norms > 0.0)
        if len(idx) >= need:
            idx = idx[:need]
            drawn += int(idx[-1]) + 1
        else:
            drawn += size
        kept_c.append(cand[idx])
        kept_n.append(norms[idx])
        have += len(idx)
    return np.concatenate(kept_c), np.concatenate(kept_n), drawn


def coords_to_complex(coords: np.ndarray) -> np.ndarray:
    return coords[..., 0::2] + 1j * coords[..., 1::2]


def sample_uniform(d: DomainType, seed: int, count: int) -> SampleBatch:
    """I.i.d. Lebesgue-uniform interior points by rejection from the coordinate box."""
    if count <= 0:
        raise ValueError("count must be positive")
    rng = np.random.default_rng(seed)
    coords, _, drawn = draw_accepted(d, rng, count)
    pts = d.from_coords(coords_to_complex(coords))
    return SampleBatch(domain=d, points=pts, acceptance_rate=count / drawn, drawn=drawn)


def diag_norm(d: DomainType, x) -> float:
    """``N(x, x)`` as a real number (positive inside the domain)."""
    return float(generic_norm(d, x, x).real)
