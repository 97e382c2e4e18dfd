"""Numerical kernel: log-gamma, Gauss rules, symmetric eigensolver, multi-indices."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import DomainError

# two eigenvalues belong to one cluster when |a - b| <= CLUSTER_RTOL * (1 + |a|)
CLUSTER_RTOL = 1e-8


def ln_gamma(x: float) -> float:
    """Return ln Gamma(x) for x > 0."""
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"ln_gamma requires a finite positive argument, got {x!r}")
    return math.lgamma(x)


def ln_factorial(k: int) -> float:
    return math.lgamma(k + 1.0)


class RuleKind(enum.Enum):
    GAUSS_LEGENDRE = "gauss-legendre"   # on [0, 1]
    GAUSS_LAGUERRE = "gauss-laguerre"   # on [0, inf) with weight exp(-s)


@dataclass(frozen=True)
class QuadratureRule:
    kind: RuleKind
    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)

    def __len__(self):
        return len(self.nodes)

    def apply(self, f) -> float:
        """Sum of weights times ``f(nodes)``; for Laguerre the weight exp(-s) is implicit."""
        return float(np.dot(self.weights, f(self.nodes)))


def _legendre_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    # Newton on P_n from the Chebyshev-like initial guess, on [-1, 1]
    k = np.arange(1, n + 1)
    x = np.cos(np.pi * (k - 0.25) / (n + 0.5))
    for _ in range(100):
        p0 = np.ones_like(x)
        p1 = x.copy()
        for j in range(2, n + 1):
            p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
        dp = n * (x * p1 - p0) / (x * x - 1.0)
        dx = p1 / dp
        x = x - dx
        if np.max(np.abs(dx)) < 1e-16:
            break
    p0 = np.ones_like(x)
    p1 = x.copy()
    for j in range(2, n + 1):
        p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
    dp = n * (x * p1 - p0) / (x * x - 1.0)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    order = np.argsort(x)
    return x[order], w[order]


def _laguerre_eval(n: int, x: np.ndarray):
    """L_n(x), L_{n-1}(x) as scaled values plus a per-node log scale."""
    p0 = np.ones_like(x)
    p1 = 1.0 - x
    log_scale = np.zeros_like(x)
    for k in range(1, n):
        p0, p1 = p1, ((2 * k + 1 - x) * p1 - k * p0) / (k + 1)
        big = np.abs(p1) > 1e100
        if np.any(big):
            p0[big] *= 1e-100
            p1[big] *= 1e-100
            log_scale[big] += 100 * math.log(10.0)
    return p1, p0, log_scale


def _laguerre_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    # Golub-Welsch for nodes and the bulk of the weights, Newton polish on the nodes
    if n == 1:
        return np.array([1.0]), np.array([1.0])
    diag = 2.0 * np.arange(n) + 1.0
    off = np.arange(1, n, dtype=float)
    x, vecs = eigh_tridiagonal(diag, off)
    order = np.argsort(x)
    x, w_eig = x[order], vecs[0, order] ** 2
    for _ in range(20):
        ln, lnm1, _ = _laguerre_eval(n, x)
        dln = n * (ln - lnm1) / x
        dx = ln / dln
        x = x - dx
        if np.max(np.abs(dx) / x) < 1e-15:
            break
    # eigenvector weights are accurate to working precision where they are not tiny;
    # the tail (which underflows in the eigenvectors) uses x / (n L_{n-1}(x))^2 in logs
    _, lnm1, log_scale = _laguerre_eval(n, x)
    log_w = np.log(x) - 2.0 * math.log(n) - 2.0 * (np.log(np.abs(lnm1)) + log_scale)
    w = np.where(w_eig > 1e-6, w_eig, np.exp(log_w))
    return x, w


@lru_cache(maxsize=64)
def _cached_rule(kind: RuleKind, n: int) -> QuadratureRule:
    if kind is RuleKind.GAUSS_LEGENDRE:
        x, w = _legendre_rule(n)
        nodes, weights = 0.5 * (x + 1.0), 0.5 * w
    else:
        nodes, weights = _laguerre_rule(n)
        # weights below the smallest positive double cannot contribute
        keep = weights > 0.0
        nodes, weights = nodes[keep], weights[keep]
    return QuadratureRule(kind, np.ascontiguousarray(nodes), np.ascontiguousarray(weights))


def make_rule(kind: RuleKind | str, n: int) -> QuadratureRule:
    """Gauss-Legendre on [0, 1] or Gauss-Laguerre on [0, inf) with ``n`` nodes.

    A rule with n nodes is exact for polynomials of degree <= 2n - 1. For
    Gauss-Laguerre with n larger than about 180 the outermost weights
    underflow and those nodes are dropped.
    """
    kind = RuleKind(kind)
    if int(n) != n or n < 1:
        raise DomainError(f"node count must be a positive integer, got {n!r}")
    return _cached_rule(kind, int(n))


class SymmetricMatrix:
    """Dense real symmetric matrix; symmetry is exact by construction."""

    __slots__ = ("_a",)

    def __init__(self, entries):
        a = np.array(entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise DomainError(f"expected a non-empty square matrix, got shape {a.shape}")
        if not np.array_equal(a, a.T):
            raise DomainError("matrix is not exactly symmetric")
        a.setflags(write=False)
        self._a = a

    @classmethod
    def from_nearly_symmetric(cls, entries, rtol: float = 1e-12) -> "SymmetricMatrix":
        a = np.asarray(entries, dtype=float)
        scale = max(float(np.max(np.abs(a))), 1.0) if a.size else 1.0
        asym = float(np.max(np.abs(a - a.T))) if a.size else 0.0
        if asym > rtol * scale:
            raise DomainError(f"matrix asymmetry {asym:.3e} exceeds {rtol:g} * {scale:.3e}")
        return cls(0.5 * (a + a.T))

    @property
    def order(self) -> int:
        return self._a.shape[0]

    @property
    def array(self) -> np.ndarray:
        return self._a

    def __array__(self, dtype=None, copy=None):
        return self._a if dtype is None else self._a.astype(dtype)

    def __repr__(self):
        return f"SymmetricMatrix(order={self.order})"


def eigh(m: SymmetricMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and orthonormal eigenvectors (as columns)."""
    a = m.array if isinstance(m, SymmetricMatrix) else SymmetricMatrix(m).array
    if not np.all(np.isfinite(a)):
        raise DomainError("matrix has non-finite entries")
    w, v = np.linalg.eigh(a)
    return w, v


def cluster_eigenvalues(values: Sequence[float], rtol: float = CLUSTER_RTOL) -> list[tuple[float, int]]:
    """Group sorted eigenvalues into (mean value, multiplicity) clusters."""
    out: list[tuple[float, int]] = []
    group: list[float] = []
    for v in sorted(float(x) for x in values):
        if group and abs(v - group[0]) > rtol * (1.0 + abs(group[0])):
            out.append((float(np.mean(group)), len(group)))
            group = []
        group.append(v)
    if group:
        out.append((float(np.mean(group)), len(group)))
    return out


class MultiIndex(tuple):
    """Exponent vector J of the monomial z^J."""

    __slots__ = ()

    def __new__(cls, exponents: Sequence[int] = ()):
        vals = tuple(int(e) for e in exponents)
        if any(e < 0 for e in vals):
            raise DomainError(f"multi-index entries must be non-negative, got {vals}")
        return super().__new__(cls, vals)

    @property
    def degree(self) -> int:
        return sum(self)

    @property
    def factorial(self) -> int:
        return math.prod(math.factorial(e) for e in self)

    def ln_factorial(self) -> float:
        return sum(ln_factorial(e) for e in self)

    def increment(self, k: int) -> "MultiIndex":
        return MultiIndex(e + 1 if i == k else e for i, e in enumerate(self))

    def decrement(self, k: int) -> "MultiIndex | None":
        """J with entry k lowered by one, or None when that entry is zero."""
        if self[k] == 0:
            return None
        return MultiIndex(e - 1 if i == k else e for i, e in enumerate(self))

    def __add__(self, other):
        return MultiIndex(a + b for a, b in zip(self, other, strict=True))

    def __repr__(self):
        return f"MultiIndex({tuple(self)})"


def _compositions(n: int, m: int) -> Iterator[tuple[int, ...]]:
    if n == 1:
        yield (m,)
        return
    for first in range(m, -1, -1):
        for rest in _compositions(n - 1, m - first):
            yield (first,) + rest


@lru_cache(maxsize=256)
def _enumerate(n: int, m: int) -> tuple[MultiIndex, ...]:
    return tuple(MultiIndex(c) for c in _compositions(n, m))


def enumerate_multiindices(n: int, m: int) -> list[MultiIndex]:
    """All J with |J| = m in n variables, z_1-heaviest first: (1,0) before (0,1)."""
    if n < 1 or m < 0:
        raise DomainError(f"need n >= 1 and m >= 0, got n={n}, m={m}")
    return list(_enumerate(n, m))
