"""d, its Bergman-space adjoint, and the Laplacians on holomorphic polynomial forms.

A (p,0)-form is a table ``{(J, I): coefficient}`` meaning the sum of
coefficient * z^J dz^I, with I an increasing tuple of 0-based component
indices: ``()`` for functions, ``(k,)`` for dz^k, ``(j, k)`` with j < k for
dz^j ^ dz^k.  In every model the adjoint of d is a multiplication operator,

    adj(u_j dz^j)                 = c1 * sum_j z^j u_j
    adj(1/2 v_rs dz^r ^ dz^s)     = c2 * sum_{r,s} z^r v_rs dz^s

so the Bergman projection acts trivially and never has to be computed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np
from scipy.linalg import solve_triangular

from .basis import AUTO, block_keys, gram_matrix, inner_product, norm_squared
from .errors import AccuracyError, DomainError, UnsupportedDegreeError
from .models import Model
from .numerics import MultiIndex, SymmetricMatrix

_ZERO_TOL = 0.0


@dataclass(frozen=True)
class FormCoefficients:
    model: Model
    p: int
    table: Mapping = field(default_factory=dict)

    def __post_init__(self):
        if self.p not in (0, 1, 2):
            raise DomainError(f"form degree must be 0, 1 or 2, got {self.p!r}")
        n = self.model.n
        top = self.model.max_monomial_degree(self.p)
        clean = {}
        for (J, I), c in self.table.items():
            J = MultiIndex(J)
            I = tuple(int(i) for i in I)
            if len(J) != n:
                raise DomainError(f"multi-index {tuple(J)} has wrong length for n={n}")
            if len(I) != self.p or list(I) != sorted(set(I)) or any(not 0 <= i < n for i in I):
                raise DomainError(f"invalid component {I!r} for a ({self.p},0)-form in n={n}")
            if J.degree > top:
                raise DomainError(
                    f"z^{tuple(J)} is not square integrable for {self.model.label()} at p={self.p}"
                )
            c = complex(c)
            if c != 0:
                clean[(J, I)] = clean.get((J, I), 0j) + c
        object.__setattr__(self, "table", {k: v for k, v in clean.items() if v != 0})

    @classmethod
    def from_terms(cls, model: Model, p: int, terms: Iterable) -> "FormCoefficients":
        """Build from (J, component, coefficient) triples; component is k, (j, k) or None."""
        table: dict = {}
        for J, comp, c in terms:
            if p == 0:
                I = ()
            elif p == 1:
                I = (int(comp),)
            else:
                j, k = int(comp[0]), int(comp[1])
                if j == k:
                    continue
                if j > k:
                    j, k, c = k, j, -c
                I = (j, k)
            key = (MultiIndex(J), I)
            table[key] = table.get(key, 0j) + complex(c)
        return cls(model, p, table)

    @classmethod
    def zero(cls, model: Model, p: int) -> "FormCoefficients":
        return cls(model, p, {})

    def __add__(self, other: "FormCoefficients") -> "FormCoefficients":
        self._compatible(other)
        out = dict(self.table)
        for k, v in other.table.items():
            out[k] = out.get(k, 0j) + v
        return FormCoefficients(self.model, self.p, out)

    def __sub__(self, other: "FormCoefficients") -> "FormCoefficients":
        return self + other.scale(-1.0)

    def scale(self, c: complex) -> "FormCoefficients":
        return FormCoefficients(self.model, self.p, {k: c * v for k, v in self.table.items()})

    def _compatible(self, other):
        if other.model != self.model or other.p != self.p:
            raise DomainError("forms belong to different models or degrees")

    def degrees(self) -> list[int]:
        return sorted({J.degree for J, _ in self.table})

    def restrict(self, m: int) -> "FormCoefficients":
        return FormCoefficients(self.model, self.p, {k: v for k, v in self.table.items() if k[0].degree == m})

    def max_abs(self) -> float:
        return max((abs(v) for v in self.table.values()), default=0.0)

    def is_zero(self) -> bool:
        return not self.table

    def get(self, J, I=()) -> complex:
        return self.table.get((MultiIndex(J), tuple(I)), 0j)

    def coefficient_2(self, J, r: int, s: int) -> complex:
        """v_rs with v_sr = -v_rs."""
        if r == s:
            return 0j
        if r < s:
            return self.get(J, (r, s))
        return -self.get(J, (s, r))

    def __len__(self):
        return len(self.table)


def _accumulate(out: dict, key, val):
    out[key] = out.get(key, 0j) + val


def dbar(u: FormCoefficients) -> FormCoefficients:
    """Holomorphic exterior derivative d on (0,0)- and (1,0)-forms."""
    n = u.model.n
    out: dict = {}
    if u.p == 0:
        for (J, _), c in u.table.items():
            for k in range(n):
                if J[k]:
                    _accumulate(out, (J.decrement(k), (k,)), c * J[k])
        return FormCoefficients(u.model, 1, out)
    if u.p == 1:
        for (J, (k,)), c in u.table.items():
            # d(c z^J dz^k) = sum_j c J_j z^(J-e_j) dz^j ^ dz^k
            for j in range(n):
                if j == k or not J[j]:
                    continue
                Jm = J.decrement(j)
                if j < k:
                    _accumulate(out, (Jm, (j, k)), c * J[j])
                else:
                    _accumulate(out, (Jm, (k, j)), -c * J[j])
        return FormCoefficients(u.model, 2, out)
    raise UnsupportedDegreeError("d is implemented on (0,0)- and (1,0)-forms only")


def dbar_adjoint(v: FormCoefficients) -> FormCoefficients:
    """Bergman-space adjoint of d on (1,0)- and (2,0)-forms."""
    model = v.model
    out: dict = {}
    if v.p == 1:
        c1 = model.duality_constant()
        for (J, (j,)), c in v.table.items():
            _accumulate(out, (J.increment(j), ()), c1 * c)
        return FormCoefficients(model, 0, out)
    if v.p == 2:
        c2 = model.duality_constant_2()
        for (J, (r, s)), c in v.table.items():
            # v_rs = c and v_sr = -c
            _accumulate(out, (J.increment(r), (s,)), c2 * c)
            _accumulate(out, (J.increment(s), (r,)), -c2 * c)
        return FormCoefficients(model, 1, out)
    raise DomainError("the adjoint of d is defined on (1,0)- and (2,0)-forms")


def box0_apply(f: FormCoefficients) -> FormCoefficients:
    """Laplacian on functions: c1 * sum_j z^j d_j f (radial derivative)."""
    if f.p != 0:
        raise DomainError("box0 acts on (0,0)-forms")
    c1 = f.model.duality_constant()
    return FormCoefficients(f.model, 0, {(J, I): c1 * J.degree * c for (J, I), c in f.table.items()})


def box1_apply(u: FormCoefficients) -> FormCoefficients:
    """Laplacian on (1,0)-forms from its closed formula.

        c1 u + [c2 sum z^j d_j u_k + (c1 - c2) sum z^j d_k u_j] dz^k

    For n = 1 the last two terms combine into c1 z u'.
    """
    if u.p != 1:
        raise DomainError("box1 acts on (1,0)-forms")
    model = u.model
    n = model.n
    c1 = model.duality_constant()
    c2 = c1 if n == 1 else model.duality_constant_2()
    out: dict = {}
    for (J, (k,)), c in u.table.items():
        _accumulate(out, (J, (k,)), (c1 + c2 * J.degree) * c)
        if c1 == c2:
            continue
        for kp in range(n):
            if J[kp]:
                _accumulate(out, (J.decrement(kp).increment(k), (kp,)), (c1 - c2) * J[kp] * c)
    return FormCoefficients(model, 1, out)


def box_apply(u: FormCoefficients) -> FormCoefficients:
    return box0_apply(u) if u.p == 0 else box1_apply(u)


def inner(u: FormCoefficients, v: FormCoefficients, method: str = AUTO) -> complex:
    u._compatible(v)
    return inner_product(u.model, u.table, v.table, method)


def norm2(u: FormCoefficients, method: str = AUTO) -> float:
    return norm_squared(u.model, u.table, method)


@dataclass(frozen=True)
class BlockOperator:
    """Laplacian restricted to the span of z^J dz^I with |J| = m, in an orthonormal basis.

    ``matrix = L^-1 (G A) L^-T`` where A holds the monomial coefficients of the
    Laplacian, G is the Gram matrix of the monomial basis and G = L L^T.  For
    orthogonal bases L is diagonal and this is the usual rescaling by norms.
    """

    model: Model
    m: int
    p: int
    basis: list
    matrix: SymmetricMatrix
    gram: np.ndarray = field(repr=False)
    chol: np.ndarray = field(repr=False)
    coeff: np.ndarray = field(repr=False)

    @property
    def order(self) -> int:
        return self.matrix.order

    def to_orthonormal(self, u: FormCoefficients) -> np.ndarray:
        a = np.array([u.table.get(k, 0j) for k in self.basis], dtype=complex)
        return self.chol.T @ a

    def from_orthonormal(self, y: np.ndarray) -> FormCoefficients:
        a = solve_triangular(self.chol.T, np.asarray(y, dtype=complex), lower=False)
        return FormCoefficients(self.model, self.p, dict(zip(self.basis, a)))

    def gershgorin(self) -> tuple[float, float]:
        a = self.matrix.array
        radii = np.sum(np.abs(a), axis=1) - np.abs(np.diag(a))
        return float(np.min(np.diag(a) - radii)), float(np.max(np.diag(a) + radii))

    def to_dict(self) -> dict:
        return {
            "model": self.model.to_dict(),
            "m": self.m,
            "p": self.p,
            # (J, k) with 1-based k; k is null for functions
            "basis": [[list(J), I[0] + 1 if I else None] for J, I in self.basis],
            "matrix": self.matrix.array.tolist(),
        }


def assemble_block(model: Model, m: int, p: int = 1, method: str = AUTO) -> BlockOperator:
    """Matrix of the degree-p Laplacian on the degree-m invariant block."""
    if m < 0:
        raise DomainError(f"degree must be non-negative, got {m}")
    if p not in (0, 1):
        raise UnsupportedDegreeError("blocks are assembled for the Laplacians on p = 0 and p = 1")
    if m > model.max_monomial_degree(p):
        raise DomainError(f"degree-{m} block is outside the Bergman space of {model.label()}")
    keys = block_keys(model, p, m)
    index = {k: i for i, k in enumerate(keys)}
    d = len(keys)
    a = np.zeros((d, d))
    for j, key in enumerate(keys):
        image = box_apply(FormCoefficients(model, p, {key: 1.0}))
        for k2, c in image.table.items():
            if k2 not in index:
                raise AccuracyError(f"Laplacian left the degree-{m} block at {k2}")
            a[index[k2], j] = c.real
    g = gram_matrix(model, keys, method)
    try:
        chol = np.linalg.cholesky(g)
    except np.linalg.LinAlgError as exc:
        raise AccuracyError(f"Gram matrix of the degree-{m} block is not positive definite") from exc
    ga = g @ a
    x = solve_triangular(chol, ga, lower=True)
    mat = solve_triangular(chol, x.T, lower=True).T
    return BlockOperator(model, m, p, keys, SymmetricMatrix.from_nearly_symmetric(mat, 1e-12), g, chol, a)


def random_form(model: Model, p: int, max_degree: int, rng: np.random.Generator,
                min_degree: int = 0, density: float = 0.6) -> FormCoefficients:
    """Random polynomial (p,0)-form with complex normal coefficients.

    Each admissible monomial is kept with probability ``density``; at least
    one term is always present.
    """
    top = int(min(max_degree, model.max_monomial_degree(p)))
    keys = [k for m in range(min_degree, top + 1) for k in block_keys(model, p, m)]
    if not keys:
        raise DomainError(f"no monomials of degree {min_degree}..{max_degree} for p={p}")
    keep = rng.random(len(keys)) < density
    keep[rng.integers(len(keys))] = True
    vals = rng.standard_normal(len(keys)) + 1j * rng.standard_normal(len(keys))
    return FormCoefficients(model, p, {k: v for k, v, f in zip(keys, vals, keep) if f})
