"""Spectra of the Laplacians block by block, the Neumann operator and the canonical solution."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .basis import hyperbolic_norms_batch
from .errors import (
    AccuracyError,
    ClosednessError,
    DomainError,
    ParseError,
    SingularBlockError,
    UnsupportedModelError,
)
from .models import HyperbolicExponential, Model
from .numerics import CLUSTER_RTOL, MultiIndex, cluster_eigenvalues, eigh
from .operators import FormCoefficients, assemble_block, dbar, dbar_adjoint, inner, norm2

DEFAULT_MMAX = 8


@dataclass(frozen=True)
class BlockSpectrum:
    m: int
    order: int
    eigenvalues: tuple
    clusters: tuple          # (value, multiplicity)
    gershgorin: tuple        # (lower, upper)


@dataclass(frozen=True)
class SpectralReport:
    model: Model
    p: int
    m_max: int
    blocks: tuple

    @property
    def eigenvalues(self) -> list[tuple[float, int, int]]:
        """(value, multiplicity, block) for every cluster of every block."""
        return [(v, mult, b.m) for b in self.blocks for v, mult in b.clusters]

    @property
    def all_eigenvalues(self) -> list[float]:
        return sorted(v for b in self.blocks for v in b.eigenvalues)

    @property
    def lambda_min(self) -> float:
        return min(b.eigenvalues[0] for b in self.blocks)

    def aggregated(self) -> list[tuple[float, int]]:
        """Clusters over all blocks: eigenvalue and total multiplicity."""
        return cluster_eigenvalues(self.all_eigenvalues, CLUSTER_RTOL)

    def to_dict(self) -> dict:
        return {
            "model": self.model.to_dict(),
            "operator": f"box{self.p}",
            "m_max": self.m_max,
            "lambda_min": self.lambda_min,
            "eigenvalues": self.all_eigenvalues,
            "aggregated": [{"value": v, "multiplicity": k} for v, k in self.aggregated()],
            "blocks": [
                {
                    "m": b.m,
                    "order": b.order,
                    "eigenvalues": list(b.eigenvalues),
                    "clusters": [{"value": v, "multiplicity": k} for v, k in b.clusters],
                    "gershgorin": list(b.gershgorin),
                }
                for b in self.blocks
            ],
        }


def _block_spectrum(model: Model, m: int, p: int) -> BlockSpectrum:
    block = assemble_block(model, m, p)
    w, _ = eigh(block.matrix)
    return BlockSpectrum(m, block.order, tuple(float(x) for x in w), tuple(cluster_eigenvalues(w)), block.gershgorin())


def _check_hyperbolic(model: HyperbolicExponential, blocks, p: int) -> None:
    n, a = model.n, model.alpha
    for b in blocks:
        expected = a * (b.m + (1 if p == 1 else 0))
        if any(abs(x - expected) > 1e-8 * (1 + expected) for x in b.eigenvalues):
            raise AccuracyError(f"hyperbolic block m={b.m} deviates from the eigenvalue {expected}")
        if p == 1 and b.order != n * math.comb(n + b.m - 1, n - 1):
            raise AccuracyError(f"hyperbolic block m={b.m} has order {b.order}")


def spectrum(model: Model, m_max: int = DEFAULT_MMAX, p: int = 1, workers: int = 1) -> SpectralReport:
    """Eigenvalues of the degree-p Laplacian on the blocks m = 0..m_max.

    Blocks are independent; with ``workers > 1`` they run in a thread pool and
    are collected in block order, so the report does not depend on scheduling.
    For the cigar model the blocks stop at the top of the finite-dimensional space.
    """
    if m_max < 0:
        raise DomainError(f"m_max must be non-negative, got {m_max}")
    top = int(min(m_max, model.max_monomial_degree(p)))
    degrees = list(range(top + 1))
    if workers > 1 and len(degrees) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(lambda m: _block_spectrum(model, m, p), degrees))
    else:
        blocks = [_block_spectrum(model, m, p) for m in degrees]
    if isinstance(model, HyperbolicExponential):
        _check_hyperbolic(model, blocks, p)
    return SpectralReport(model, p, top, tuple(blocks))


def neumann_apply(model: Model, eta: FormCoefficients, kernel_tol: float = 1e-12) -> FormCoefficients:
    """Inverse of the Laplacian, block by block through its eigendecomposition."""
    if eta.model != model:
        raise DomainError("form belongs to a different model")
    if eta.p not in (0, 1):
        raise DomainError("the Neumann operator is applied to (0,0)- or (1,0)-forms")
    out = FormCoefficients.zero(model, eta.p)
    for m in eta.degrees():
        block = assemble_block(model, m, eta.p)
        w, v = eigh(block.matrix)
        small = np.abs(w) <= kernel_tol * max(1.0, float(np.max(np.abs(w))))
        if np.any(small):
            kernel = [block.from_orthonormal(v[:, i]) for i in np.flatnonzero(small)]
            raise SingularBlockError(
                f"degree-{m} block of box{eta.p} is singular for {model.label()}; "
                f"kernel spanned by {[sorted(k.table) for k in kernel]}",
                kernel=kernel,
            )
        y = block.to_orthonormal(eta.restrict(m))
        x = v @ ((v.T @ y) / w)
        out = out + block.from_orthonormal(x)
    return out


@dataclass(frozen=True)
class SolveReport:
    model: Model
    eta: FormCoefficients
    f: FormCoefficients
    residual_dbar: float
    norm_ratio: float
    orthogonality_defect: float
    f_norm2: float
    eta_norm2: float
    sharp_constant: float
    generic_bound_holds: bool = field(default=True)

    def to_dict(self) -> dict:
        return {
            "model": self.model.to_dict(),
            "eta": form_to_json(self.eta),
            "f": form_to_json(self.f),
            "residual_dbar": self.residual_dbar,
            "norm_ratio": self.norm_ratio,
            "orthogonality_defect": self.orthogonality_defect,
            "f_norm2": self.f_norm2,
            "eta_norm2": self.eta_norm2,
            "sharp_constant": self.sharp_constant,
            "generic_bound_holds": self.generic_bound_holds,
        }


def check_closed(eta: FormCoefficients, rtol: float = 1e-12) -> None:
    d_eta = dbar(eta)
    tol = rtol * (1.0 + eta.max_abs())
    for (J, I), c in sorted(d_eta.table.items(), key=lambda kv: -abs(kv[1])):
        if abs(c) > tol:
            j, k = I
            raise ClosednessError(
                f"d(eta) != 0: coefficient {c:.3g} of z^{tuple(J)} dz^{j + 1}^dz^{k + 1}; "
                f"need d eta_{j + 1}/dz^{k + 1} = d eta_{k + 1}/dz^{j + 1}",
                offending=(j, k),
            )
        break


def solve_dbar(model: Model, eta: FormCoefficients) -> SolveReport:
    """Canonical (minimal-norm) solution f = adj(N eta) of d f = eta."""
    if eta.p != 1:
        raise DomainError("the right-hand side must be a (1,0)-form")
    check_closed(eta)
    f = dbar_adjoint(neumann_apply(model, eta))
    residual = (dbar(f) - eta).max_abs()
    f2, e2 = norm2(f), norm2(eta)
    c = model.sharp_constant()
    ratio = c * f2 / e2 if e2 > 0 else 0.0
    one = FormCoefficients(model, 0, {(MultiIndex((0,) * model.n), ()): 1.0})
    defect = abs(inner(f, one)) / math.sqrt(norm2(one) * f2) if f2 > 0 else 0.0
    # the generic estimate |f| <= b^(-1/2) |eta| with b the bottom eigenvalue
    generic = f2 <= e2 / c * (1 + 1e-9)
    return SolveReport(model, eta, f, residual, ratio, defect, f2, e2, c, generic)


def form_to_json(u: FormCoefficients) -> list[dict]:
    """Serialise with 1-based components: k for (1,0)-forms, [j, k] for (2,0)-forms."""
    rows = []
    for (J, I), c in sorted(u.table.items(), key=lambda kv: (kv[0][0].degree, tuple(-e for e in kv[0][0]), kv[0][1])):
        row = {"J": list(J)}
        if len(I) == 1:
            row["k"] = I[0] + 1
        elif len(I) == 2:
            row["k"] = [I[0] + 1, I[1] + 1]
        row["re"] = float(c.real)
        row["im"] = float(c.imag)
        rows.append(row)
    return rows


def form_from_json(model: Model, rows: list, p: int = 1) -> FormCoefficients:
    terms = []
    try:
        for row in rows:
            c = complex(float(row.get("re", 0.0)), float(row.get("im", 0.0)))
            if p == 0:
                comp = None
            elif p == 1:
                comp = int(row["k"]) - 1
            else:
                comp = (int(row["k"][0]) - 1, int(row["k"][1]) - 1)
            terms.append((row["J"], comp, c))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed form entry: {exc}") from exc
    return FormCoefficients.from_terms(model, p, terms)


@dataclass(frozen=True)
class UnboundednessDemo:
    alpha: float
    N: int
    d_partial_sum: float          # sum_{k=1..N} d_k^2 / c_{k+1}^2
    adjoint_partial_sum: float    # sum_{k=1..N} alpha^2 c_k^2 / (k^2 d_{k-1}^2)
    d_closed_form: float          # sum alpha / (k + 1)
    adjoint_closed_form: float    # sum alpha / k
    max_ratio_error: float        # max_k |d_k^2/c_{k+1}^2 * (k+1)/alpha - 1|, k <= ratio_check


def unboundedness_demo(model: HyperbolicExponential, N: int, ratio_check: int = 30) -> UnboundednessDemo:
    """Partial sums showing that d and its adjoint are unbounded (n = 1).

    Both sums are built from quadrature norm constants and compared with
    their harmonic-series closed forms.
    """
    if not isinstance(model, HyperbolicExponential) or model.n != 1:
        raise UnsupportedModelError("the demonstration is for the one-dimensional exponential weight")
    if N < 10:
        raise DomainError(f"need N >= 10, got {N}")
    a = float(model.alpha)
    ln_c2, ln_d2 = hyperbolic_norms_batch(model, N + 1)
    k = np.arange(0, N + 1)
    # H_k^2 = d_k^2 / c_{k+1}^2,  h_k^2 = alpha^2 c_k^2 / (k^2 d_{k-1}^2)
    big_h = np.exp(ln_d2[:N + 1] - ln_c2[1:N + 2])
    kk = k[1:]
    small_h = a * a * np.exp(ln_c2[1:N + 1] - ln_d2[0:N]) / kk**2
    s_d = float(np.sum(big_h[1:N + 1]))
    s_adj = float(np.sum(small_h))
    closed_d = float(np.sum(a / (kk + 1.0)))
    closed_adj = float(np.sum(a / kk))
    top = min(ratio_check, N)
    err = float(np.max(np.abs(big_h[: top + 1] * (k[: top + 1] + 1) / a - 1.0)))
    return UnboundednessDemo(a, N, s_d, s_adj, closed_d, closed_adj, err)
