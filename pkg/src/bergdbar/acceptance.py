"""The acceptance suite: eleven end-to-end checks with fixed tolerances.

Each check returns a :class:`CriterionResult`; :func:`run_all` runs them in
order.  The ``reproduce`` CLI verb and ``tests/test_acceptance.py`` both call
into this module, so the numbers printed by one are the numbers asserted by
the other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .basis import CLOSED_FORM, QUADRATURE, norm_closed_form, norm_quadrature, verify_duality_identity
from .geometry import (
    basic_identity_diagnostic,
    builtin_profile,
    check_conformal_duality,
    check_kahler_duality,
    curvature_condition,
    curvature_threshold,
    exponential_conformal_profile,
    power_conformal_profile,
)
from .models import Cigar, ConformalStandard, HyperbolicExponential, Model, SegalBargmann
from .numerics import enumerate_multiindices, make_rule
from .operators import FormCoefficients, dbar, dbar_adjoint, inner, norm2, random_form
from .spectral import solve_dbar, spectrum, unboundedness_demo

SEED = 20240611


@dataclass(frozen=True)
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number:2d}. {self.title}: {self.detail}"

    def to_dict(self) -> dict:
        return {"criterion": self.number, "title": self.title, "passed": self.passed, "detail": self.detail}


# 1 -------------------------------------------------------------------------

def norm_duality_standard() -> CriterionResult:
    model = ConformalStandard(2, 1.5)
    worst_identity = 0.0
    worst_match = 0.0
    for m in range(7):
        for J in enumerate_multiindices(2, m):
            for k in (0, 1):
                worst_identity = max(worst_identity, verify_duality_identity(model, J, k, CLOSED_FORM))
                a = norm_closed_form(model, 1, J, k)
                b = norm_quadrature(model, 1, J, k)
                worst_match = max(worst_match, abs(a - b) / a)
                Jk = J.increment(k)
                a = norm_closed_form(model, 0, Jk)
                b = norm_quadrature(model, 0, Jk)
                worst_match = max(worst_match, abs(a - b) / a)
    ok = worst_identity < 1e-12 and worst_match < 1e-8
    return CriterionResult(1, "norm duality, standard weight", ok,
                           f"identity residual {worst_identity:.2e} (< 1e-12), closed vs quadrature {worst_match:.2e} (< 1e-8)")


# 2 -------------------------------------------------------------------------

def norm_duality_exponential() -> CriterionResult:
    worst = 0.0
    for alpha in (0.5, 1.0, 2.0):
        model = HyperbolicExponential(1, alpha)
        for k in range(21):
            worst = max(worst, verify_duality_identity(model, (k,), 0, QUADRATURE))
    return CriterionResult(2, "norm duality, exponential weight", worst < 1e-8,
                           f"max residual {worst:.2e} (< 1e-8) over alpha in {{0.5, 1, 2}}, k <= 20")


# 3 -------------------------------------------------------------------------

def hyperbolic_spectrum() -> CriterionResult:
    n, alpha, mmax = 2, 1.0, 6
    report = spectrum(HyperbolicExponential(n, alpha), mmax)
    dev = max(abs(v - alpha * (b.m + 1)) for b in report.blocks for v in b.eigenvalues)
    mult_ok = True
    for value, mult in report.aggregated():
        k = round(value / alpha)
        mult_ok &= abs(value - alpha * k) < 1e-10 and mult == n * math.comb(n + k - 2, n - 1)
    ok = dev < 1e-10 and mult_ok
    mults = ", ".join(f"{v:g}x{m}" for v, m in report.aggregated())
    return CriterionResult(3, "hyperbolic spectrum", ok,
                           f"max deviation {dev:.2e} (< 1e-10), multiplicities {mults} (expected 2k)")


# 4 -------------------------------------------------------------------------

def standard_spectrum() -> CriterionResult:
    block = spectrum(ConformalStandard(2, 1.0), 1).blocks[1]
    target = np.array([2.0, 2.0, 2.0, 4.0])
    dev_m1 = float(np.max(np.abs(np.array(block.eigenvalues) - target)))
    dev_min = 0.0
    excess = -math.inf
    for n in (1, 2, 3):
        for gamma in (0.5, 1.0, 2.5):
            for b in spectrum(ConformalStandard(n, gamma), 6).blocks:
                dev_min = max(dev_min, abs(b.eigenvalues[0] - (b.m + 1) * gamma))
                excess = max(excess, b.eigenvalues[-1] - (gamma + b.m * (2 + gamma)))
    # the upper bound is attained at m = 0 and m = 1, so it is checked as <= (to 1e-9)
    ok = dev_m1 < 1e-10 and dev_min < 1e-9 and excess <= 1e-9
    return CriterionResult(4, "standard-weight spectrum", ok,
                           f"m=1 block deviation {dev_m1:.2e}, minimum deviation {dev_min:.2e}, "
                           f"max - (gamma + m(2+gamma)) peaks at {excess:.2e} (<= 1e-9)")


# 5, 6 ----------------------------------------------------------------------

def _solver_protocol(model: Model, rng: np.random.Generator, trials: int = 5) -> tuple[bool, str]:
    n = model.n
    eta = FormCoefficients.from_terms(model, 1, [((0,) * n, 0, 1.0)])
    rep = solve_dbar(model, eta)
    equality = abs(rep.norm_ratio - 1.0)
    worst_res = worst_orth = 0.0
    max_ratio = 0.0
    bound_ok = True
    for _ in range(trials):
        g = random_form(model, 0, 6, rng, min_degree=2)
        eta = dbar(g)
        r = solve_dbar(model, eta)
        worst_res = max(worst_res, r.residual_dbar)
        worst_orth = max(worst_orth, r.orthogonality_defect)
        max_ratio = max(max_ratio, r.norm_ratio)
        bound_ok &= r.f_norm2 <= r.eta_norm2 / r.sharp_constant * (1 + 1e-12)
    ok = equality < 1e-10 and worst_res < 1e-9 and worst_orth < 1e-10 and bound_ok and max_ratio < 1.0
    detail = (f"constant eta ratio off by {equality:.2e} (< 1e-10); random eta: residual {worst_res:.2e}, "
              f"<f,1> {worst_orth:.2e}, c|f|^2/|eta|^2 <= {max_ratio:.6f}")
    return ok, detail


def sharp_solver_standard() -> CriterionResult:
    ok, detail = _solver_protocol(ConformalStandard(2, 1.0), np.random.default_rng(SEED))
    return CriterionResult(5, "sharp solver estimate, standard weight", ok, detail)


def sharp_solver_hyperbolic() -> CriterionResult:
    ok, detail = _solver_protocol(HyperbolicExponential(2, 1.5), np.random.default_rng(SEED + 1))
    return CriterionResult(6, "sharp solver estimate, exponential weight", ok, detail)


# 7 -------------------------------------------------------------------------

def cigar_model() -> CriterionResult:
    model = Cigar(alpha=5.0)
    dim = int(model.max_monomial_degree(0)) + 1
    s0 = spectrum(model, 20, p=0).aggregated()
    s1 = spectrum(model, 20, p=1).aggregated()

    def matches(found, expected):
        return len(found) == len(expected) and all(
            m == 1 and abs(v - e) < 1e-10 for (v, m), e in zip(found, expected))

    ok = dim == 5 and matches(s0, [0, 5, 10, 15, 20]) and matches(s1, [5, 10, 15, 20])
    fmt = lambda s: "{" + ", ".join(f"{v:.10g}" for v, _ in s) + "}"
    return CriterionResult(7, "cigar model", ok, f"dim {dim}, box0 {fmt(s0)}, box1 {fmt(s1)}")


# 8 -------------------------------------------------------------------------

def unboundedness() -> CriterionResult:
    alpha, N = 1.0, 10**5
    demo = unboundedness_demo(HyperbolicExponential(1, alpha), N)
    growth = demo.d_partial_sum / (alpha * math.log(N))
    ok = abs(growth - 1.0) < 0.05 and demo.max_ratio_error < 1e-8
    return CriterionResult(8, "unboundedness of d", ok,
                           f"S_N/(alpha ln N) = {growth:.4f} at N = 1e5 (within 5%), "
                           f"ratio identity error {demo.max_ratio_error:.2e} for k <= 30 (< 1e-8)")


# 9 -------------------------------------------------------------------------

def geometry_audit() -> CriterionResult:
    checks = []
    hyp = HyperbolicExponential(2, 1.5)
    checks.append((check_kahler_duality(builtin_profile(hyp), hyp.n), hyp.duality_constant()))
    std = ConformalStandard(2, 1.5)
    checks.append((check_conformal_duality(builtin_profile(std), std.n), std.duality_constant()))
    alpha = 0.7
    checks.append((check_conformal_duality(power_conformal_profile(2, alpha), 2), -alpha))
    checks.append((check_conformal_duality(exponential_conformal_profile(alpha), 2), -alpha))
    const_err = max(abs((r.holomorphicity_constant if r.holomorphicity_constant is not None else math.inf) - c)
                    for r, c in checks)
    defect = max(r.constancy_defect for r, _ in checks)
    thr_err = 0.0
    for n, a in ((1, 3.0), (2, 5.0), (3, 4.5)):
        model = HyperbolicExponential(n, a)
        thr_err = max(thr_err, abs(curvature_threshold(model, -10.0, 10.0) - (a - n - 1)))
    worst_at_09 = -math.inf
    for sigma in (1.1, 2.0, 10.0):
        for eps in (1e-6, 0.1, 1.0):
            v = float(curvature_condition(ConformalStandard(2, 1.0), eps, sigma, grid=[0.81])[0])
            worst_at_09 = max(worst_at_09, v)
    ok = const_err < 1e-10 and defect < 1e-8 and thr_err < 1e-6 and worst_at_09 < 0
    return CriterionResult(9, "geometry audit", ok,
                           f"duality constants off by {const_err:.2e}, defect {defect:.2e}; "
                           f"threshold error {thr_err:.2e}; largest min-eigenvalue at |z| = 0.9 is {worst_at_09:.3g} (< 0)")


# 10 ------------------------------------------------------------------------

ADJOINTNESS_MODELS: tuple[Model, ...] = (
    SegalBargmann(2),
    HyperbolicExponential(2, 1.5),
    ConformalStandard(2, 1.5),
    Cigar(alpha=5.0),
)


def adjointness_defect(u: FormCoefficients, v: FormCoefficients) -> float:
    """|<du, v> - <u, adj(d) v>| relative to |du| |v|."""
    du = dbar(u)
    lhs = inner(du, v)
    rhs = inner(u, dbar_adjoint(v))
    scale = math.sqrt(norm2(du) * norm2(v)) + math.sqrt(norm2(u) * norm2(dbar_adjoint(v)))
    return abs(lhs - rhs) / scale if scale > 0 else abs(lhs - rhs)


def adjointness(pairs: int = 100) -> CriterionResult:
    rng = np.random.default_rng(SEED + 2)
    worst = 0.0
    count = 0
    for model in ADJOINTNESS_MODELS:
        for p in (0, 1):
            if p + 1 > model.n:
                continue
            for _ in range(pairs):
                u = random_form(model, p, 4, rng)
                v = random_form(model, p + 1, 3, rng)
                worst = max(worst, adjointness_defect(u, v))
                count += 1
    return CriterionResult(10, "adjointness of d", worst < 1e-9,
                           f"max relative defect {worst:.2e} (< 1e-9) over {count} random pairs")


# 11 ------------------------------------------------------------------------

def _gradient_oracle(k: int) -> float:
    # pi * int_0^inf k^2 t^(k-1) e^-t dt by Gauss-Laguerre
    if k == 0:
        return 0.0
    rule = make_rule("gauss-laguerre", 20)
    return math.pi * rule.apply(lambda t: k * k * t ** (k - 1))


def basic_identity() -> CriterionResult:
    model = SegalBargmann(1)
    worst = 0.0
    nonneg = True
    constants = []
    for k in range(6):
        u = FormCoefficients.from_terms(model, 1, [((k,), 0, 1.0)])
        terms = basic_identity_diagnostic(model, u)
        oracle = _gradient_oracle(k)
        nonneg &= terms.gradient_term >= -1e-8
        err = abs(terms.gradient_term - oracle) / oracle if oracle else abs(terms.gradient_term)
        worst = max(worst, err)
        if terms.constant is not None:
            constants.append(terms.constant)
    ok = nonneg and worst < 1e-6
    return CriterionResult(11, "basic-identity diagnostic", ok,
                           f"G vs oracle {worst:.2e} (< 1e-6), G >= 0: {nonneg}, "
                           f"measured gradient constant {np.mean(constants):.6f}")


CRITERIA: tuple[Callable[[], CriterionResult], ...] = (
    norm_duality_standard,
    norm_duality_exponential,
    hyperbolic_spectrum,
    standard_spectrum,
    sharp_solver_standard,
    sharp_solver_hyperbolic,
    cigar_model,
    unboundedness,
    geometry_audit,
    adjointness,
    basic_identity,
)


def run_all(echo: Callable[[str], None] | None = None) -> list[CriterionResult]:
    out = []
    for fn in CRITERIA:
        res = fn()
        if echo is not None:
            echo(res.line())
        out.append(res)
    return out
