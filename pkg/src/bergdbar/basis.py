"""Norm constants of monomial forms z^J dz^I, closed form and by radial quadrature.

All integrals reduce to a radial moment through polar coordinates,

    integral of |z^P|^2 g(|z|^2) d(lambda) = pi^n P! / (|P| + n - 1)! * integral_0^R t^(|P|+n-1) g(t) dt,

so the squared norm of a monomial form is an exact angular factor times

    R(k, p) = integral t^k s(t)^p rho(t) dt,

where s is the metric scale and rho the weight density of the model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Mapping

import numpy as np

from .errors import AccuracyError, DivergenceError, DomainError, UnsupportedModelError
from .models import Cigar, ConformalStandard, HyperbolicExponential, Model, SegalBargmann
from .numerics import MultiIndex, RuleKind, enumerate_multiindices, ln_factorial, ln_gamma, make_rule

DEFAULT_NODES = 25
MAX_NODES = 200
TARGET_RTOL = 1e-12
FAIL_RTOL = 1e-6

CLOSED_FORM = "closed_form"
QUADRATURE = "quadrature"
AUTO = "auto"


def has_closed_form(model: Model) -> bool:
    return isinstance(model, (SegalBargmann, ConformalStandard))


def ln_angular_factor(n: int, P: MultiIndex) -> float:
    return n * math.log(math.pi) + P.ln_factorial() - ln_factorial(P.degree + n - 1)


# radial integration --------------------------------------------------------


def _substitution_power(e: float) -> int:
    # t = 1 - u^q turns an endpoint factor (1-t)^(e-1) dt into q u^(q e - 1) du;
    # integer e needs nothing, otherwise push the singular power high
    if float(e).is_integer():
        return 1
    return max(1, math.ceil(32.0 / e))


def integrate_radial(model: Model, g: Callable[[np.ndarray], np.ndarray], n_nodes: int) -> float:
    """integral over the model domain of g(t) rho(t) dt with a fixed node count."""
    if isinstance(model, SegalBargmann):
        rule = make_rule(RuleKind.GAUSS_LAGUERRE, n_nodes)
        return rule.apply(g)
    if isinstance(model, HyperbolicExponential):
        # t = s / (alpha + s) maps the weight onto exp(-s) on [0, inf)
        a, n = float(model.alpha), model.n
        rule = make_rule(RuleKind.GAUSS_LAGUERRE, n_nodes)

        def f(s):
            return g(s / (a + s)) * np.exp((n - 1) * np.log(a + s) - n * math.log(a) - a)

        return rule.apply(f)
    if isinstance(model, ConformalStandard):
        q = _substitution_power(model.gamma)
        rule = make_rule(RuleKind.GAUSS_LEGENDRE, n_nodes)
        e = q * model.gamma - 1.0
        return rule.apply(lambda u: q * u**e * g(1.0 - u**q))
    if isinstance(model, Cigar):
        # t = s / (1 - s), then s = 1 - u^q
        q = _substitution_power(model.alpha)
        rule = make_rule(RuleKind.GAUSS_LEGENDRE, n_nodes)
        e = q * model.alpha - 1.0
        return rule.apply(lambda u: q * u**e * g((1.0 - u**q) / u**q))
    raise UnsupportedModelError(f"no radial integrator for {model!r}")


def converged_quadrature(fn: Callable[[int], float], n_nodes: int = DEFAULT_NODES) -> float:
    """Evaluate fn(N) for N, 2N, ... until successive values agree.

    Doubling stops once the relative change drops below TARGET_RTOL or N
    reaches MAX_NODES; a final change above FAIL_RTOL raises AccuracyError.
    """
    if n_nodes < 10:
        raise DomainError(f"need at least 10 nodes, got {n_nodes}")
    n = n_nodes
    prev = fn(n)
    while True:
        cur = fn(2 * n)
        rel = abs(cur - prev) / abs(cur) if cur != 0 else abs(cur - prev)
        n *= 2
        if rel <= TARGET_RTOL or n >= MAX_NODES:
            break
        prev = cur
    if not math.isfinite(cur) or rel > FAIL_RTOL:
        raise AccuracyError(f"radial quadrature did not converge: relative change {rel:.2e} at N={n}")
    return cur


def _check_integrable(model: Model, k: int, p: int) -> None:
    if isinstance(model, Cigar) and not (model.alpha - k - p - 1 > -1):
        raise DivergenceError(
            f"t^{k} (1+t)^({p} - alpha - 1) is not integrable on [0, inf) for alpha={model.alpha:g}"
        )


@lru_cache(maxsize=8192)
def ln_radial_moment_closed(model: Model, k: int, p: int) -> float:
    """ln of integral t^k s(t)^p rho(t) dt from Gamma functions."""
    if isinstance(model, SegalBargmann):
        return ln_factorial(k)
    if isinstance(model, ConformalStandard):
        b = model.gamma + p
        return ln_gamma(k + 1.0) + ln_gamma(b) - ln_gamma(k + 1.0 + b)
    raise UnsupportedModelError(
        f"no closed form for {model.label()}; use norm_quadrature instead"
    )


@lru_cache(maxsize=8192)
def _radial_moment_quadrature(model: Model, k: int, p: int, n_nodes: int) -> float:
    _check_integrable(model, k, p)
    if isinstance(model, HyperbolicExponential):
        a, n = float(model.alpha), model.n

        # integrand in s written to keep every factor bounded
        def fn(N):
            rule = make_rule(RuleKind.GAUSS_LAGUERRE, N)

            def f(s):
                return np.exp(
                    k * np.log(s / (a + s)) + (n - 1 - p) * np.log(a + s) + (p - n) * math.log(a) - a
                )

            return rule.apply(f)

        return converged_quadrature(fn, n_nodes)

    def g(t):
        return t**k * model._scale(t) ** p

    return converged_quadrature(lambda N: integrate_radial(model, g, N), n_nodes)


def ln_radial_moment_quadrature(model: Model, k: int, p: int, n_nodes: int = DEFAULT_NODES) -> float:
    val = _radial_moment_quadrature(model, k, p, n_nodes)
    if not val > 0:
        raise AccuracyError(f"non-positive radial moment {val!r} for k={k}, p={p}")
    return math.log(val)


def ln_radial_moment(model: Model, k: int, p: int, method: str = AUTO, n_nodes: int = DEFAULT_NODES) -> float:
    if method == CLOSED_FORM or (method == AUTO and has_closed_form(model)):
        return ln_radial_moment_closed(model, k, p)
    if method in (QUADRATURE, AUTO):
        return ln_radial_moment_quadrature(model, k, p, n_nodes)
    raise DomainError(f"unknown method {method!r}")


def monomial_moment(model: Model, P: MultiIndex, p: int, method: str = AUTO, n_nodes: int = DEFAULT_NODES) -> float:
    """integral of |z^P|^2 s(t)^p d(mu)."""
    n = model.n
    return math.exp(ln_angular_factor(n, P) + ln_radial_moment(model, P.degree + n - 1, p, method, n_nodes))


# pairings of monomial forms ------------------------------------------------


def _pairing_terms(model: Model, J: MultiIndex, I: tuple, K: MultiIndex, L: tuple):
    """Pointwise <z^J dz^I, z^K dz^L>_h / s^p as signed products z^P conj(z^Q)."""
    p = len(I)
    terms = []
    if I == L:
        terms.append((1.0, J, K))
    if model.kappa == 0 or p == 0:
        return terms
    kap = float(model.kappa)
    if p == 1:
        (a,), (b,) = I, L
        terms.append((-kap, J.increment(a), K.increment(b)))
        return terms
    if p == 2:
        (r, s), (pp, q) = I, L
        if r == pp:
            terms.append((-kap, J.increment(s), K.increment(q)))
        if s == q:
            terms.append((-kap, J.increment(r), K.increment(pp)))
        if r == q:
            terms.append((kap, J.increment(s), K.increment(pp)))
        if s == pp:
            terms.append((kap, J.increment(r), K.increment(q)))
        return terms
    raise DomainError(f"form degree {p} not supported")


def pair(model: Model, key_a, key_b, method: str = AUTO, n_nodes: int = DEFAULT_NODES) -> float:
    """<z^J dz^I, z^K dz^L> in the weighted L^2 space of (p,0)-forms."""
    (J, I), (K, L) = key_a, key_b
    if len(I) != len(L):
        raise DomainError("pairing of forms of different degree")
    p = len(I)
    total = 0.0
    for c, P, Q in _pairing_terms(model, J, I, K, L):
        if P == Q:
            total += c * monomial_moment(model, P, p, method, n_nodes)
    return total


def gram_matrix(model: Model, keys: list, method: str = AUTO, n_nodes: int = DEFAULT_NODES) -> np.ndarray:
    d = len(keys)
    g = np.zeros((d, d))
    for i in range(d):
        for j in range(i, d):
            if model.kappa == 0 and keys[i] != keys[j]:
                continue
            g[i, j] = g[j, i] = pair(model, keys[i], keys[j], method, n_nodes)
    return g


def inner_product(model: Model, u: Mapping, v: Mapping, method: str = AUTO) -> complex:
    """(u, v) = sum u_a conj(v_b) <e_a, e_b> for coefficient tables keyed by (J, I)."""
    total = 0j
    if model.kappa == 0:
        for key, a in u.items():
            b = v.get(key)
            if b:
                total += a * np.conj(b) * pair(model, key, key, method)
        return complex(total)
    by_degree: dict[int, list] = {}
    for key, b in v.items():
        by_degree.setdefault(key[0].degree, []).append((key, b))
    for ka, a in u.items():
        for kb, b in by_degree.get(ka[0].degree, ()):
            total += a * np.conj(b) * pair(model, ka, kb, method)
    return complex(total)


def norm_squared(model: Model, u: Mapping, method: str = AUTO) -> float:
    return inner_product(model, u, u, method).real


# public norm-constant operations ---------------------------------------------


def _key(model: Model, p: int, J, k) -> tuple:
    J = MultiIndex(J)
    if len(J) != model.n:
        raise DomainError(f"multi-index {tuple(J)} has wrong length for n={model.n}")
    if p == 0:
        return (J, ())
    if p == 1:
        if not 0 <= int(k) < model.n:
            raise DomainError(f"component {k} out of range for n={model.n}")
        return (J, (int(k),))
    if p == 2:
        j, kk = sorted(int(x) for x in k)
        if j == kk or not (0 <= j and kk < model.n):
            raise DomainError(f"invalid (2,0) component {k!r}")
        return (J, (j, kk))
    raise DomainError(f"form degree must be 0, 1 or 2, got {p!r}")


def norm_closed_form(model: Model, p: int, J, k=None) -> float:
    """Squared norm of z^J dz^k (p=1) or z^J (p=0) from Gamma-function ratios."""
    if not has_closed_form(model):
        raise UnsupportedModelError(
            f"no closed-form norms for {model.label()}; use norm_quadrature"
        )
    if p not in (0, 1):
        raise DomainError("closed-form norms are provided for p = 0 and p = 1")
    key = _key(model, p, J, 0 if k is None else k)
    return pair(model, key, key, CLOSED_FORM)


def norm_quadrature(model: Model, p: int, J, k=None, n_nodes: int = DEFAULT_NODES) -> float:
    """Squared norm of z^J dz^k by radial quadrature (diagonal Gram entry)."""
    if n_nodes < 10:
        raise DomainError(f"need at least 10 nodes, got {n_nodes}")
    key = _key(model, p, J, 0 if k is None else k)
    return pair(model, key, key, QUADRATURE, n_nodes)


def norm(model: Model, p: int, J, k=None, method: str = AUTO) -> float:
    key = _key(model, p, J, 0 if k is None else k)
    return pair(model, key, key, method)


def verify_duality_identity(model: Model, J, k: int, method: str = AUTO) -> float:
    """Relative residual of  c |z^(J+e_k)|^2 = (d z^(J+e_k), z^J dz^k).

    For the conformally flat models the right side is (j_k + 1) |z^J dz^k|^2;
    for the hyperbolic metric the basis is not orthogonal and the full
    pairing is used.
    """
    J = MultiIndex(J)
    key = _key(model, 1, J, k)
    Jk = J.increment(k)
    c = model.duality_constant()
    lhs = c * pair(model, (Jk, ()), (Jk, ()), method)
    rhs = 0.0
    for i, e in enumerate(Jk):
        if e:
            rhs += e * pair(model, (Jk.decrement(i), (i,)), key, method)
    return abs(lhs - rhs) / pair(model, key, key, method)


@dataclass(frozen=True)
class NormTable:
    model: Model
    p: int
    method: str
    entries: Mapping = field(repr=False)     # (J, I) -> squared norm
    log_entries: Mapping = field(repr=False)  # (J, I) -> ln squared norm

    def __getitem__(self, key):
        return self.entries[key]

    def __len__(self):
        return len(self.entries)


def _components(n: int, p: int) -> list[tuple]:
    if p == 0:
        return [()]
    if p == 1:
        return [(k,) for k in range(n)]
    return [(j, k) for j in range(n) for k in range(j + 1, n)]


def block_keys(model: Model, p: int, m: int) -> list[tuple]:
    """Basis of the degree-m block: J in enumeration order, then component ascending."""
    return [(J, I) for J in enumerate_multiindices(model.n, m) for I in _components(model.n, p)]


def norm_table(model: Model, p: int, max_degree: int, method: str = AUTO) -> NormTable:
    entries, logs = {}, {}
    top = min(max_degree, model.max_monomial_degree(p))
    for m in range(int(top) + 1):
        for key in block_keys(model, p, m):
            val = pair(model, key, key, method)
            entries[key] = val
            logs[key] = math.log(val)
    used = method if method != AUTO else (CLOSED_FORM if has_closed_form(model) else QUADRATURE)
    return NormTable(model, p, used, entries, logs)


def e_normalization_discrepancy(model: HyperbolicExponential, J) -> float:
    """Ratio of |z^J|^2 to the squared inverse of the printed e_J constant.

    The orthonormal basis printed for the exponential weight is
    e_J = (|J|+n-1)! / (sqrt(a_|J|) pi^(n/2) J!) z^J; a value of 1 here means
    that normalization is consistent with the computed norm.
    """
    J = MultiIndex(J)
    n = model.n
    ln_a = ln_radial_moment_quadrature(model, J.degree + n - 1, 0)
    ln_norm = math.log(norm_quadrature(model, 0, J))
    # |e_J|^2 = 1  <=>  |z^J|^2 = a pi^n (J!)^2 / ((|J|+n-1)!)^2
    ln_printed = ln_a + n * math.log(math.pi) + 2 * J.ln_factorial() - 2 * ln_factorial(J.degree + n - 1)
    return math.exp(ln_norm - ln_printed)


def hyperbolic_norms_batch(model: HyperbolicExponential, k_max: int, n_nodes: int = 240, chunk: int = 2048):
    """ln c_k^2 and ln d_k^2 for k = 0..k_max in one dimension, vectorised.

    c_k^2 = pi a^-1 e^-a int (s/(a+s))^k e^-s ds and
    d_k^2 = pi a e^-a int s^k (a+s)^-(k+2) e^-s ds (Gauss-Laguerre); the two
    node counts n_nodes/2 and n_nodes (or n_nodes and 2 n_nodes) must agree
    to FAIL_RTOL.
    """
    if model.n != 1:
        raise UnsupportedModelError("batch norms are implemented for n = 1")
    a = float(model.alpha)
    ks = np.arange(k_max + 1, dtype=float)[:, None]

    def batch(N):
        rule = make_rule(RuleKind.GAUSS_LAGUERRE, N)
        out_c, out_d = [], []
        for start in range(0, k_max + 1, chunk):
            k = ks[start:start + chunk]
            # the integrands peak near s = sqrt(a k); s = beta x keeps the peak
            # inside the range where Laguerre weights are representable
            beta = max(1.0, math.sqrt(a * float(k[-1, 0])) / 250.0)
            x = rule.nodes[None, :]
            s = beta * x
            lw = np.log(rule.weights)[None, :] - (beta - 1.0) * x + math.log(beta)
            base = np.log(s / (a + s))
            out_c.append(_logsumexp(k * base + lw))
            out_d.append(_logsumexp(k * base - 2.0 * np.log(a + s) + lw))
        ln_c = np.concatenate(out_c) + math.log(math.pi) - math.log(a) - a
        ln_d = np.concatenate(out_d) + math.log(math.pi) + math.log(a) - a
        return ln_c, ln_d

    # sharp peaks (large alpha * k) need a finer rule; double once before giving up
    c1, d1 = batch(n_nodes // 2)
    for N in (n_nodes, 2 * n_nodes):
        c2, d2 = batch(N)
        worst = float(max(np.max(np.abs(np.expm1(c2 - c1))), np.max(np.abs(np.expm1(d2 - d1)))))
        if worst <= FAIL_RTOL:
            return c2, d2
        c1, d1 = c2, d2
    raise AccuracyError(f"batch norms did not converge: relative change {worst:.2e}")


def _logsumexp(x: np.ndarray) -> np.ndarray:
    top = np.max(x, axis=1)
    return top + np.log(np.sum(np.exp(x - top[:, None]), axis=1))
