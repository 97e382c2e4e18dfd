"""Radial geometry audit: duality constants, torsion, curvature criterion, basic identity.

A radial profile is either a Kahler potential h(r) (metric i dd-bar h(|z|^2)) or
a conformal factor phi(r) (metric e^phi(|z|^2) delta), together with a weight
psi(r), all as functions of r = |z|^2.  Every (1,1)-form in this module has
the shape

    A(r) delta_jk + B(r) conj(z_j) z_k,

whose eigenvalues are A (tangential, multiplicity n - 1) and A + r B (radial),
so no n x n eigensolve is needed.  For a radial function F the form
i dd-bar F(|z|^2) has A = F' and B = F''.

Profiles are built from sympy expressions; derivatives of any order are exact
symbolic derivatives compiled with ``lambdify``.
"""

from __future__ import annotations

import ast
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np
import sympy as sp

from .basis import converged_quadrature, integrate_radial
from .numerics import RuleKind, make_rule
from .errors import DomainError, ParseError, PositivityError, UnsupportedModelError
from .models import Cigar, ConformalStandard, HyperbolicExponential, Model, SegalBargmann, parse_model
from .operators import FormCoefficients, dbar_adjoint, norm2

KAHLER = "kahler_potential"
CONFORMAL = "conformal_factor"

GRID_POINTS = 1000
BALL_MARGIN = 1e-6
PLANE_RADIUS = 50.0
CONSTANCY_TOL = 1e-8

R = sp.Symbol("r", nonnegative=True)


# ---------------------------------------------------------------------------
# expression grammar for user profiles

_BINOPS = {ast.Add: sp.Add, ast.Sub: lambda a, b: a - b, ast.Mult: sp.Mul,
           ast.Div: lambda a, b: a / b, ast.Pow: sp.Pow, ast.BitXor: sp.Pow}
_FUNCS = {"log": sp.log, "exp": sp.exp}


def parse_expression(text: str, params: dict | None = None) -> sp.Expr:
    """Parse an expression in r over +, -, *, /, ^ (or **), log and exp.

    Names other than ``r`` must be supplied in ``params``.  Nothing is
    evaluated with ``eval``; the syntax tree is walked against a whitelist.
    """
    params = params or {}
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"cannot parse expression {text!r}: {exc.msg}") from exc

    def walk(node):
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](walk(node.left), walk(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            val = walk(node.operand)
            return -val if isinstance(node.op, ast.USub) else val
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
            return sp.Integer(node.value) if isinstance(node.value, int) else _num(node.value)
        if isinstance(node, ast.Name):
            if node.id == "r":
                return R
            if node.id in params:
                return sp.sympify(params[node.id])
            raise ParseError(f"unknown name {node.id!r} in {text!r}")
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS
                and len(node.args) == 1 and not node.keywords):
            return _FUNCS[node.func.id](walk(node.args[0]))
        raise ParseError(f"unsupported syntax {ast.dump(node)[:40]}... in {text!r}")

    return walk(tree)


# ---------------------------------------------------------------------------
# profiles


class _Radial:
    """A function of r with cached numerical derivatives of any order."""

    def __init__(self, expr: sp.Expr):
        self.expr = sp.sympify(expr)
        self._cache: dict[int, Callable] = {}

    def __call__(self, r, order: int = 0) -> np.ndarray:
        fn = self._cache.get(order)
        if fn is None:
            fn = sp.lambdify(R, sp.diff(self.expr, R, order) if order else self.expr, "numpy")
            self._cache[order] = fn
        r = np.asarray(r, dtype=float)
        return np.broadcast_to(np.asarray(fn(r), dtype=float), r.shape).copy()


@dataclass(frozen=True)
class RadialProfile:
    kind: str
    metric: sp.Expr          # h(r) for Kahler potentials, phi(r) for conformal factors
    weight: sp.Expr          # psi(r)
    radius: float = math.inf
    name: str = "user"

    def __post_init__(self):
        if self.kind not in (KAHLER, CONFORMAL):
            raise DomainError(f"profile kind must be {KAHLER!r} or {CONFORMAL!r}, got {self.kind!r}")
        if not (self.radius > 0):
            raise DomainError(f"domain radius must be positive, got {self.radius!r}")
        object.__setattr__(self, "metric", sp.sympify(self.metric))
        object.__setattr__(self, "weight", sp.sympify(self.weight))

    @cached_property
    def _h(self) -> _Radial:
        return _Radial(self.metric)

    @cached_property
    def _psi(self) -> _Radial:
        return _Radial(self.weight)

    def metric_derivatives(self, r) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self._h(r), self._h(r, 1), self._h(r, 2)

    def weight_derivatives(self, r) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self._psi(r), self._psi(r, 1), self._psi(r, 2)

    def grid(self, points: int = GRID_POINTS) -> np.ndarray:
        end = self.radius * (1.0 - BALL_MARGIN) if math.isfinite(self.radius) else PLANE_RADIUS
        return radial_grid(end, points)

    def check_positivity(self, grid=None) -> None:
        """Kahler potentials need h' > 0 and r h'' + h' > 0 on the grid."""
        if self.kind != KAHLER:
            return
        r = self.grid() if grid is None else np.asarray(grid, dtype=float)
        _, d1, d2 = self.metric_derivatives(r)
        bad = ~((d1 > 0) & (d1 + r * d2 > 0))
        if np.any(bad):
            raise PositivityError(f"Kahler potential {self.name!r} is not positive at r = {r[np.argmax(bad)]:.6g}")

    # log det of the metric, as a radial function of r
    def log_det(self, n: int) -> _Radial:
        h1 = sp.diff(self.metric, R)
        if self.kind == KAHLER:
            expr = (n - 1) * sp.log(h1) + sp.log(h1 + R * sp.diff(h1, R))
        else:
            expr = n * self.metric
        return _Radial(sp.simplify(expr))


def radial_grid(end: float, points: int = GRID_POINTS) -> np.ndarray:
    """Chebyshev-Lobatto points on [0, end], ascending; dense near both ends."""
    if points < 2:
        raise DomainError("a grid needs at least two points")
    k = np.arange(points)
    return 0.5 * end * (1.0 - np.cos(np.pi * k / (points - 1)))


def _num(x) -> sp.Rational:
    # exact rational from the decimal representation, so 1.5 becomes 3/2
    return sp.Rational(repr(float(x)))


def kahler_profile(h, psi, radius=math.inf, name="user") -> RadialProfile:
    return RadialProfile(KAHLER, h, psi, radius, name)


def conformal_profile(phi, psi, radius=math.inf, name="user") -> RadialProfile:
    return RadialProfile(CONFORMAL, phi, psi, radius, name)


def builtin_profile(model: Model) -> RadialProfile:
    """The profile behind each model of :mod:`bergdbar.models`."""
    if isinstance(model, SegalBargmann):
        return kahler_profile(R, R, name=model.label())
    if isinstance(model, HyperbolicExponential):
        a = _num(model.alpha)
        return kahler_profile(-sp.log(1 - R), a / (1 - R), 1.0, model.label())
    if isinstance(model, ConformalStandard):
        a = _num(model.alpha)
        return conformal_profile(-sp.log(1 - R), a * sp.log(1 - R), 1.0, model.label())
    if isinstance(model, Cigar):
        a = _num(model.alpha)
        return conformal_profile(-sp.log(1 + R), a * sp.log(1 + R), name=model.label())
    raise UnsupportedModelError(f"no built-in profile for {model!r}")


def power_conformal_profile(m: float, alpha: float) -> RadialProfile:
    """phi = m log(1 + r), psi = phi - alpha (1 + r)^(m+1) / (m+1) on C^2; constant -alpha."""
    m, a = _num(m), _num(alpha)
    phi = m * sp.log(1 + R)
    return conformal_profile(phi, phi - a * (1 + R) ** (m + 1) / (m + 1), name=f"power:m={m},alpha={a}")


def exponential_conformal_profile(alpha: float) -> RadialProfile:
    """phi = r, psi = r - alpha e^r on C^2; constant -alpha."""
    a = _num(alpha)
    return conformal_profile(R, R - a * sp.exp(R), name=f"exponential:alpha={a}")


def parse_profile(text: str) -> RadialProfile:
    """``kahler:h=...,psi=...[,R=1]``, ``conformal:phi=...,psi=...[,R=1]`` or a model string."""
    head, _, body = text.partition(":")
    head = head.strip()
    if head not in ("kahler", "conformal"):
        return builtin_profile(parse_model(text))
    fields: dict[str, str] = {}
    # split on commas outside parentheses
    depth, start = 0, 0
    for i, ch in enumerate(body + ","):
        depth += (ch == "(") - (ch == ")")
        if ch == "," and depth == 0:
            part = body[start:i].strip()
            start = i + 1
            if not part:
                continue
            if "=" not in part:
                raise ParseError(f"expected key=expression, got {part!r}")
            k, v = (s.strip() for s in part.split("=", 1))
            fields[k] = v
    metric_key = "h" if head == "kahler" else "phi"
    missing = {metric_key, "psi"} - set(fields)
    if missing:
        raise ParseError(f"profile {text!r} lacks {sorted(missing)}")
    extra = set(fields) - {metric_key, "psi", "R"}
    if extra:
        raise ParseError(f"unexpected profile fields {sorted(extra)}")
    try:
        radius = float(fields.get("R", "inf"))
    except ValueError as exc:
        raise ParseError(f"bad domain radius {fields['R']!r}") from exc
    kind = KAHLER if head == "kahler" else CONFORMAL
    return RadialProfile(kind, parse_expression(fields[metric_key]), parse_expression(fields["psi"]), radius, text)


def finite_difference_derivatives(f: Callable, r, step: float = 1e-5) -> tuple[np.ndarray, np.ndarray]:
    """Five-point centred first and second derivatives with step 1e-5 (1 + r)."""
    r = np.asarray(r, dtype=float)
    e = step * (1.0 + r)
    f2, f1, f0, g1, g2 = f(r - 2 * e), f(r - e), f(r), f(r + e), f(r + 2 * e)
    d1 = (f2 - 8 * f1 + 8 * g1 - g2) / (12 * e)
    d2 = (-f2 + 16 * f1 - 30 * f0 + 16 * g1 - g2) / (12 * e * e)
    return d1, d2


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class GeometryReport:
    profile: str
    n: int
    grid: np.ndarray = field(repr=False)
    coefficient: np.ndarray = field(repr=False)
    constancy_defect: float
    holomorphicity_constant: float | None
    torsion_norm_profile: np.ndarray = field(repr=False)
    curvature_verdicts: np.ndarray | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        out = {
            "profile": self.profile,
            "n": self.n,
            "holomorphicity_constant": self.holomorphicity_constant,
            "constancy_defect": self.constancy_defect,
            "grid": self.grid.tolist(),
            "coefficient": self.coefficient.tolist(),
            "torsion_norm_profile": self.torsion_norm_profile.tolist(),
        }
        if self.curvature_verdicts is not None:
            out["curvature_verdicts"] = self.curvature_verdicts.tolist()
        return out


def _report(profile: RadialProfile, n: int, r: np.ndarray, c: np.ndarray) -> GeometryReport:
    if not np.all(np.isfinite(c)):
        raise PositivityError(f"duality coefficient of {profile.name!r} is not finite on the grid")
    mean = float(np.mean(c))
    defect = float(np.max(np.abs(c - mean)))
    constant = mean if defect < CONSTANCY_TOL else None
    torsion = torsion_profile(profile, n, r)[1]
    return GeometryReport(profile.name, n, r, c, defect, constant, torsion)


def check_kahler_duality(profile: RadialProfile, n: int = 1, grid=None) -> GeometryReport:
    """Sample psi' / (h' + r h''); constancy means the adjoint of d is c * (radial vector field)."""
    if profile.kind != KAHLER:
        raise DomainError("check_kahler_duality needs a Kahler potential")
    r = profile.grid() if grid is None else np.asarray(grid, dtype=float)
    profile.check_positivity(r)
    _, h1, h2 = profile.metric_derivatives(r)
    _, p1, _ = profile.weight_derivatives(r)
    den = h1 + r * h2
    if np.any(den <= 0):
        raise PositivityError("h' + r h'' vanishes on the grid")
    return _report(profile, n, r, p1 / den)


def check_conformal_duality(profile: RadialProfile, n: int, grid=None) -> GeometryReport:
    """Sample e^(-phi) (psi' - (n - 1) phi')."""
    if profile.kind != CONFORMAL:
        raise DomainError("check_conformal_duality needs a conformal factor")
    if n < 1:
        raise DomainError(f"dimension must be positive, got {n}")
    r = profile.grid() if grid is None else np.asarray(grid, dtype=float)
    phi, f1, _ = profile.metric_derivatives(r)
    _, p1, _ = profile.weight_derivatives(r)
    return _report(profile, n, r, np.exp(-phi) * (p1 - (n - 1) * f1))


def check_duality(profile: RadialProfile, n: int, grid=None) -> GeometryReport:
    if profile.kind == KAHLER:
        return check_kahler_duality(profile, n, grid)
    return check_conformal_duality(profile, n, grid)


def torsion_profile(profile: RadialProfile, n: int, grid=None) -> tuple[np.ndarray, np.ndarray]:
    """(coefficient of conj(z_j) in tau_j, |tau|_h^2) on the grid; zero for Kahler metrics."""
    r = profile.grid() if grid is None else np.asarray(grid, dtype=float)
    if profile.kind == KAHLER or n == 1:
        return np.zeros_like(r), np.zeros_like(r)
    phi, f1, _ = profile.metric_derivatives(r)
    coeff = (n - 1) * f1
    return coeff, coeff**2 * r * np.exp(-phi)


# ---------------------------------------------------------------------------
# curvature criterion


def _metric_form(profile: RadialProfile, r) -> tuple[np.ndarray, np.ndarray]:
    if profile.kind == KAHLER:
        _, h1, h2 = profile.metric_derivatives(r)
        return h1, h2
    phi = profile.metric_derivatives(r)[0]
    return np.exp(phi), np.zeros_like(r)


def curvature_form(profile: RadialProfile, n: int, epsilon: float, sigma: float | None, grid) -> tuple[np.ndarray, np.ndarray]:
    """(A, B) of  i dd-bar psi + Theta - sigma/(sigma - 1) i T o T-bar - epsilon omega_h.

    ``Theta = -i dd-bar log det h``.  ``sigma=None`` drops the torsion term.
    """
    r = np.asarray(grid, dtype=float)
    _, p1, p2 = profile.weight_derivatives(r)
    ld = profile.log_det(n)
    a = p1 - ld(r, 1)
    b = p2 - ld(r, 2)
    wa, wb = _metric_form(profile, r)
    a = a - epsilon * wa
    b = b - epsilon * wb
    if sigma is not None:
        if not sigma > 1:
            raise DomainError(f"sigma must exceed 1, got {sigma!r}")
        if profile.kind == CONFORMAL and n > 1:
            f1 = profile.metric_derivatives(r)[1]
            k = sigma / (sigma - 1.0)
            a = a - k * 2.0 * f1**2 * r
            b = b + k * 2.0 * f1**2
    return a, b


def form_eigenvalues(a, b, r, n: int) -> np.ndarray:
    """Minimum eigenvalue of a delta + b conj(z) z^T at |z|^2 = r."""
    radial = a + r * b
    return radial if n == 1 else np.minimum(a, radial)


def curvature_condition(model, epsilon: float, sigma: float | None = None, grid=None, n: int | None = None) -> np.ndarray:
    """Minimum eigenvalue of the tested form at each grid radius."""
    profile = model if isinstance(model, RadialProfile) else builtin_profile(model)
    if n is None:
        if isinstance(model, RadialProfile):
            raise DomainError("give the dimension n with a bare profile")
        n = model.n
    r = profile.grid() if grid is None else np.asarray(grid, dtype=float)
    a, b = curvature_form(profile, n, epsilon, sigma, r)
    return form_eigenvalues(a, b, r, n)


def curvature_holds(model, epsilon: float, sigma: float | None = None, grid=None, n=None, tol: float = 1e-10) -> bool:
    v = curvature_condition(model, epsilon, sigma, grid, n)
    return bool(np.all(v >= -tol))


def curvature_threshold(model, lo: float, hi: float, sigma: float | None = None, grid=None, n=None,
                        xtol: float = 1e-9) -> float:
    """Largest epsilon in [lo, hi] for which the condition holds, by bisection."""
    if not curvature_holds(model, lo, sigma, grid, n):
        raise DomainError(f"condition already fails at epsilon = {lo}")
    if curvature_holds(model, hi, sigma, grid, n):
        return hi
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if curvature_holds(model, mid, sigma, grid, n):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# basic identity, one complex dimension


@dataclass(frozen=True)
class BasicIdentityTerms:
    model: str
    d_term: float              # |du - Tu|^2, zero in one dimension
    adjoint_term: float        # |adj(d) u|^2
    curvature_term: float      # (i dd-bar psi + Theta, u ^ u-bar)
    projection_defect: float
    gradient_term: float       # implied G = LHS - curvature + projection
    covariant_norm: float      # |nabla u|^2, Chern (1,0) covariant derivative
    constant: float | None     # G / |nabla u|^2

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _inverse_metric_1d(model: Model, t):
    # |dz|^2 in the metric, i.e. h^{-1}, for n = 1
    return model.metric_component_scale(t, 1) * (1.0 - model.kappa * t)


def _integrate(model: Model, g: Callable, n_nodes: int) -> float:
    # for the exponential weight, Legendre on t in [0, 1] converges much faster than
    # Laguerre after t = s/(alpha+s) when alpha is small (the map has a pole at -alpha)
    if isinstance(model, HyperbolicExponential):
        rule = make_rule(RuleKind.GAUSS_LEGENDRE, n_nodes)
        return rule.apply(lambda t: g(t) * model.radial_weight_density(t))
    return integrate_radial(model, g, n_nodes)


def basic_identity_diagnostic(model: Model, u: FormCoefficients, n_nodes: int = 25) -> BasicIdentityTerms:
    """Every term of the basic identity for a holomorphic (1,0)-form on a one-dimensional model."""
    if model.n != 1 or not isinstance(model, (SegalBargmann, Cigar, HyperbolicExponential)):
        raise UnsupportedModelError("the basic-identity diagnostic covers one-dimensional Segal-Bargmann, cigar and hyperbolic models")
    if u.p != 1 or u.model != model:
        raise DomainError("u must be a (1,0)-form of the given model")
    profile = builtin_profile(model)
    log_h = profile.log_det(1)
    def curv(t):
        # radial eigenvalue of i dd-bar psi + Theta
        _, w1, w2 = profile.weight_derivatives(t)
        return w1 + t * w2 - (log_h(t, 1) + t * log_h(t, 2))

    def s2(t):
        return _inverse_metric_1d(model, t) ** 2

    curvature = 0.0
    gradient = 0.0
    for (J, _), c in u.table.items():
        k, c2 = J[0], abs(c) ** 2
        curvature += c2 * math.pi * converged_quadrature(
            lambda N: _integrate(model, lambda t: t**k * curv(t) * s2(t), N), n_nodes)
        gradient += c2 * math.pi * converged_quadrature(
            lambda N: _integrate(model, lambda t: _grad_density(t, k, log_h) * s2(t), N), n_nodes)
    adjoint = norm2(dbar_adjoint(u)) if u.table else 0.0
    g = adjoint - curvature
    return BasicIdentityTerms(model.label(), 0.0, adjoint, curvature, 0.0, g, gradient,
                              g / gradient if gradient > 0 else None)


def _grad_density(t, k: int, log_h) -> np.ndarray:
    # |u' - (log h)' u|^2 for u = z^k, averaged over the circle of radius sqrt(t)
    lh = log_h(t, 1)
    if k == 0:
        return t * lh**2
    return t ** (k - 1) * (k - t * lh) ** 2
