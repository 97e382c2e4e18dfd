"""The four radial models: metric, weight and measure as functions of t = |z|^2.

Every model has the inverse metric in the form

    h^{j k-bar}(z) = s(t) * (delta_jk - kappa * z^j conj(z^k)),

with ``kappa = 1`` for the hyperbolic (Bergman-Kahler) metric and 0 for the
conformally flat ones, and a measure d(mu) = rho(t) d(lambda).  ``s`` is
:meth:`Model.metric_component_scale` with p = 1 and ``rho`` is
:meth:`Model.radial_weight_density`.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParseError, UnsupportedDegreeError


@dataclass(frozen=True)
class Model:
    n: int

    name = "model"
    kappa = 0
    on_ball = True

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"dimension n must be a positive integer, got {self.n!r}")

    # scalar data ---------------------------------------------------------

    def duality_constant(self) -> float:
        """c with  adjoint(u_j dz^j) = c * sum_j z^j u_j."""
        raise NotImplementedError

    def duality_constant_2(self) -> float:
        """c2 with  adjoint(v) = c2 * sum_{r,s} z^r v_rs dz^s  on (2,0)-forms."""
        raise NotImplementedError

    def sharp_constant(self) -> float:
        """Bottom of the spectrum of the (1,0)-Laplacian (eigenvalue on constant forms)."""
        return self.duality_constant()

    @property
    def domain_end(self) -> float:
        return 1.0 if self.on_ball else math.inf

    def _check_t(self, t):
        t = np.asarray(t, dtype=float)
        bad = ~np.isfinite(t) | (t < 0) | (t >= self.domain_end)
        if np.any(bad):
            raise DomainError(f"t = |z|^2 outside the domain of {self.label()}")
        return t

    def radial_weight_density(self, t):
        """Density of d(mu) with respect to Lebesgue measure at |z|^2 = t."""
        t = self._check_t(t)
        return self._rho(t)

    def metric_component_scale(self, t, p: int):
        """s(t)^p: the factor the metric puts on |dz^I|^2 for a (p,0)-form."""
        if p not in (0, 1, 2):
            raise DomainError(f"form degree must be 0, 1 or 2, got {p!r}")
        t = self._check_t(t)
        return self._scale(t) ** p

    def _rho(self, t):
        raise NotImplementedError

    def _scale(self, t):
        raise NotImplementedError

    def max_monomial_degree(self, p: int) -> float:
        """Largest |J| with z^J dz^I square integrable (inf when unbounded)."""
        return math.inf

    # presentation --------------------------------------------------------

    def params(self) -> dict:
        return {"n": self.n}

    def label(self) -> str:
        body = ",".join(f"{k}={_fmt(v)}" for k, v in self.params().items())
        return f"{self.name}:{body}"

    def to_dict(self) -> dict:
        return {"name": self.name, **self.params()}


def _fmt(v) -> str:
    return repr(v) if isinstance(v, float) else str(v)


@dataclass(frozen=True)
class SegalBargmann(Model):
    """Flat C^n with psi = |z|^2."""

    name = "segal-bargmann"
    on_ball = False

    def duality_constant(self):
        return 1.0

    def duality_constant_2(self):
        return 1.0

    def _rho(self, t):
        return np.exp(-t)

    def _scale(self, t):
        return np.ones_like(t)


@dataclass(frozen=True)
class HyperbolicExponential(Model):
    """Unit ball, Bergman-Kahler metric, psi = alpha / (1 - |z|^2)."""

    alpha: float = 1.0

    name = "hyperbolic"
    kappa = 1

    def __post_init__(self):
        super().__post_init__()
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise DomainError(
                f"alpha > 0 required for the exponential weight (coercivity), got {self.alpha!r}"
            )

    def duality_constant(self):
        return float(self.alpha)

    def duality_constant_2(self):
        return float(self.alpha)

    def _rho(self, t):
        u = 1.0 - t
        return u ** (-self.n - 1) * np.exp(-self.alpha / u)

    def _scale(self, t):
        return 1.0 - t

    def params(self):
        return {"n": self.n, "alpha": float(self.alpha)}


@dataclass(frozen=True)
class ConformalStandard(Model):
    """Unit ball, h = (1 - |z|^2)^{-1} delta, psi = alpha log(1 - |z|^2), gamma = 1 - n - alpha."""

    gamma: float = 1.0

    name = "standard"

    def __post_init__(self):
        super().__post_init__()
        if not (math.isfinite(self.gamma) and self.gamma > 0):
            raise DomainError(
                f"gamma > 0 required (coercivity of the standard-weight Laplacian), got {self.gamma!r}"
            )

    @classmethod
    def from_alpha(cls, n: int, alpha: float) -> "ConformalStandard":
        return cls(n, 1.0 - n - alpha)

    @property
    def alpha(self) -> float:
        return 1.0 - self.n - self.gamma

    def duality_constant(self):
        return float(self.gamma)

    def duality_constant_2(self):
        # 2 - n - alpha
        return float(self.gamma) + 1.0

    def _rho(self, t):
        return (1.0 - t) ** (self.gamma - 1.0)

    def _scale(self, t):
        return 1.0 - t

    def params(self):
        return {"n": self.n, "gamma": float(self.gamma)}


@dataclass(frozen=True)
class Cigar(Model):
    """C with h = (1 + |z|^2)^{-1} and psi = alpha log(1 + |z|^2); finite-dimensional."""

    n: int = 1
    alpha: float = 2.0

    name = "cigar"
    on_ball = False

    def __post_init__(self):
        if self.n != 1:
            raise DomainError("the cigar model lives in one complex dimension")
        if not (math.isfinite(self.alpha) and self.alpha >= 2):
            raise DomainError(
                f"alpha >= 2 required for a nontrivial Bergman space, got {self.alpha!r}"
            )

    def duality_constant(self):
        return float(self.alpha)

    def duality_constant_2(self):
        raise UnsupportedDegreeError("no (2,0)-forms in one complex dimension")

    def _rho(self, t):
        return (1.0 + t) ** (-(self.alpha + 1.0))

    def _scale(self, t):
        return 1.0 + t

    def max_monomial_degree(self, p):
        # |z^k dz^I|^2 d(mu) ~ t^(k + p - alpha - 1) at infinity
        return math.ceil(self.alpha - p) - 1

    def params(self):
        return {"alpha": float(self.alpha)}


def duality_constant(model: Model) -> float:
    return model.duality_constant()


def radial_weight_density(model: Model, t):
    return model.radial_weight_density(t)


def metric_component_scale(model: Model, t, p: int):
    return model.metric_component_scale(t, p)


_MODEL_RE = re.compile(r"^\s*([a-z\-]+)\s*(?::\s*(.*))?$")
_ALIASES = {
    "segal-bargmann": "segal-bargmann",
    "sb": "segal-bargmann",
    "hyperbolic": "hyperbolic",
    "standard": "standard",
    "cigar": "cigar",
}


def parse_model(text: str) -> Model:
    """Parse ``name:key=value,...``, e.g. ``standard:n=2,gamma=1``."""
    m = _MODEL_RE.match(text or "")
    if not m:
        raise ParseError(f"malformed model string {text!r}")
    name = _ALIASES.get(m.group(1))
    if name is None:
        raise ParseError(f"unknown model {m.group(1)!r}; expected one of {sorted(set(_ALIASES.values()))}")
    kv: dict[str, str] = {}
    if m.group(2):
        for part in m.group(2).split(","):
            if "=" not in part:
                raise ParseError(f"expected key=value, got {part!r}")
            k, v = (s.strip() for s in part.split("=", 1))
            if k in kv:
                raise ParseError(f"duplicate parameter {k!r}")
            kv[k] = v
    allowed = {
        "segal-bargmann": {"n"},
        "hyperbolic": {"n", "alpha"},
        "standard": {"n", "gamma", "alpha"},
        "cigar": {"alpha"},
    }[name]
    extra = set(kv) - allowed
    if extra:
        raise ParseError(f"unexpected parameter(s) {sorted(extra)} for model {name!r}")
    try:
        n = int(kv.get("n", "1"))
        nums = {k: float(v) for k, v in kv.items() if k != "n"}
    except ValueError as exc:
        raise ParseError(f"non-numeric parameter in {text!r}") from exc
    try:
        if name == "segal-bargmann":
            return SegalBargmann(n)
        if name == "hyperbolic":
            return HyperbolicExponential(n, nums.get("alpha", 1.0))
        if name == "standard":
            if "gamma" in nums and "alpha" in nums:
                raise ParseError("give gamma or alpha for the standard model, not both")
            if "alpha" in nums:
                return ConformalStandard.from_alpha(n, nums["alpha"])
            return ConformalStandard(n, nums.get("gamma", 1.0))
        return Cigar(alpha=nums.get("alpha", 2.0))
    except ParseError:
        raise
    except DomainError as exc:
        raise ParseError(str(exc)) from exc
