"""The holomorphic d-complex on weighted Bergman spaces of radial models."""

__version__ = "0.1.0"

from .errors import (
    AccuracyError,
    BergdbarError,
    ClosednessError,
    DivergenceError,
    DomainError,
    ParseError,
    PositivityError,
    SingularBlockError,
    UnsupportedDegreeError,
    UnsupportedModelError,
)
from .models import Cigar, ConformalStandard, HyperbolicExponential, Model, SegalBargmann, parse_model
from .operators import FormCoefficients, assemble_block, dbar, dbar_adjoint
from .spectral import neumann_apply, solve_dbar, spectrum

__all__ = [
    "__version__",
    "AccuracyError",
    "BergdbarError",
    "ClosednessError",
    "DivergenceError",
    "DomainError",
    "ParseError",
    "PositivityError",
    "SingularBlockError",
    "UnsupportedDegreeError",
    "UnsupportedModelError",
    "Cigar",
    "ConformalStandard",
    "HyperbolicExponential",
    "Model",
    "SegalBargmann",
    "parse_model",
    "FormCoefficients",
    "assemble_block",
    "dbar",
    "dbar_adjoint",
    "neumann_apply",
    "solve_dbar",
    "spectrum",
]
