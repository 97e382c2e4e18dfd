import math

import numpy as np
import pytest

from bergdbar.errors import DomainError, ParseError
from bergdbar.models import (
    Cigar,
    ConformalStandard,
    HyperbolicExponential,
    SegalBargmann,
    duality_constant,
    metric_component_scale,
    parse_model,
    radial_weight_density,
)


@pytest.mark.parametrize(
    "text,expected",
    [
        ("segal-bargmann:n=2", SegalBargmann(2)),
        ("hyperbolic:n=2,alpha=1.5", HyperbolicExponential(2, 1.5)),
        ("standard:n=2,gamma=1", ConformalStandard(2, 1.0)),
        ("standard:n=2,alpha=-2", ConformalStandard(2, 1.0)),
        ("cigar:alpha=5", Cigar(alpha=5.0)),
        (" sb : n = 3 ", SegalBargmann(3)),
    ],
)
def test_parse_model(text, expected):
    assert parse_model(text) == expected


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("standard:n=2,gamma=0", "gamma > 0"),
        ("hyperbolic:n=1,alpha=-1", "alpha > 0"),
        ("cigar:alpha=1.5", "alpha >= 2"),
        ("torus:n=1", "unknown model"),
        ("standard:n=2,gamma=1,alpha=1", "not both"),
        ("cigar:n=2,alpha=5", "unexpected"),
        ("standard:n=two", "non-numeric"),
        ("hyperbolic:alpha", "key=value"),
    ],
)
def test_parse_model_errors(text, fragment):
    with pytest.raises(ParseError, match=fragment):
        parse_model(text)


def test_labels_round_trip():
    for m in (SegalBargmann(2), HyperbolicExponential(3, 0.5), ConformalStandard(1, 2.5), Cigar(alpha=7.0)):
        assert parse_model(m.label()) == m


@pytest.mark.parametrize(
    "model,c1",
    [(SegalBargmann(3), 1.0), (HyperbolicExponential(2, 1.7), 1.7), (ConformalStandard(2, 0.3), 0.3), (Cigar(alpha=4.0), 4.0)],
)
def test_duality_constants(model, c1):
    assert duality_constant(model) == c1
    assert model.sharp_constant() == c1


def test_second_duality_constants():
    assert ConformalStandard(2, 1.5).duality_constant_2() == 2.5
    assert HyperbolicExponential(2, 1.5).duality_constant_2() == 1.5
    with pytest.raises(DomainError):
        Cigar(alpha=5.0).duality_constant_2()


def test_densities():
    t = np.array([0.0, 0.25, 0.5])
    n, a = 2, 1.3
    assert np.allclose(radial_weight_density(HyperbolicExponential(n, a), t), (1 - t) ** (-n - 1) * np.exp(-a / (1 - t)))
    assert np.allclose(radial_weight_density(ConformalStandard(n, 2.0), t), 1 - t)
    assert np.allclose(radial_weight_density(Cigar(alpha=3.0), t), (1 + t) ** -4.0)
    assert np.allclose(metric_component_scale(ConformalStandard(n, 2.0), t, 2), (1 - t) ** 2)
    assert np.allclose(metric_component_scale(SegalBargmann(1), t, 1), 1.0)
    with pytest.raises(DomainError):
        radial_weight_density(HyperbolicExponential(1, 1.0), 1.0)
    with pytest.raises(DomainError):
        metric_component_scale(SegalBargmann(1), t, 3)


@pytest.mark.parametrize("alpha,top0,top1", [(2.0, 1, 0), (5.0, 4, 3), (5.5, 5, 4), (7.0, 6, 5)])
def test_cigar_degree_caps(alpha, top0, top1):
    m = Cigar(alpha=alpha)
    assert m.max_monomial_degree(0) == top0
    assert m.max_monomial_degree(1) == top1
    assert math.isinf(SegalBargmann(1).max_monomial_degree(0))


def test_invalid_dimension():
    with pytest.raises(DomainError):
        SegalBargmann(0)
    with pytest.raises(DomainError):
        Cigar(n=2, alpha=5.0)
