import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from bergdbar.basis import (
    CLOSED_FORM,
    QUADRATURE,
    block_keys,
    e_normalization_discrepancy,
    gram_matrix,
    hyperbolic_norms_batch,
    ln_angular_factor,
    norm,
    norm_closed_form,
    norm_quadrature,
    norm_table,
    verify_duality_identity,
)
from bergdbar.errors import DivergenceError, DomainError, UnsupportedModelError
from bergdbar.models import Cigar, ConformalStandard, HyperbolicExponential, SegalBargmann
from bergdbar.numerics import MultiIndex, enumerate_multiindices, make_rule


def _angular(n, J):
    # pi^n J! / (|J| + n - 1)!
    return math.pi**n * math.prod(math.factorial(j) for j in J) / math.factorial(sum(J) + n - 1)


def _hyperbolic_radial_oracle(n, alpha, k, p):
    """int_0^1 t^k (1-t)^p (1-t)^(-n-1) e^(-alpha/(1-t)) dt, Gauss-Legendre on [0,1]."""
    rule = make_rule("gauss-legendre", 200)
    return rule.apply(lambda t: t**k * (1 - t) ** (p - n - 1) * np.exp(-alpha / (1 - t)))


@pytest.mark.parametrize("n,gamma", [(1, 0.5), (2, 1.5), (3, 2.0)])
def test_standard_norms_match_beta_function(n, gamma):
    model = ConformalStandard(n, gamma)
    for m in range(5):
        for J in enumerate_multiindices(n, m):
            k = m + n - 1
            expected0 = _angular(n, J) * float(mpmath.beta(k + 1, gamma))
            assert norm_closed_form(model, 0, J) == pytest.approx(expected0, rel=1e-13)
            if n == 1:
                # |z^J dz|^2 carries the extra factor s(t) = 1 - t
                expected1 = _angular(n, J) * float(mpmath.beta(k + 1, gamma + 1))
                assert norm_closed_form(model, 1, J, 0) == pytest.approx(expected1, rel=1e-13)


def test_segal_bargmann_norms_are_factorials():
    model = SegalBargmann(2)
    for J in [(0, 0), (2, 1), (3, 3)]:
        expected = math.pi**2 * math.factorial(J[0]) * math.factorial(J[1])
        assert norm_closed_form(model, 0, J) == pytest.approx(expected, rel=1e-14)
        assert norm_quadrature(model, 1, J, 1) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 3.0])
@pytest.mark.parametrize("k", [0, 1, 5, 12])
def test_hyperbolic_one_dimensional_norms_against_legendre_oracle(alpha, k):
    model = HyperbolicExponential(1, alpha)
    c2 = math.pi * _hyperbolic_radial_oracle(1, alpha, k, 0)
    d2 = math.pi * _hyperbolic_radial_oracle(1, alpha, k, 2)  # |dz|^2 = (1 - t)^2 when n = 1
    assert norm_quadrature(model, 0, (k,)) == pytest.approx(c2, rel=1e-9)
    assert norm_quadrature(model, 1, (k,), 0) == pytest.approx(d2, rel=1e-9)


def test_hyperbolic_norm_against_mpmath_quad():
    alpha, k = 1.5, 3
    f = lambda t: t**k * (1 - t) ** -2 * mpmath.exp(-alpha / (1 - t))
    exact = float(mpmath.pi * mpmath.quad(f, [0, 0.5, 0.9, 1]))
    assert norm_quadrature(HyperbolicExponential(1, alpha), 0, (k,)) == pytest.approx(exact, rel=1e-10)


def test_hyperbolic_two_dimensional_norm_against_oracle():
    model = HyperbolicExponential(2, 1.0)
    J = (2, 1)
    expected = _angular(2, J) * _hyperbolic_radial_oracle(2, 1.0, 4, 0)
    assert norm_quadrature(model, 0, J) == pytest.approx(expected, rel=1e-9)


def test_closed_form_unavailable_for_quadrature_models():
    with pytest.raises(UnsupportedModelError):
        norm_closed_form(HyperbolicExponential(1, 1.0), 0, (1,))
    with pytest.raises(UnsupportedModelError):
        norm_closed_form(Cigar(alpha=5.0), 0, (1,))
    with pytest.raises(DomainError):
        norm_quadrature(SegalBargmann(1), 0, (1,), n_nodes=5)


@given(st.lists(st.integers(0, 5), min_size=2, max_size=2), st.integers(0, 1), st.floats(0.2, 4.0))
def test_duality_identity_standard(J, k, gamma):
    model = ConformalStandard(2, gamma)
    assert verify_duality_identity(model, J, k, CLOSED_FORM) < 1e-12
    assert verify_duality_identity(model, J, k, QUADRATURE) < 1e-9


@pytest.mark.parametrize("model", [SegalBargmann(2), HyperbolicExponential(2, 1.2), Cigar(alpha=6.0)])
def test_duality_identity_other_models(model):
    for m in range(4 if model.n == 2 else 4):
        for J in enumerate_multiindices(model.n, m):
            for k in range(model.n):
                assert verify_duality_identity(model, J, k) < 1e-9


def test_cigar_integrability_cut():
    model = Cigar(alpha=5.0)
    assert norm_quadrature(model, 0, (4,)) > 0
    with pytest.raises(DivergenceError):
        norm_quadrature(model, 0, (5,))
    with pytest.raises(DivergenceError):
        norm_quadrature(model, 1, (4,), 0)


def test_cigar_norm_against_beta():
    # pi int t^k (1+t)^(-alpha-1) dt = pi B(k+1, alpha-k)
    alpha = 5.0
    for k in range(5):
        expected = math.pi * float(mpmath.beta(k + 1, alpha - k))
        assert norm(Cigar(alpha=alpha), 0, (k,)) == pytest.approx(expected, rel=1e-12)


def test_e_normalization_discrepancy():
    assert e_normalization_discrepancy(HyperbolicExponential(1, 1.0), (3,)) == pytest.approx(1.0, rel=1e-10)
    # off by (|J|+n-1)!/J! in more than one variable
    assert e_normalization_discrepancy(HyperbolicExponential(2, 1.0), (1, 2)) == pytest.approx(12.0, rel=1e-10)


@pytest.mark.parametrize("model", [HyperbolicExponential(2, 1.0), ConformalStandard(3, 1.0), SegalBargmann(2)])
def test_gram_matrices_are_positive_definite(model):
    for m in range(4):
        g = gram_matrix(model, block_keys(model, 1, m))
        assert np.allclose(g, g.T, rtol=1e-13)
        assert np.linalg.eigvalsh(g).min() > 0


def test_conformal_bases_are_orthogonal():
    g = gram_matrix(ConformalStandard(2, 1.0), block_keys(ConformalStandard(2, 1.0), 1, 2))
    assert np.count_nonzero(g - np.diag(np.diag(g))) == 0


def test_hyperbolic_cross_terms_present_in_two_dimensions():
    model = HyperbolicExponential(2, 1.0)
    g = gram_matrix(model, block_keys(model, 1, 1))
    assert np.abs(g - np.diag(np.diag(g))).max() > 1e-6


def test_norm_table_shapes():
    table = norm_table(ConformalStandard(2, 1.0), 1, 3)
    assert len(table.entries) == sum(2 * (m + 1) for m in range(4))
    assert all(v > 0 for v in table.entries.values())


def test_angular_factor():
    J = MultiIndex((2, 1))
    assert math.exp(ln_angular_factor(2, J)) == pytest.approx(_angular(2, J), rel=1e-14)


def test_batch_norms_agree_with_pointwise():
    model = HyperbolicExponential(1, 2.0)
    ln_c, ln_d = hyperbolic_norms_batch(model, 15)
    for k in (0, 3, 15):
        assert math.exp(ln_c[k]) == pytest.approx(norm_quadrature(model, 0, (k,)), rel=1e-10)
        assert math.exp(ln_d[k]) == pytest.approx(norm_quadrature(model, 1, (k,), 0), rel=1e-10)
    with pytest.raises(UnsupportedModelError):
        hyperbolic_norms_batch(HyperbolicExponential(2, 1.0), 5)
