import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from bergdbar.errors import DomainError
from bergdbar.numerics import (
    MultiIndex,
    RuleKind,
    SymmetricMatrix,
    cluster_eigenvalues,
    eigh,
    enumerate_multiindices,
    ln_factorial,
    ln_gamma,
    make_rule,
)


def _stirling_ln_gamma(x: float) -> float:
    # shift up with the recursion, then an asymptotic series
    shift = 0.0
    while x < 30:
        shift -= math.log(x)
        x += 1
    series = 1 / (12 * x) - 1 / (360 * x**3) + 1 / (1260 * x**5) - 1 / (1680 * x**7)
    return shift + (x - 0.5) * math.log(x) - x + 0.5 * math.log(2 * math.pi) + series


@given(st.floats(min_value=1e-3, max_value=400.0))
def test_ln_gamma_matches_stirling_with_recursion(x):
    assert ln_gamma(x) == pytest.approx(_stirling_ln_gamma(x), rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("x", [0.5, 1.0, 1.5, 7.25, 120.0])
def test_ln_gamma_matches_mpmath(x):
    assert ln_gamma(x) == pytest.approx(float(mpmath.loggamma(x)), rel=1e-14, abs=1e-15)


@pytest.mark.parametrize("bad", [0.0, -1.0, math.inf, math.nan])
def test_ln_gamma_rejects_non_positive(bad):
    with pytest.raises(DomainError):
        ln_gamma(bad)


def test_ln_factorial_small():
    for k in range(15):
        assert math.exp(ln_factorial(k)) == pytest.approx(math.factorial(k), rel=1e-13)


@pytest.mark.parametrize("n", [1, 2, 5, 17, 40, 120])
def test_legendre_rule_integrates_polynomials_exactly(n):
    rule = make_rule(RuleKind.GAUSS_LEGENDRE, n)
    assert np.all(np.diff(rule.nodes) > 0)
    assert 0 < rule.nodes[0] and rule.nodes[-1] < 1
    for d in range(0, 2 * n, max(1, n // 4)):
        assert rule.apply(lambda x: x**d) == pytest.approx(1 / (d + 1), rel=1e-13)


@pytest.mark.parametrize("n", [2, 10, 25, 40])
def test_laguerre_rule_reproduces_factorials(n):
    rule = make_rule("gauss-laguerre", n)
    for d in range(0, min(2 * n, 40)):
        assert rule.apply(lambda x: x**d) == pytest.approx(math.factorial(d), rel=1e-11)


@pytest.mark.parametrize("n", [150, 200])
def test_laguerre_rule_large_orders_are_finite(n):
    rule = make_rule("gauss-laguerre", n)
    assert np.all(np.isfinite(rule.weights)) and np.all(rule.weights > 0)
    assert rule.weights.sum() == pytest.approx(1.0, rel=1e-12)
    assert rule.apply(lambda x: x**3) == pytest.approx(6.0, rel=1e-11)


def test_make_rule_validates_count():
    with pytest.raises(DomainError):
        make_rule("gauss-legendre", 0)
    with pytest.raises(ValueError):
        make_rule("simpson", 4)


def _cofactor_det(a):
    if len(a) == 1:
        return a[0][0]
    return sum((-1) ** j * a[0][j] * _cofactor_det([row[:j] + row[j + 1:] for row in a[1:]]) for j in range(len(a)))


@given(st.integers(min_value=1, max_value=5), st.integers(min_value=0, max_value=10**6))
def test_eigenvalues_are_roots_of_characteristic_polynomial(order, seed):
    r = np.random.default_rng(seed)
    a = r.standard_normal((order, order))
    m = SymmetricMatrix(a + a.T)
    w, v = eigh(m)
    scale = np.linalg.norm(m.array) + 1
    for lam in w:
        shifted = (m.array - lam * np.eye(order)).tolist()
        assert abs(_cofactor_det(shifted)) <= 1e-10 * scale**order
    assert np.allclose(v.T @ v, np.eye(order), atol=1e-12)
    assert np.all(np.diff(w) >= 0)


def test_symmetric_matrix_invariants():
    with pytest.raises(DomainError):
        SymmetricMatrix([[1.0, 2.0], [2.1, 1.0]])
    with pytest.raises(DomainError):
        SymmetricMatrix(np.zeros((2, 3)))
    m = SymmetricMatrix.from_nearly_symmetric([[1.0, 2.0], [2.0 + 1e-14, 1.0]])
    assert np.array_equal(m.array, m.array.T)
    with pytest.raises(DomainError):
        SymmetricMatrix.from_nearly_symmetric([[1.0, 2.0], [2.5, 1.0]])
    with pytest.raises(ValueError):
        m.array[0, 0] = 3.0


def test_cluster_eigenvalues():
    vals = [2.0, 4.0, 2.0 + 1e-12, 2.0 - 1e-12, 7.0]
    assert [(round(v, 9), k) for v, k in cluster_eigenvalues(vals)] == [(2.0, 3), (4.0, 1), (7.0, 1)]


def test_multiindex_arithmetic():
    J = MultiIndex((2, 0, 1))
    assert J.degree == 3 and J.factorial == 2
    assert J.increment(1) == (2, 1, 1)
    assert J.decrement(1) is None
    assert J.decrement(0) == (1, 0, 1)
    assert J + MultiIndex((1, 1, 1)) == (3, 1, 2)
    with pytest.raises(DomainError):
        MultiIndex((1, -1))


@pytest.mark.parametrize("n,m", [(1, 0), (1, 5), (2, 3), (3, 4), (4, 2)])
def test_enumeration_counts_and_order(n, m):
    got = enumerate_multiindices(n, m)
    assert len(got) == math.comb(n + m - 1, n - 1) == len(set(got))
    assert all(J.degree == m for J in got)
    if n == 2 and m == 3:
        assert got[0] == (3, 0) and got[-1] == (0, 3)
