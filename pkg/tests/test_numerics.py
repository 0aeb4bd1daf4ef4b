import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate, special

from twrc.errors import BracketError, DomainError, NonConvergence
from twrc.numerics import (
    QuadratureSpec,
    SearchSpec,
    bessel_k0,
    bessel_k0e,
    bessel_k1,
    bessel_k1e,
    find_root_decreasing,
    golden_section_batch,
    integrate_semi_infinite,
    maximize_concave_1d,
)
from twrc.numerics import _W_GAUSS, _W_KRONROD, _NODES

xs = st.floats(1e-6, 600.0)


@given(xs)
def test_bessel_against_mpmath(x):
    assert bessel_k0e(x) == pytest.approx(float(mpmath.besselk(0, x) * mpmath.exp(x)), rel=1e-12)
    assert bessel_k1e(x) == pytest.approx(float(mpmath.besselk(1, x) * mpmath.exp(x)), rel=1e-12)


@pytest.mark.parametrize("x", [1e-8, 0.3, 1.0, 2.0, 7.5, 40.0])
def test_unscaled_bessel_against_mpmath(x):
    assert bessel_k0(x) == pytest.approx(float(mpmath.besselk(0, x)), rel=1e-13)
    assert bessel_k1(x) == pytest.approx(float(mpmath.besselk(1, x)), rel=1e-13)


@given(st.floats(1e-3, 50.0))
def test_wronskian(x):
    # I0 K1 + I1 K0 = 1/x, in the exponentially scaled form
    lhs = special.i0e(x) * bessel_k1e(x) + special.i1e(x) * bessel_k0e(x)
    assert lhs * x == pytest.approx(1.0, rel=1e-12)


def test_bessel_small_argument_asymptotics():
    x = 1e-10
    assert bessel_k0(x) == pytest.approx(-math.log(x / 2) - np.euler_gamma, rel=1e-12)
    assert bessel_k1(x) == pytest.approx(1 / x, rel=1e-12)


@pytest.mark.parametrize("x", [0.0, -1.0])
def test_bessel_domain(x):
    with pytest.raises(DomainError):
        bessel_k0(x)
    with pytest.raises(DomainError):
        bessel_k1e(np.array([1.0, x]))


def test_bessel_vectorized():
    x = np.array([0.5, 1.0, 2.0])
    np.testing.assert_allclose(bessel_k0(x), special.k0(x), rtol=1e-15)


@pytest.mark.parametrize("deg", range(0, 23))
def test_kronrod_exact_to_degree_22(deg):
    exact = (1 - (-1) ** (deg + 1)) / (deg + 1)
    assert float(_NODES**deg @ _W_KRONROD) == pytest.approx(exact, abs=1e-14)


@pytest.mark.parametrize("deg", range(0, 14))
def test_gauss_exact_to_degree_13(deg):
    exact = (1 - (-1) ** (deg + 1)) / (deg + 1)
    assert float(_NODES**deg @ _W_GAUSS) == pytest.approx(exact, abs=1e-14)


def test_gauss_uses_only_its_seven_nodes():
    assert np.count_nonzero(_W_GAUSS) == 7


@pytest.mark.parametrize("f, exact, rate", [
    (lambda x: np.exp(-x), 1.0, 1.0),
    (lambda x: x**3 * np.exp(-2 * x), 6 / 16, 2.0),
    (lambda x: -np.log(x) * np.exp(-x), np.euler_gamma, 1.0),
    (lambda x: special.k0(x), math.pi / 2, 1.0),
    (lambda x: x * special.k1(x) * np.exp(-x), None, 2.0),
])
def test_semi_infinite_known_values(f, exact, rate):
    res = integrate_semi_infinite(f, QuadratureSpec(), decay_rate=rate)
    if exact is None:
        exact = integrate.quad(f, 0, np.inf, epsabs=1e-13, epsrel=1e-13, limit=500)[0]
    assert res.value == pytest.approx(exact, rel=1e-9, abs=1e-12)
    assert res.error < 1e-8


def test_tail_search_without_decay_rate():
    res = integrate_semi_infinite(lambda x: 1.0 / (1.0 + x) ** 3)
    assert res.value == pytest.approx(0.5, rel=1e-4)


def test_against_richardson_trapezoid():
    # smooth integrand on a fixed cut: Romberg extrapolation is an independent oracle
    f = lambda x: np.exp(-x) * np.cos(3 * x) * (1 + x)
    T = 40.0
    ests = []
    for k in range(10, 16):
        x = np.linspace(0, T, 2**k + 1)
        ests.append(integrate.trapezoid(f(x), x))
    r = [(4 * ests[i + 1] - ests[i]) / 3 for i in range(len(ests) - 1)]
    r = [(16 * r[i + 1] - r[i]) / 15 for i in range(len(r) - 1)]
    res = integrate_semi_infinite(f, QuadratureSpec(tail_cut=T))
    assert res.value == pytest.approx(r[-1], abs=1e-11)


def test_nonconvergence_is_raised():
    spec = QuadratureSpec(max_subdivisions=10, rel_tol=1e-15, abs_tol=1e-300)
    with pytest.raises(NonConvergence):
        integrate_semi_infinite(lambda x: np.sin(200 * x) * np.exp(-x), spec, decay_rate=1.0)


def test_nonfinite_integrand_rejected():
    with pytest.raises(DomainError):
        integrate_semi_infinite(lambda x: np.full_like(x, np.nan), decay_rate=1.0)


@given(st.floats(-3, 3), st.floats(0.1, 5))
def test_golden_section_finds_parabola_vertex(c, scale):
    x, v = maximize_concave_1d(lambda t: -scale * (t - c) ** 2, -5, 5, SearchSpec(tol=1e-9))
    assert x == pytest.approx(c, abs=1e-7)
    assert v == pytest.approx(0.0, abs=1e-12)


def test_golden_section_boundary_optimum_is_exact():
    x, v = maximize_concave_1d(lambda t: t, 0.0, 1.0)
    assert x == 1.0 and v == 1.0
    x, _ = maximize_concave_1d(lambda t: -t, 0.0, 1.0)
    assert x == 0.0


def test_golden_section_batch_matches_scalar():
    centers = np.array([-0.5, 0.2, 0.9, 2.0])
    x, v = golden_section_batch(lambda t: -(t - centers) ** 2, np.zeros(4), np.ones(4), 1e-9)
    np.testing.assert_allclose(x, np.clip(centers, 0, 1), atol=1e-7)


def test_root_bisection():
    r = find_root_decreasing(lambda t: 2.0 - t**2, 0.0, 2.0, SearchSpec(tol=1e-12))
    assert r == pytest.approx(math.sqrt(2), abs=1e-11)
    with pytest.raises(BracketError):
        find_root_decreasing(lambda t: t - 1, 0.0, 2.0)


def test_spec_validation():
    with pytest.raises(DomainError):
        SearchSpec(tol=0)
