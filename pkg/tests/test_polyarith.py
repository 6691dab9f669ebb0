"""Integer/rational polynomial layer: exact structures, root finding, generators."""

import math
from fractions import Fraction

import numpy as np
import pytest

from feketedyn.polyarith import (
    BigRational,
    IntPolynomial,
    RootFindingError,
    chebyshev_monic,
    cyclotomic,
    iterate_exact,
    power_map,
    power_map_plus_z,
    roots,
    runaway_drift,
    runaway_family,
)


def _sorted_roots(rs):
    z = np.asarray(rs.roots)
    return z[np.lexsort((z.imag, z.real))]


# ---------------------------------------------------------------- IntPolynomial

def test_int_polynomial_basic_algebra():
    p = IntPolynomial((-2, 0, 1))  # z^2 - 2, ascending coefficients
    assert p.degree == 2
    assert p.leading == 1
    assert p(2) == 2
    assert p(Fraction(5, 2)) == Fraction(17, 4)
    q = IntPolynomial((1, 1))  # z + 1
    assert (p * q).coeffs == (-2, -2, 1, 1)
    assert (p + q).coeffs == (-1, 1, 1)


def test_int_polynomial_trims_trailing_zeros():
    p = IntPolynomial((1, 2, 0, 0))
    assert p.coeffs == (1, 2)
    assert p.degree == 1


def test_int_polynomial_content_and_sign():
    p = IntPolynomial((-4, 0, -6))
    assert p.content == 2
    prim = p.primitive_normalized()
    # content removed, leading coefficient made positive
    assert prim.coeffs == (2, 0, 3)


def test_text_format_round_trip():
    # ascending whitespace-separated integers: "c0 c1 ... cd"
    p = IntPolynomial.from_text("-2 0 1")
    assert p.coeffs == (-2, 0, 1)
    assert p.to_text() == "-2 0 1"
    assert IntPolynomial.from_text(p.to_text()) == p
    assert IntPolynomial.from_text("1\n0\t-2  0 1").coeffs == (1, 0, -2, 0, 1)


def test_big_rational_is_exact():
    x = BigRational(10**40, 2 * 10**40)
    assert x == BigRational(1, 2)
    assert x + BigRational(1, 3) == BigRational(5, 6)


# ---------------------------------------------------------------------- roots

def test_roots_quadratic_against_formula():
    # independent oracle: quadratic formula for z^2 - z - 1
    golden = (1 + math.sqrt(5)) / 2
    rs = roots(IntPolynomial((-1, -1, 1)))
    got = sorted(r.real for r in rs.roots)
    assert abs(got[0] - (1 - math.sqrt(5)) / 2) < 1e-12
    assert abs(got[1] - golden) < 1e-12
    assert max(abs(r.imag) for r in rs.roots) < 1e-12
    assert rs.residual_bound <= 1e-10


def test_roots_of_unity():
    # z^8 - 1: the 8th roots of unity, all modulus 1
    p = IntPolynomial((-1,) + (0,) * 7 + (1,))
    rs = roots(p)
    assert len(rs.roots) == 8
    mods = np.abs(np.asarray(rs.roots))
    assert np.max(np.abs(mods - 1.0)) < 1e-12
    angles = np.sort(np.mod(np.angle(np.asarray(rs.roots)), 2 * np.pi))
    assert np.allclose(angles, np.arange(8) * np.pi / 4, atol=1e-10)


def test_roots_zero_factor_and_multiplicity():
    rs = roots(IntPolynomial((0, -1, 0, 1)))  # z^3 - z = z(z-1)(z+1)
    got = _sorted_roots(rs)
    assert np.allclose(got, [-1.0, 0.0, 1.0], atol=1e-12)

    rs2 = roots(IntPolynomial((0, 0, 3)))  # 3z^2: double root at 0
    assert len(rs2.roots) == 2
    assert np.max(np.abs(np.asarray(rs2.roots))) < 1e-6
    assert rs2.max_modulus < 1e-6


def test_roots_reports_max_modulus():
    rs = roots(runaway_family(6))
    assert 10.9 < rs.max_modulus < 11.0


def test_roots_expand_round_trip_random():
    # rebuild coefficients from computed roots; degree <= 12, roots in |z| <= 2
    rng = np.random.default_rng(7)
    for _ in range(20):
        deg = int(rng.integers(2, 13))
        true = rng.uniform(-2, 2, deg) + 1j * rng.uniform(-2, 2, deg)
        true = true[np.abs(true) <= 2.0]
        if len(true) < 2:
            continue
        coeffs = np.array([1.0 + 0j])
        for r in true:
            coeffs = np.convolve(coeffs, [-r, 1.0])
        rs = roots(coeffs)  # convolution built them ascending already
        rebuilt = np.array([1.0 + 0j])
        for r in rs.roots:
            rebuilt = np.convolve(rebuilt, [-r, 1.0])
        scale = np.max(np.abs(coeffs))
        assert np.max(np.abs(rebuilt - coeffs)) <= 1e-8 * scale


def test_roots_high_degree_cyclotomic():
    rs = roots(cyclotomic(101))
    assert len(rs.roots) == 100
    assert np.max(np.abs(np.abs(np.asarray(rs.roots)) - 1.0)) < 1e-9
    assert rs.residual_bound <= 1e-10


def test_roots_rejects_constant():
    with pytest.raises((ValueError, RootFindingError)):
        roots(IntPolynomial((5,)))


# ----------------------------------------------------------------- generators

def test_cyclotomic_frozen_small_cases():
    assert cyclotomic(1).coeffs == (-1, 1)
    assert cyclotomic(2).coeffs == (1, 1)
    assert cyclotomic(4).coeffs == (1, 0, 1)
    assert cyclotomic(5).coeffs == (1, 1, 1, 1, 1)
    assert cyclotomic(6).coeffs == (1, -1, 1)
    assert cyclotomic(12).coeffs == (1, 0, -1, 0, 1)


def test_cyclotomic_product_identity():
    # prod over d | n of cyclotomic(d) == z^n - 1, exactly, for n <= 60
    for n in range(1, 61):
        prod = IntPolynomial((1,))
        for d in range(1, n + 1):
            if n % d == 0:
                prod = prod * cyclotomic(d)
        target = IntPolynomial((-1,) + (0,) * (n - 1) + (1,))
        assert prod == target, f"n={n}"


def test_chebyshev_monic_frozen_and_recurrence():
    assert chebyshev_monic(0).coeffs == (2,)
    assert chebyshev_monic(1).coeffs == (0, 1)
    assert chebyshev_monic(2).coeffs == (-2, 0, 1)
    assert chebyshev_monic(5).coeffs == (0, 5, 0, -5, 0, 1)
    # p_{n+1} = z * p_n - p_{n-1}
    z = IntPolynomial((0, 1))
    for n in range(1, 20):
        assert chebyshev_monic(n + 1) == z * chebyshev_monic(n) - chebyshev_monic(n - 1)


def test_chebyshev_value_identity():
    # p_n(2 cos t) == 2 cos(n t), oracle independent of the recurrence
    for n in (1, 2, 3, 5, 8, 13, 21):
        p = chebyshev_monic(n)
        for t in np.linspace(0.1, 3.0, 17):
            x = Fraction(2 * math.cos(t))  # exact dyadic lift of the float
            got = float(p(x))
            assert abs(got - 2 * math.cos(n * float(t))) < 1e-10, (n, t)


def test_runaway_family_frozen_drifts():
    assert runaway_drift(4) == 7
    assert runaway_drift(6) == 11
    assert runaway_drift(9) == 20
    f6 = runaway_family(6)
    assert f6.coeffs == (1, 0, 0, 0, 0, -11, 1)


def test_runaway_root_count_inside_unit_disk():
    # d - 1 roots strictly inside |z| < 1 for every degree in range
    for d in range(4, 15):
        rs = roots(runaway_family(d))
        inside = int(np.sum(np.abs(np.asarray(rs.roots)) < 1.0))
        assert inside == d - 1, d


def test_power_map_generators():
    assert power_map(5).coeffs == (0, 0, 0, 0, 0, 1)
    assert power_map_plus_z(5).coeffs == (0, 1, 0, 0, 0, 1)


# -------------------------------------------------------------- exact orbits

def test_iterate_exact_integer_orbit():
    p = IntPolynomial((-2, 0, 1))  # z^2 - 2
    orbit = iterate_exact(p, Fraction(3), 3)
    assert orbit == [Fraction(3), Fraction(7), Fraction(47), Fraction(2207)]


def test_iterate_exact_rational_orbit():
    p = IntPolynomial((-2, 0, 1))
    orbit = iterate_exact(p, Fraction(5, 2), 2)
    assert orbit == [Fraction(5, 2), Fraction(17, 4), Fraction(257, 16)]


def test_iterate_exact_digit_cap():
    p = IntPolynomial((0, 0, 1))  # z^2
    with pytest.raises(ValueError) as err:
        iterate_exact(p, Fraction(10**50), 10, max_digits=500)
    assert "step" in str(err.value)
