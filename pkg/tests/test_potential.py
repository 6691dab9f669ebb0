"""Compact set models: Fekete search, capacity, equilibrium, Green values, sup norms."""

import math

import numpy as np
import pytest

from feketedyn.polyarith import IntPolynomial, chebyshev_monic
from feketedyn.potential import (
    CompactSetModel,
    UnsupportedSetError,
    capacity_estimate,
    equilibrium_measure,
    fekete_points,
    green_eval,
    green_eval_many,
    minimality_diagnostics,
    subset_with_unit_capacity,
    supnorm,
)


def _interval_green(z):
    # independent oracle: exterior Joukowski map of [-2, 2]
    z = complex(z)
    w = (z + np.sqrt(z - 2) * np.sqrt(z + 2)) / 2
    return max(0.0, math.log(abs(w)))


# ------------------------------------------------------------------ closed forms

def test_capacity_closed_forms():
    assert CompactSetModel.interval(-2, 2).log_capacity == pytest.approx(0.0, abs=1e-12)
    assert CompactSetModel.interval(0, 1).log_capacity == pytest.approx(math.log(0.25), abs=1e-12)
    assert CompactSetModel.disk(0, 2).log_capacity == pytest.approx(math.log(2), abs=1e-12)
    assert CompactSetModel.circle(1 + 1j, 0.5).log_capacity == pytest.approx(math.log(0.5), abs=1e-12)


def test_boundary_sample_counts():
    assert len(CompactSetModel.interval(-2, 2).boundary_samples) == 4096
    two = CompactSetModel.union_of_intervals([(-2, -1), (1, 2)])
    assert len(two.boundary_samples) == 8192  # 4096 per connected component


def test_symmetry_flag():
    assert CompactSetModel.interval(-2, 2).symmetric
    assert CompactSetModel.disk(0, 1).symmetric
    assert not CompactSetModel.disk(1j, 1).symmetric


# ------------------------------------------------------------------ Fekete points

def test_fekete_interval_two_points_are_endpoints():
    e = CompactSetModel.interval(-2, 2)
    pts = fekete_points(e, 2)
    assert np.allclose(np.sort(pts.real), [-2, 2], atol=1e-9)


def test_fekete_circle_four_points_form_square():
    e = CompactSetModel.circle(0, 1)
    pts = fekete_points(e, 4)
    # pairwise distance product for a square inscribed in the unit circle is
    # n^(n/2) = 16, the roots-of-unity discriminant value
    prod = 1.0
    for i in range(4):
        for j in range(i + 1, 4):
            prod *= abs(pts[i] - pts[j])
    assert prod == pytest.approx(16.0, rel=1e-6)
    # square up to rotation: angles equally spaced
    ang = np.sort(np.mod(np.angle(pts), 2 * np.pi))
    gaps = np.diff(np.concatenate([ang, [ang[0] + 2 * np.pi]]))
    assert np.allclose(gaps, np.pi / 2, atol=1e-2)


def test_fekete_disk_three_points_equilateral_on_boundary():
    e = CompactSetModel.disk(0, 1)
    pts = fekete_points(e, 3)
    assert np.allclose(np.abs(pts), 1.0, atol=1e-9)
    prod = abs(pts[0] - pts[1]) * abs(pts[0] - pts[2]) * abs(pts[1] - pts[2])
    assert prod == pytest.approx(3 ** 1.5, rel=1e-4)


# ------------------------------------------------------------ capacity estimates

def test_capacity_estimate_circle_closed_form():
    e = CompactSetModel.circle(0, 1)
    # d_16 = 16^(1/15) for the unit circle
    assert capacity_estimate(e, 16) == pytest.approx(16 ** (1 / 15), rel=1e-4)


def _lobatto_dn_interval(n: int) -> float:
    # exact Fekete points of an interval: endpoints + zeros of P'_{n-1}
    from numpy.polynomial import legendre

    c = np.zeros(n)
    c[-1] = 1.0
    r = legendre.legroots(legendre.legder(c))
    pts = np.concatenate([[-1.0], r, [1.0]]) * 2.0
    diff = np.abs(pts[:, None] - pts[None, :])
    iu = np.triu_indices(n, 1)
    return float(np.exp(2 * np.sum(np.log(diff[iu])) / (n * (n - 1))))


def test_capacity_estimate_interval_matches_lobatto_oracle():
    e = CompactSetModel.interval(-2, 2)
    assert capacity_estimate(e, 64) == pytest.approx(_lobatto_dn_interval(64), rel=1e-4)
    # slow convergence toward cap = 1 from above
    assert 1.0 < capacity_estimate(e, 128) < 1.05


def test_capacity_estimate_monotone_in_n():
    for e in (CompactSetModel.circle(0, 1), CompactSetModel.interval(-2, 2),
              CompactSetModel.disk(0, 2)):
        ladder = [capacity_estimate(e, n) for n in (4, 8, 16, 32, 64)]
        for lo, hi in zip(ladder[1:], ladder[:-1]):
            assert lo <= hi + 1e-9, (e.kind, ladder)


def test_capacity_estimate_two_intervals():
    # independent closed form: cap([-b,-a] u [a,b]) = sqrt(b^2 - a^2) / 2
    e = CompactSetModel.union_of_intervals([(-2, -1), (1, 2)])
    target = math.sqrt(3) / 2
    est = capacity_estimate(e, 128)
    assert target - 0.005 <= est <= target * 1.06


# --------------------------------------------------------------- equilibrium

def test_equilibrium_measure_uniform_weights():
    e = CompactSetModel.circle(0, 1)
    m = equilibrium_measure(e, 64)
    assert np.allclose(m.weights, 1 / 64, atol=1e-15)
    assert abs(np.sum(m.weights) - 1.0) <= 1e-12
    assert abs(np.sum(m.weights * m.points)) < 0.05  # first moment near zero


def test_equilibrium_measure_interval_arcsine_histogram():
    e = CompactSetModel.interval(-2, 2)
    m = equilibrium_measure(e, 64)
    edges = np.linspace(-2, 2, 9)
    hist, _ = np.histogram(m.points.real, bins=edges)
    frac = hist / 64
    arcsine = np.diff(np.arcsin(edges / 2)) / np.pi
    assert np.max(np.abs(frac - arcsine)) <= 0.08


# ------------------------------------------------------------------- Green values

def test_green_interval_against_joukowski_oracle():
    e = CompactSetModel.interval(-2, 2)
    for z in (3.0, -2.5, 1j, 2 + 1j, 0.5 + 0.25j, -1 - 3j, 5.0):
        assert green_eval(e, z) == pytest.approx(_interval_green(z), abs=1e-6), z


def test_green_value_at_three():
    e = CompactSetModel.interval(-2, 2)
    assert green_eval(e, 3.0) == pytest.approx(0.9624236501192069, abs=1e-6)


def test_green_clamps_to_zero_inside():
    e = CompactSetModel.interval(-2, 2)
    assert green_eval(e, 0.7) == 0.0
    assert green_eval(e, -2.0) == 0.0
    d = CompactSetModel.disk(0, 1)
    assert green_eval(d, 0.3 + 0.4j) == 0.0
    c = CompactSetModel.circle(0, 1)
    assert green_eval(c, 0.0) == 0.0  # hull of the circle is the disk


def test_green_disk_matches_log_plus():
    d = CompactSetModel.disk(0, 1)
    for r in (1.2, 1.5, 2.0, 3.0):
        assert green_eval(d, r) == pytest.approx(math.log(r), abs=1e-5)
    big = CompactSetModel.disk(0, 2)
    assert green_eval(big, 4.0) == pytest.approx(math.log(2.0), abs=1e-6)


def test_green_far_field_asymptotics():
    rng = np.random.default_rng(3)
    for e in (CompactSetModel.interval(-2, 2), CompactSetModel.disk(0, 1),
              CompactSetModel.circle(0, 1), CompactSetModel.union_of_intervals([(-2, -1), (1, 2)])):
        diam = 4.0
        z = (2 * diam + 1) * np.exp(2j * np.pi * rng.random(20)) * (1 + rng.random(20))
        g = green_eval_many(e, z)
        expected = np.log(np.abs(z)) - e.log_capacity
        assert np.max(np.abs(g - expected)) <= 0.02, e.kind


def test_green_nonnegative_everywhere():
    e = CompactSetModel.interval(-2, 2)
    rng = np.random.default_rng(11)
    z = rng.uniform(-3, 3, 200) + 1j * rng.uniform(-3, 3, 200)
    assert np.min(green_eval_many(e, z)) >= 0.0


# --------------------------------------------------------------------- supnorm

def test_supnorm_chebyshev_equioscillation():
    e = CompactSetModel.interval(-2, 2)
    assert supnorm(chebyshev_monic(5), e) == pytest.approx(2.0, abs=1e-6)
    assert supnorm(IntPolynomial((-2, 0, 1)), e) == pytest.approx(2.0, abs=1e-6)


def test_supnorm_large_coefficients_stable():
    # coefficient-form evaluation of this polynomial is cancellation-hostile;
    # the exact path must still see the true sup of 2
    e = CompactSetModel.interval(-2, 2)
    assert supnorm(chebyshev_monic(64), e) == pytest.approx(2.0, rel=1e-9)


def test_supnorm_identity_on_disk():
    e = CompactSetModel.disk(0, 1)
    assert supnorm(IntPolynomial((0, 1)), e) == pytest.approx(1.0, abs=1e-9)


# ----------------------------------------------------------------- diagnostics

def test_minimality_chebyshev_family():
    e = CompactSetModel.interval(-2, 2)
    seq = [chebyshev_monic(n) for n in (2, 4, 8, 16, 32, 64)]
    rep = minimality_diagnostics(seq, e)
    assert rep.minimal_leading and rep.minimal_supnorm
    assert rep.rows[-1][1] == pytest.approx(0.0, abs=1e-12)  # monic column
    assert rep.rows[-1][2] == pytest.approx(math.log(2) / 64, abs=1e-3)


def test_minimality_flags_bad_leading_growth():
    # 2^n z^n on the closed unit disk: leading column sits at log 2, not 0
    e = CompactSetModel.disk(0, 1)
    seq = [IntPolynomial((0,) * n + (2 ** n,)) for n in (1, 2, 4, 8)]
    rep = minimality_diagnostics(seq, e)
    assert not rep.minimal_leading
    assert rep.leading_deviation == pytest.approx(math.log(2), abs=1e-9)


# ------------------------------------------------------------------ geometry

def test_distance_to_set():
    e = CompactSetModel.interval(-2, 2)
    assert e.distance_to(3 + 4j) == pytest.approx(math.sqrt(17), abs=1e-12)
    assert e.distance_to(1.0) == 0.0
    c = CompactSetModel.circle(0, 1)
    assert c.distance_to(2.0) == pytest.approx(1.0, abs=1e-12)
    assert c.distance_to(0.0) == pytest.approx(1.0, abs=1e-12)
    assert c.hull_distance_to(0.0) == 0.0


def test_point_cloud_kind():
    pts = np.exp(2j * np.pi * np.arange(512) / 512)
    e = CompactSetModel.point_cloud(pts)
    assert not e.regular
    assert abs(capacity_estimate(e, 64) - 1.0) < 0.08


def test_polyline_square():
    verts = [1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j]
    e = CompactSetModel.polyline_boundary(verts)
    assert e.contains(0.0)
    assert not e.contains(2.0)
    # cap(square of side a) = a * Gamma(1/4)^2 / (4 pi^(3/2))
    target = 2 * math.gamma(0.25) ** 2 / (4 * math.pi ** 1.5)
    assert capacity_estimate(e, 128) == pytest.approx(target, rel=0.05)


# -------------------------------------------------------- unit-capacity search

def test_subset_shrink_reaches_unit_capacity():
    e = CompactSetModel.union_of_intervals([(-3, -1), (1, 3)])
    shrunk = subset_with_unit_capacity(e)
    assert abs(capacity_estimate(shrunk, 64) - 1.0) <= 0.05
    for (a, b), (a0, b0) in zip(shrunk.params["intervals"], e.params["intervals"]):
        assert a >= a0 - 1e-9 and b <= b0 + 1e-9


def test_subset_shrink_reports_failure():
    small = CompactSetModel.union_of_intervals([(-1, 0), (0.5, 1)])
    with pytest.raises(ValueError):
        subset_with_unit_capacity(small)
    with pytest.raises(UnsupportedSetError):
        subset_with_unit_capacity(CompactSetModel.disk(0, 2))
