"""Uniform distance between Green functions of compact sets.

The distance between two sets is the sup norm of the difference of their
Green functions over the whole plane.  The difference is harmonic off the
union of the two sets and tends to the gap of log capacities at infinity,
so its extremes occur on the two boundaries or at infinity; that turns an
unbounded search into a finite maximum over boundary samples plus the
capacity gap.  A coarse grid audit is provided to cross-check the formula.

Also here: the preimage operator that pulls a compact set back through a
polynomial (a contraction by 1/degree in this distance), and a moment-based
discrepancy between discrete measures.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Callable, NamedTuple

import numpy as np

from .dynamics import DynGreenEvaluator, brolin_sample, julia_capacity
from .polyarith import ComplexPolynomial, IntPolynomial, roots
from .potential import CompactSetModel, DiscreteMeasure, green_eval_many

__all__ = [
    "GreenSide",
    "GreenPair",
    "side_from_set",
    "side_from_map",
    "klimek_distance",
    "klimek_report",
    "grid_audit",
    "pullback",
    "contraction_check",
    "ContractionResult",
    "measure_discrepancy",
]

# boundary sampling below this cannot support a trustworthy sup
MIN_SIDE_SAMPLES = 256
GRID_AUDIT_TOL = 1e-3
CONTRACTION_TOL = 1e-3
# iterated pullbacks multiply sample counts by the degree; cap the source side
MAX_PULLBACK_SOURCES = 2048


@dataclasses.dataclass(frozen=True, eq=False)
class GreenSide:
    """One side of a distance computation: boundary samples plus a Green
    evaluator normalized with pole at infinity (g ~ log|z| - log cap)."""

    samples: np.ndarray
    green_many: Callable[[np.ndarray], np.ndarray]
    log_cap: float | None
    regular: bool
    label: str

    def __post_init__(self):
        pts = np.asarray(self.samples, dtype=np.complex128)
        if len(pts) == 0:
            raise ValueError("a side needs at least one boundary sample")
        object.__setattr__(self, "samples", pts)


@dataclasses.dataclass(frozen=True, eq=False)
class GreenPair:
    left: GreenSide
    right: GreenSide

    @property
    def probe_points(self) -> np.ndarray:
        return np.concatenate([self.left.samples, self.right.samples])

    @property
    def caps(self) -> tuple[float | None, float | None]:
        return (self.left.log_cap, self.right.log_cap)


def side_from_set(e: CompactSetModel) -> GreenSide:
    return GreenSide(
        samples=e.hull_samples,
        green_many=lambda z, e=e: green_eval_many(e, z),
        log_cap=float(e.log_capacity),
        regular=e.regular,
        label=e.kind,
    )


def side_from_map(poly, n_atoms: int = 1024, seed: int = 0,
                  preimages=None, max_iter: int | None = None) -> GreenSide:
    """Side backed by a polynomial Julia set: boundary samples are backward
    orbit atoms, the Green evaluator is the escape-rate function."""
    ev = DynGreenEvaluator(poly) if max_iter is None else DynGreenEvaluator(
        poly, max_iter=max_iter)
    atoms = brolin_sample(poly, n_atoms, seed=seed, preimages=preimages).points

    def gm(z, ev=ev):
        return ev.green_many(np.asarray(z, dtype=np.complex128))[0]

    # polynomial Julia sets carry a continuous Green function
    return GreenSide(samples=atoms, green_many=gm,
                     log_cap=math.log(julia_capacity(poly)),
                     regular=True, label="julia")


# --------------------------------------------------------------------------- #
# the distance
# --------------------------------------------------------------------------- #


def _evaluate(pair: GreenPair):
    left, right = pair.left, pair.right
    for s in (left, right):
        if s.log_cap is None or not math.isfinite(s.log_cap):
            raise ValueError("both sides need a finite log capacity")
        if len(s.samples) < MIN_SIDE_SAMPLES:
            raise ValueError(
                f"need at least {MIN_SIDE_SAMPLES} boundary samples per side")
    on_left = np.asarray(right.green_many(left.samples), dtype=float)
    on_right = np.asarray(left.green_many(right.samples), dtype=float)
    cap_gap = abs(left.log_cap - right.log_cap)
    i = int(np.argmax(on_left))
    j = int(np.argmax(on_right))
    candidates = [
        (float(on_left[i]), "left", complex(left.samples[i])),
        (float(on_right[j]), "right", complex(right.samples[j])),
        (cap_gap, "capacity", None),
    ]
    val, side, point = max(candidates, key=lambda c: c[0])
    return val, side, point, cap_gap


def klimek_distance(pair: GreenPair) -> float:
    """Sup-norm distance between the two Green functions, evaluated as
    max(sup of g_right on the left boundary, sup of g_left on the right
    boundary, |log cap difference|)."""
    return _evaluate(pair)[0]


def klimek_report(pair: GreenPair) -> dict:
    """Distance together with where and how it was attained.

    regularity_verified is False when either side lacks the regularity
    flag; the boundary-maximum formula needs continuity of both Green
    functions, which is not checked for raw point clouds.
    """
    val, side, point, cap_gap = _evaluate(pair)
    return {
        "gamma": val,
        "argmax_point": None if point is None else (point.real, point.imag),
        "side": side,
        "cap_gap": cap_gap,
        "regularity_verified": bool(pair.left.regular and pair.right.regular),
    }


def grid_audit(pair: GreenPair, resolution: int = 128,
               tol: float = GRID_AUDIT_TOL) -> dict:
    """Cross-check the boundary formula on a coarse grid around the sets.

    No grid point may exceed the formula value by more than tol."""
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    gamma = klimek_distance(pair)
    pts = pair.probe_points
    lo_x, hi_x = float(np.min(pts.real)), float(np.max(pts.real))
    lo_y, hi_y = float(np.min(pts.imag)), float(np.max(pts.imag))
    margin = 0.25 * max(hi_x - lo_x, hi_y - lo_y, 1.0)
    xs = np.linspace(lo_x - margin, hi_x + margin, resolution)
    ys = np.linspace(lo_y - margin, hi_y + margin, resolution)
    zs = (xs[None, :] + 1j * ys[:, None]).ravel()
    diff = np.abs(np.asarray(pair.left.green_many(zs), dtype=float)
                  - np.asarray(pair.right.green_many(zs), dtype=float))
    k = int(np.argmax(diff))
    return {
        "gamma": gamma,
        "grid_max": float(diff[k]),
        "grid_argmax": (float(zs[k].real), float(zs[k].imag)),
        "resolution": int(resolution),
        "ok": bool(diff[k] <= gamma + tol),
    }


# --------------------------------------------------------------------------- #
# pullback
# --------------------------------------------------------------------------- #


def _as_complex_poly(p) -> ComplexPolynomial:
    if isinstance(p, IntPolynomial):
        return ComplexPolynomial.from_int(p)
    if isinstance(p, ComplexPolynomial):
        return p
    return ComplexPolynomial(np.asarray(p, dtype=np.complex128))


def pullback(p, e: CompactSetModel,
             max_sources: int = MAX_PULLBACK_SOURCES) -> CompactSetModel:
    """Preimage of a compact set under a polynomial of degree >= 2.

    Boundary samples are all roots of P(w) = z over the source boundary
    samples.  The capacity comes from the exact identity
    cap(P^{-1}E) = (cap E / |lead|)^{1/d}, and the Green function from
    g(P(z)) / d; neither is re-estimated from the new samples, so iterated
    pullbacks do not compound search error.
    """
    cp = _as_complex_poly(p)
    d = cp.degree
    if d < 2:
        raise ValueError("pullback needs degree at least 2")
    src = e.hull_samples
    if len(src) == 0:
        raise ValueError("source set has no boundary samples")
    if len(src) > max_sources:
        idx = np.unique(np.linspace(0, len(src) - 1, max_sources).round().astype(int))
        src = src[idx]
    base = np.array(cp.coeffs, copy=True)
    pulled = np.empty((len(src), d), dtype=np.complex128)
    for k, z in enumerate(src):
        shifted = base.copy()
        shifted[0] -= z
        pulled[k] = roots(ComplexPolynomial(shifted)).roots
    pts = pulled.ravel()
    lead = abs(complex(cp.coeffs[-1]))
    log_cap = (e.log_capacity - math.log(lead)) / d

    def gfn(z, e=e, cp=cp, d=d):
        z = np.asarray(z, dtype=np.complex128)
        with np.errstate(over="ignore", invalid="ignore"):
            w = cp(z)
        w = np.where(np.isfinite(w), w, 1e300 + 0j)
        return green_eval_many(e, w) / d

    sym = bool(np.allclose(np.sort(pts.imag), np.sort(-pts.imag), atol=1e-9))
    return CompactSetModel(
        kind="point-cloud",
        params={"count": len(pts), "pullback_degree": d},
        boundary_samples=pts, sample_t=None, sample_comp=None,
        symmetric=sym, regular=e.regular, log_capacity=log_cap,
        green_fn=gfn,
    )


class ContractionResult(NamedTuple):
    lhs: float
    rhs: float
    ok: bool


def contraction_check(p, e: CompactSetModel, f: CompactSetModel,
                      tol: float = CONTRACTION_TOL) -> ContractionResult:
    """Check dist(P^{-1}E, P^{-1}F) <= dist(E, F) / deg(P)."""
    cp = _as_complex_poly(p)
    base = klimek_distance(GreenPair(side_from_set(e), side_from_set(f)))
    pe = pullback(cp, e)
    pf = pullback(cp, f)
    lhs = klimek_distance(GreenPair(side_from_set(pe), side_from_set(pf)))
    rhs = base / cp.degree
    return ContractionResult(lhs, rhs, bool(lhs <= rhs + tol))


# --------------------------------------------------------------------------- #
# measure discrepancy
# --------------------------------------------------------------------------- #


def _diameter(pts: np.ndarray) -> float:
    # exact max pairwise distance, chunked to bound memory
    best = 0.0
    step = 2048
    for i in range(0, len(pts), step):
        chunk = pts[i:i + step]
        best = max(best, float(np.max(np.abs(chunk[:, None] - pts[None, :]))))
    return best


def measure_discrepancy(m1: DiscreteMeasure, m2: DiscreteMeasure,
                        k_max: int) -> float:
    """Largest gap of the first k_max moments after mapping both supports
    jointly into a unit-diameter frame centered at the joint support mean.

    The frame makes the value invariant under applying one affine map
    z -> a z + b to both measures: the residual rotation only multiplies
    each moment by a unit-modulus phase."""
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    pts = np.concatenate([m1.points, m2.points])
    span = _diameter(pts)
    if span == 0.0:
        span = 1.0
    c = complex(np.mean(pts))
    z1 = (m1.points - c) / span
    z2 = (m2.points - c) / span
    p1 = np.ones_like(z1)
    p2 = np.ones_like(z2)
    worst = 0.0
    for _ in range(int(k_max)):
        p1 = p1 * z1
        p2 = p2 * z2
        worst = max(worst, abs(complex(p1 @ m1.weights) - complex(p2 @ m2.weights)))
    return float(worst)
