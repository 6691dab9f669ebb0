"""Compact plane sets with boundary sampling, Fekete configurations,
transfinite diameter, discrete equilibrium measures, and Green evaluation.

A model is a sampled boundary plus closed-form geometry where available
(membership, distance, capacity). Green values come from the stored discrete
equilibrium measure, clamped to zero on the polynomially convex hull; models
built from dynamical data may install an exact evaluator instead.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .polyarith import ComplexPolynomial, IntPolynomial, eval_intpoly

DEFAULT_BOUNDARY_SAMPLES = 4096
DEFAULT_EQUILIBRIUM_N = 64
_MEMBERSHIP_TOL = 1e-9


class UnsupportedSetError(ValueError):
    """Operation not defined for this set kind."""


@dataclasses.dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Finitely supported probability measure."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.complex128)
        w = np.asarray(self.weights, dtype=np.float64)
        if len(pts) != len(w):
            raise ValueError("points and weights must align")
        if np.any(w < -1e-15):
            raise ValueError("negative weight")
        total = float(np.sum(w))
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {total}, not 1")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls, points) -> "DiscreteMeasure":
        pts = np.asarray(points, dtype=np.complex128)
        return cls(pts, np.full(len(pts), 1.0 / len(pts)))

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("re,im,weight\n")
            for p, w in zip(self.points, self.weights):
                fh.write(f"{p.real:.12g},{p.imag:.12g},{w:.12g}\n")

    @classmethod
    def from_csv(cls, path) -> "DiscreteMeasure":
        rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return cls(rows[:, 0] + 1j * rows[:, 1], rows[:, 2])


class CompactSetModel:
    """Sampled compact set. Construct through the kind classmethods."""

    def __init__(self, kind, params, boundary_samples, sample_t, sample_comp,
                 symmetric, regular, log_capacity=None,
                 equilibrium_n=DEFAULT_EQUILIBRIUM_N,
                 green_fn=None, contains_fn=None, distance_fn=None,
                 point_at=None):
        self.kind = kind
        self.params = params
        self.boundary_samples = np.asarray(boundary_samples, dtype=np.complex128)
        self.sample_t = None if sample_t is None else np.asarray(sample_t, dtype=float)
        self.sample_comp = None if sample_comp is None else np.asarray(sample_comp, dtype=int)
        self.symmetric = bool(symmetric)
        self.regular = bool(regular)
        self.equilibrium_n = int(equilibrium_n)
        self._log_capacity = log_capacity
        self._green_fn = green_fn
        self._contains_fn = contains_fn
        self._distance_fn = distance_fn
        self._point_at = point_at
        self._fekete_cache: dict[int, np.ndarray] = {}
        self._measure_cache: dict[int, DiscreteMeasure] = {}

    # hull boundary approximates the polynomially convex hull's boundary
    @property
    def hull_samples(self) -> np.ndarray:
        return self.boundary_samples

    @property
    def log_capacity(self) -> float:
        if self._log_capacity is None:
            # d_n sinks to cap like 1 + O(log n / n); extrapolate the limit
            # from two rungs instead of quoting a single high estimate
            n2 = min(256, len(self.boundary_samples))
            n1 = max(2, n2 // 2)
            l2 = math.log(capacity_estimate(self, n2))
            if n1 == n2:
                self._log_capacity = l2
            else:
                l1 = math.log(capacity_estimate(self, n1))
                t1, t2 = math.log(n1) / n1, math.log(n2) / n2
                self._log_capacity = (t1 * l2 - t2 * l1) / (t1 - t2)
        return self._log_capacity

    # ------------------------------------------------------------- constructors

    @classmethod
    def interval(cls, a: float, b: float, samples: int = DEFAULT_BOUNDARY_SAMPLES):
        if not b > a:
            raise ValueError("need b > a")
        t = np.linspace(a, b, samples)
        sc = max(1.0, abs(a), abs(b))

        def gfn(z, a=a, b=b, sc=sc):
            # exterior map of the segment; exactly zero on it
            w = (2 * z - (a + b)) / (b - a)
            val = np.log(np.abs(w + np.sqrt(w - 1) * np.sqrt(w + 1)))
            on_seg = ((np.abs(z.imag) <= 1e-9 * sc)
                      & (z.real >= a - 1e-9 * sc) & (z.real <= b + 1e-9 * sc))
            return np.where(on_seg, 0.0, val)

        return cls(
            kind="interval", params={"a": a, "b": b},
            boundary_samples=t.astype(np.complex128), sample_t=t,
            sample_comp=np.zeros(samples, dtype=int),
            symmetric=True, regular=True, log_capacity=math.log((b - a) / 4.0),
            green_fn=gfn,
            point_at=lambda comp, s: complex(min(max(s, a), b), 0.0),
        )

    @classmethod
    def disk(cls, center, radius: float, samples: int = DEFAULT_BOUNDARY_SAMPLES):
        return cls._round(center, radius, samples, kind="disk")

    @classmethod
    def circle(cls, center, radius: float, samples: int = DEFAULT_BOUNDARY_SAMPLES):
        return cls._round(center, radius, samples, kind="circle")

    @classmethod
    def _round(cls, center, radius, samples, kind):
        if radius <= 0:
            raise ValueError("radius must be positive")
        c = complex(center)
        theta = 2 * np.pi * np.arange(samples) / samples

        def gfn(z, c=c, r=radius):
            with np.errstate(divide="ignore"):
                val = np.log(np.abs(z - c) / r)
            # boundary band: points within rounding dust of the circle are on it
            return np.where(val <= 1e-9, 0.0, val)

        return cls(
            kind=kind, params={"center": c, "radius": float(radius)},
            boundary_samples=c + radius * np.exp(1j * theta), sample_t=theta,
            sample_comp=np.zeros(samples, dtype=int),
            symmetric=(c.imag == 0.0), regular=True,
            log_capacity=math.log(radius), green_fn=gfn,
            point_at=lambda comp, s, c=c, r=radius: c + r * complex(math.cos(s), math.sin(s)),
        )

    @classmethod
    def union_of_intervals(cls, intervals, samples: int = DEFAULT_BOUNDARY_SAMPLES):
        ivs = [(float(a), float(b)) for a, b in intervals]
        if not ivs:
            raise ValueError("need at least one interval")
        for a, b in ivs:
            if not b > a:
                raise ValueError("need b > a in every interval")
        ts, comps = [], []
        for i, (a, b) in enumerate(ivs):
            ts.append(np.linspace(a, b, samples))
            comps.append(np.full(samples, i))
        t = np.concatenate(ts)
        pts = np.array(sorted((-a, -b) for a, b in ivs))
        lo, hi = -pts[:, 0], -pts[:, 1]  # sorted by left endpoint
        symmetric = np.allclose(np.sort(lo), np.sort(-hi[::-1]), atol=1e-12)

        def point_at(comp, s, ivs=ivs):
            a, b = ivs[comp]
            return complex(min(max(s, a), b), 0.0)

        return cls(
            kind="union-of-intervals", params={"intervals": ivs},
            boundary_samples=t.astype(np.complex128), sample_t=t,
            sample_comp=np.concatenate(comps),
            symmetric=bool(symmetric), regular=True, point_at=point_at,
        )

    @classmethod
    def polyline_boundary(cls, vertices, samples: int = DEFAULT_BOUNDARY_SAMPLES):
        verts = np.asarray([complex(v) for v in vertices], dtype=np.complex128)
        if len(verts) < 3:
            raise ValueError("need at least three vertices")
        loop = np.concatenate([verts, verts[:1]])
        seg = np.abs(np.diff(loop))
        cum = np.concatenate([[0.0], np.cumsum(seg)])
        total = cum[-1]
        t = total * np.arange(samples) / samples

        def point_at(comp, s, loop=loop, cum=cum, total=total):
            s = s % total
            k = int(np.searchsorted(cum, s, side="right")) - 1
            k = min(k, len(loop) - 2)
            seg_len = cum[k + 1] - cum[k]
            frac = 0.0 if seg_len == 0 else (s - cum[k]) / seg_len
            return complex(loop[k] + frac * (loop[k + 1] - loop[k]))

        pts = np.array([point_at(0, s) for s in t])
        symmetric = np.allclose(np.sort(pts.imag), np.sort(-pts.imag), atol=1e-9)
        return cls(
            kind="polyline-boundary", params={"vertices": verts},
            boundary_samples=pts, sample_t=t,
            sample_comp=np.zeros(samples, dtype=int),
            symmetric=bool(symmetric), regular=True, point_at=point_at,
        )

    @classmethod
    def point_cloud(cls, points):
        pts = np.asarray(points, dtype=np.complex128)
        if len(pts) < 2:
            raise ValueError("need at least two points")
        symmetric = np.allclose(np.sort(pts.imag), np.sort(-pts.imag), atol=1e-9)
        return cls(
            kind="point-cloud", params={"count": len(pts)},
            boundary_samples=pts, sample_t=None, sample_comp=None,
            symmetric=bool(symmetric), regular=False,
        )

    # ------------------------------------------------------------------ geometry

    def _scale(self) -> float:
        s = self.boundary_samples
        return max(1.0, float(np.max(np.abs(s - np.mean(s)))) * 2)

    def contains_many(self, z) -> np.ndarray:
        """Membership in the polynomially convex hull (with a small tolerance)."""
        z = np.asarray(z, dtype=np.complex128)
        if self._contains_fn is not None:
            return self._contains_fn(z)
        tol = _MEMBERSHIP_TOL * self._scale()
        if self.kind == "interval":
            a, b = self.params["a"], self.params["b"]
            return (np.abs(z.imag) <= tol) & (z.real >= a - tol) & (z.real <= b + tol)
        if self.kind in ("disk", "circle"):
            c, r = self.params["center"], self.params["radius"]
            return np.abs(z - c) <= r + tol
        if self.kind == "union-of-intervals":
            out = np.zeros(z.shape, dtype=bool)
            for a, b in self.params["intervals"]:
                out |= (np.abs(z.imag) <= tol) & (z.real >= a - tol) & (z.real <= b + tol)
            return out
        if self.kind == "polyline-boundary":
            return _polygon_contains(self.params["vertices"], z, tol)
        # point clouds have no interior; only the samples themselves count
        d = np.min(np.abs(z[..., None] - self.boundary_samples[None, :]), axis=-1)
        return d <= tol

    def contains(self, z) -> bool:
        return bool(self.contains_many(np.array([z]))[0])

    def distance_to_many(self, z) -> np.ndarray:
        """Distance to the set E itself (not its hull)."""
        z = np.asarray(z, dtype=np.complex128)
        if self._distance_fn is not None:
            return self._distance_fn(z)
        if self.kind == "interval":
            a, b = self.params["a"], self.params["b"]
            dx = np.maximum(np.maximum(a - z.real, z.real - b), 0.0)
            return np.hypot(dx, z.imag)
        if self.kind == "disk":
            c, r = self.params["center"], self.params["radius"]
            return np.maximum(np.abs(z - c) - r, 0.0)
        if self.kind == "circle":
            c, r = self.params["center"], self.params["radius"]
            return np.abs(np.abs(z - c) - r)
        if self.kind == "union-of-intervals":
            stacks = []
            for a, b in self.params["intervals"]:
                dx = np.maximum(np.maximum(a - z.real, z.real - b), 0.0)
                stacks.append(np.hypot(dx, z.imag))
            return np.min(np.stack(stacks), axis=0)
        return np.min(np.abs(z[..., None] - self.boundary_samples[None, :]), axis=-1)

    def distance_to(self, z) -> float:
        return float(self.distance_to_many(np.array([z]))[0])

    def hull_distance_to_many(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=np.complex128)
        d = self.distance_to_many(z)
        return np.where(self.contains_many(z), 0.0, d)

    def hull_distance_to(self, z) -> float:
        return float(self.hull_distance_to_many(np.array([z]))[0])


def _polygon_contains(verts: np.ndarray, z: np.ndarray, tol: float) -> np.ndarray:
    loop = np.concatenate([verts, verts[:1]])
    x, y = z.real, z.imag
    inside = np.zeros(z.shape, dtype=bool)
    for k in range(len(verts)):
        x1, y1 = loop[k].real, loop[k].imag
        x2, y2 = loop[k + 1].real, loop[k + 1].imag
        crosses = (y1 > y) != (y2 > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            xint = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
        inside ^= crosses & (x < xint)
    # tolerance band around the boundary counts as inside
    near = np.min(np.abs(z[..., None] - loop[None, :-1]), axis=-1) <= tol
    return inside | near


# --------------------------------------------------------------------------- #
# Fekete configurations and transfinite diameter
# --------------------------------------------------------------------------- #


def fekete_points(e: CompactSetModel, n: int) -> np.ndarray:
    """n-point Fekete configuration from the boundary samples.

    Deterministic greedy (Leja) seeding followed by local exchange sweeps on
    the sample grid; maximizes the pairwise log-distance sum.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    cached = e._fekete_cache.get(n)
    if cached is not None:
        return cached.copy()
    cand = e.boundary_samples
    m = len(cand)
    if n > m:
        raise ValueError(f"n={n} exceeds {m} boundary samples")

    with np.errstate(divide="ignore", invalid="ignore"):
        # greedy Leja phase
        i0 = int(np.argmax(np.abs(cand - np.mean(cand))))
        chosen = [i0]
        running = np.log(np.abs(cand - cand[i0]))
        for _ in range(n - 1):
            i = int(np.argmax(running))
            chosen.append(i)
            running = running + np.log(np.abs(cand - cand[i]))

        # local exchange sweeps
        idx = np.array(chosen)
        total = np.zeros(m)
        for i in idx:
            total += np.log(np.abs(cand - cand[i]))
        for _ in range(16):
            swapped = False
            for pos in range(n):
                zi = cand[idx[pos]]
                others = np.delete(idx, pos)
                own = float(np.sum(np.log(np.abs(cand[others] - zi))))
                t_wo = total - np.log(np.abs(cand - zi))
                best = int(np.nanargmax(t_wo))
                if t_wo[best] > own + 1e-12 and best not in idx:
                    total = t_wo + np.log(np.abs(cand - cand[best]))
                    idx[pos] = best
                    swapped = True
            if not swapped:
                break
    out = cand[np.sort(idx)]
    e._fekete_cache[n] = out.copy()
    return out


def capacity_estimate(e: CompactSetModel, n: int) -> float:
    """Transfinite-diameter estimate d_n from an n-point Fekete search."""
    pts = fekete_points(e, n)
    diff = np.abs(pts[:, None] - pts[None, :])
    iu = np.triu_indices(n, k=1)
    logsum = float(np.sum(np.log(diff[iu])))
    return math.exp(2.0 * logsum / (n * (n - 1)))


def transfinite_diameter_of_points(pts) -> float:
    """d_n of a finite configuration taken as-is (no search)."""
    pts = np.asarray(pts, dtype=np.complex128)
    n = len(pts)
    if n < 2:
        raise ValueError("need at least two points")
    diff = np.abs(pts[:, None] - pts[None, :])
    iu = np.triu_indices(n, k=1)
    with np.errstate(divide="ignore"):
        logsum = float(np.sum(np.log(diff[iu])))
    return math.exp(2.0 * logsum / (n * (n - 1)))


def equilibrium_measure(e: CompactSetModel, n: int | None = None) -> DiscreteMeasure:
    """Uniform weights on the n-point Fekete configuration."""
    n = e.equilibrium_n if n is None else n
    cached = e._measure_cache.get(n)
    if cached is None:
        cached = DiscreteMeasure.uniform(fekete_points(e, n))
        e._measure_cache[n] = cached
    return cached


# --------------------------------------------------------------------------- #
# Green evaluation
# --------------------------------------------------------------------------- #


def green_eval_many(e: CompactSetModel, z) -> np.ndarray:
    """Green function with pole at infinity: discrete equilibrium potential
    minus log capacity, clamped to zero on the hull and below at zero."""
    z = np.asarray(z, dtype=np.complex128)
    if e._green_fn is not None:
        vals = np.asarray(e._green_fn(z), dtype=float)
        return np.maximum(vals, 0.0)
    mu = equilibrium_measure(e)
    with np.errstate(divide="ignore"):
        pot = np.log(np.abs(z[..., None] - mu.points[None, :])) @ mu.weights
    vals = pot - e.log_capacity
    vals = np.where(e.contains_many(z), 0.0, vals)
    return np.maximum(vals, 0.0)


def green_eval(e: CompactSetModel, z) -> float:
    return float(green_eval_many(e, np.array([z]))[0])


# --------------------------------------------------------------------------- #
# sup norms
# --------------------------------------------------------------------------- #


def _abs_eval(p, z):
    if isinstance(p, IntPolynomial):
        return np.abs(eval_intpoly(p, z))
    if isinstance(p, ComplexPolynomial):
        return np.abs(p(z))
    return np.abs(ComplexPolynomial(np.asarray(p, dtype=np.complex128))(z))


def supnorm(p, e: CompactSetModel) -> float:
    """Max of |p| over the boundary samples, refined by golden-section search
    along the boundary parameterization near the best sample."""
    vals = np.asarray(_abs_eval(p, e.boundary_samples), dtype=float)
    k = int(np.argmax(vals))
    best = float(vals[k])
    if e._point_at is None or e.sample_t is None:
        return best
    comp = int(e.sample_comp[k])
    same = np.nonzero(e.sample_comp == comp)[0]
    ts = e.sample_t[same]
    pos = int(np.searchsorted(same, k))
    spacing = float(np.median(np.diff(np.sort(ts)))) if len(ts) > 1 else 0.0
    lo = e.sample_t[k] - spacing
    hi = e.sample_t[k] + spacing
    _ = pos

    def f(t):
        return float(_abs_eval(p, np.array([e._point_at(comp, t)]))[0])

    best = max(best, _golden_max(f, lo, hi))
    return best


def _golden_max(f, lo, hi, iters: int = 80) -> float:
    gr = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c = b - gr * (b - a)
    d = a + gr * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc < fd:
            a, c, fc = c, d, fd
            d = a + gr * (b - a)
            fd = f(d)
        else:
            b, d, fd = d, c, fc
            c = b - gr * (b - a)
            fc = f(c)
        if b - a < 1e-14 * (1 + abs(a)):
            break
    return max(fc, fd)


# --------------------------------------------------------------------------- #
# minimality diagnostics
# --------------------------------------------------------------------------- #


@dataclasses.dataclass(frozen=True)
class MinimalityReport:
    rows: tuple  # (degree, log|lead|/degree, log sup / degree)
    leading_target: float
    leading_deviation: float
    supnorm_deviation: float
    minimal_leading: bool
    minimal_supnorm: bool
    tol: float


def minimality_diagnostics(seq, e: CompactSetModel, tol: float = 0.05) -> MinimalityReport:
    """Per-degree leading-coefficient and sup-norm growth columns with trend
    flags: a candidate minimal sequence drives log|a_n|/d_n to -log cap(E)
    and log ||P_n||_E / d_n to zero."""
    rows = []
    for p in seq:
        d = p.degree
        if d < 1:
            raise ValueError("need nonconstant polynomials")
        lead = abs(p.leading) if isinstance(p, IntPolynomial) else abs(p.coeffs[-1])
        s = supnorm(p, e)
        rows.append((d, math.log(lead) / d, math.log(s) / d))
    rows.sort(key=lambda r: r[0])
    target = -e.log_capacity
    lead_dev = abs(rows[-1][1] - target)
    sup_dev = abs(rows[-1][2])
    return MinimalityReport(
        rows=tuple(rows),
        leading_target=target,
        leading_deviation=lead_dev,
        supnorm_deviation=sup_dev,
        minimal_leading=lead_dev <= tol,
        minimal_supnorm=sup_dev <= tol,
        tol=tol,
    )


# --------------------------------------------------------------------------- #
# unit-capacity subset search (union-of-intervals only)
# --------------------------------------------------------------------------- #


def subset_with_unit_capacity(e: CompactSetModel, n: int = 64,
                              tol: float = 0.01) -> CompactSetModel:
    """Shrink each interval about its own center until the capacity estimate
    hits 1. Only union-of-intervals models support the search."""
    if e.kind != "union-of-intervals":
        raise UnsupportedSetError(
            "unit-capacity subset search is implemented for union-of-intervals only"
        )
    ivs = e.params["intervals"]

    def scaled(s: float) -> CompactSetModel:
        out = []
        for a, b in ivs:
            c, h = (a + b) / 2, (b - a) / 2
            out.append((c - s * h, c + s * h))
        return CompactSetModel.union_of_intervals(out, samples=1024)

    def est(s: float) -> float:
        return capacity_estimate(scaled(s), n)

    hi = est(1.0)
    if hi < 1.0 - tol:
        raise ValueError(
            f"cannot reach unit capacity: the full union estimates {hi:.6g} < 1"
        )
    lo_s, hi_s = 1e-6, 1.0
    for _ in range(60):
        mid = 0.5 * (lo_s + hi_s)
        v = est(mid)
        if abs(v - 1.0) <= tol:
            lo_s = hi_s = mid
            break
        if v < 1.0:
            lo_s = mid
        else:
            hi_s = mid
    s_final = 0.5 * (lo_s + hi_s)
    out = []
    for a, b in ivs:
        c, h = (a + b) / 2, (b - a) / 2
        out.append((c - s_final * h, c + s_final * h))
    return CompactSetModel.union_of_intervals(out)
