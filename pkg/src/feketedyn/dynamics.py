"""Polynomial dynamics: escape-time Green functions, filled-set rasters,
backward-orbit sampling of the maximal-entropy measure, and the closed-form
capacity of the filled set.

The Green function is computed in log space. Forward iteration runs until the
orbit leaves the escape radius; the remaining contribution is the telescoped
series u + sum_j d^{-(j+1)} (log|a_d| + log|1+eps_j|) over the continued orbit,
accumulated on the reciprocal coordinate v = 1/w so nothing overflows. Integer
polynomials whose coefficient mass defeats float Horner step with exact
big-integer evaluation instead.
"""

from __future__ import annotations

import dataclasses
import json
import math

import numpy as np

from .polyarith import (
    EXACT_EVAL_COEFF_SUM,
    ComplexPolynomial,
    IntPolynomial,
    RootFindingError,
    eval_intpoly,
    roots,
)
from .potential import DiscreteMeasure

DEFAULT_MAX_ITER = 256


def _coerce(poly):
    if isinstance(poly, IntPolynomial):
        return ComplexPolynomial.from_int(poly), poly
    if isinstance(poly, ComplexPolynomial):
        return poly, None
    return ComplexPolynomial(np.asarray(poly, dtype=np.complex128)), None


class DynGreenEvaluator:
    """Escape-rate Green function of a degree >= 2 polynomial."""

    def __init__(self, poly, max_iter: int = DEFAULT_MAX_ITER):
        self.poly, self.int_poly = _coerce(poly)
        d = self.poly.degree
        if d < 2:
            raise ValueError("dynamical Green functions need degree >= 2")
        c = self.poly.coeffs
        self.degree = d
        self.leading_abs = float(abs(c[-1]))
        self.escape_radius = max(2.0, (1.0 + float(np.sum(np.abs(c[:-1])))) / self.leading_abs)
        self.tail_constant = math.log(self.leading_abs) / (d - 1)
        self.max_iter = int(max_iter)
        self._exact = (self.int_poly is not None
                       and sum(abs(x) for x in self.int_poly.coeffs) > EXACT_EVAL_COEFF_SUM)

    def _eps(self, v):
        # (c_{d-1} v + c_{d-2} v^2 + ... + c_0 v^d) / a_d  on v = 1/w
        c = self.poly.coeffs
        acc = np.zeros_like(v)
        for k in range(self.degree):
            acc = acc * v + c[k]
        return acc * v / c[-1]

    def _tail(self, u: np.ndarray, v: np.ndarray, k: np.ndarray) -> np.ndarray:
        d = self.degree
        log_ad = math.log(self.leading_abs)
        g_acc = u.astype(float).copy()
        v = v.astype(np.complex128).copy()
        mult = 1.0 / d
        for _ in range(64):
            eps = self._eps(v)
            delta = np.log(np.abs(1.0 + eps))
            g_acc += mult * (log_ad + delta)
            if mult * (abs(log_ad) + float(np.max(np.abs(delta)))) \
                    < 1e-17 * (1.0 + float(np.max(np.abs(g_acc)))):
                break
            v = v ** d / (self.poly.coeffs[-1] * (1.0 + eps))
            mult /= d
        g_acc += mult * log_ad / (d - 1)
        return np.maximum(g_acc * np.exp(-k * math.log(d)), 0.0)

    def _green_scalar_exact(self, z0: complex):
        r = self.escape_radius
        z = complex(z0)
        for k in range(self.max_iter + 1):
            az = abs(z)
            if az > r:
                g = self._tail(np.array([math.log(az)]), np.array([1.0 / z]),
                               np.array([float(k)]))
                return float(g[0]), False
            if k == self.max_iter:
                break
            znew = eval_intpoly(self.int_poly, z)
            if not (math.isfinite(znew.real) and math.isfinite(znew.imag)):
                # magnitude of the overflowing step, recovered in log space
                eps = complex(self._eps(np.array([1.0 / z]))[0])
                u = math.log(self.leading_abs) + self.degree * math.log(az) \
                    + math.log(abs(1.0 + eps))
                g = self._tail(np.array([u]), np.array([0j]), np.array([float(k + 1)]))
                return float(g[0]), False
            z = complex(znew)
        return 0.0, True

    def green_many(self, zs):
        """Green values and the per-point never-escaped flag."""
        zin = np.asarray(zs, dtype=np.complex128)
        flat = zin.ravel()
        n = len(flat)
        vals = np.zeros(n)
        undecided = np.zeros(n, dtype=bool)
        if self._exact:
            for i, z in enumerate(flat):
                vals[i], undecided[i] = self._green_scalar_exact(complex(z))
            return vals.reshape(zin.shape), undecided.reshape(zin.shape)

        esc_u = np.zeros(n)
        esc_v = np.zeros(n, dtype=np.complex128)
        esc_k = np.zeros(n)
        escaped = np.zeros(n, dtype=bool)
        active = np.ones(n, dtype=bool)
        z = flat.copy()
        r = self.escape_radius
        for k in range(self.max_iter + 1):
            ia = np.nonzero(active)[0]
            if len(ia) == 0:
                break
            za = z[ia]
            mag = np.abs(za)
            out = mag > r
            if out.any():
                ie = ia[out]
                esc_u[ie] = np.log(mag[out])
                esc_v[ie] = 1.0 / za[out]
                esc_k[ie] = k
                escaped[ie] = True
                active[ie] = False
                ia, za = ia[~out], za[~out]
            if k == self.max_iter or len(ia) == 0:
                continue
            with np.errstate(over="ignore", invalid="ignore"):
                znew = self.poly(za)
            blown = ~np.isfinite(znew)
            if blown.any():
                ib = ia[blown]
                zb = za[blown]
                eps = self._eps(1.0 / zb)
                esc_u[ib] = (math.log(self.leading_abs)
                             + self.degree * np.log(np.abs(zb))
                             + np.log(np.abs(1.0 + eps)))
                esc_v[ib] = 0.0
                esc_k[ib] = k + 1
                escaped[ib] = True
                active[ib] = False
            z[ia] = znew
        undecided[:] = active
        if escaped.any():
            vals[escaped] = self._tail(esc_u[escaped], esc_v[escaped], esc_k[escaped])
        return vals.reshape(zin.shape), undecided.reshape(zin.shape)

    def green(self, z) -> float:
        vals, _ = self.green_many(np.array([z], dtype=np.complex128))
        return float(vals[0])


def dyn_green(poly, z, max_iter: int = DEFAULT_MAX_ITER) -> float:
    return DynGreenEvaluator(poly, max_iter=max_iter).green(z)


def julia_capacity(poly) -> float:
    """Capacity of the filled set: |a_d| ** (-1/(d-1)), closed form."""
    cpoly, ipoly = _coerce(poly)
    d = cpoly.degree
    if d < 2:
        raise ValueError("need degree >= 2")
    lead = abs(ipoly.leading) if ipoly is not None else abs(cpoly.coeffs[-1])
    return float(lead) ** (-1.0 / (d - 1))


# --------------------------------------------------------------------------- #
# rasters
# --------------------------------------------------------------------------- #


@dataclasses.dataclass(frozen=True, eq=False)
class JuliaRaster:
    """Grid of Green values over a bbox; zero encodes filled-set membership.

    values[i, j] is the point xs[j] + 1j*ys[i] with both axes ascending.
    undecided marks pixels whose orbit never escaped within max_iter.
    """

    bbox: tuple
    resolution: tuple  # (width, height)
    values: np.ndarray
    undecided: np.ndarray
    xs: np.ndarray
    ys: np.ndarray

    @property
    def membership(self) -> np.ndarray:
        return self.values == 0.0


def raster(poly, bbox, resolution, max_iter: int = DEFAULT_MAX_ITER) -> JuliaRaster:
    re_min, re_max, im_min, im_max = (float(b) for b in bbox)
    w, h = (int(r) for r in resolution)
    if re_max <= re_min or im_max <= im_min:
        raise ValueError("degenerate bbox")
    if w < 16 or h < 16:
        raise ValueError("resolution below 16x16")
    xs = re_min + (np.arange(w) + 0.5) * (re_max - re_min) / w
    ys = im_min + (np.arange(h) + 0.5) * (im_max - im_min) / h
    grid = xs[None, :] + 1j * ys[:, None]
    ev = DynGreenEvaluator(poly, max_iter=max_iter)
    vals, und = ev.green_many(grid)
    return JuliaRaster(bbox=(re_min, re_max, im_min, im_max), resolution=(w, h),
                       values=vals, undecided=und, xs=xs, ys=ys)


def write_pgm(ras: JuliaRaster, path) -> None:
    """8-bit binary PGM, top row = max imaginary part; sidecar JSON holds the
    value scale g_max and the geometry."""
    w, h = ras.resolution
    g_max = float(np.max(ras.values))
    if g_max > 0:
        img = np.round(255.0 * np.minimum(1.0, ras.values / g_max)).astype(np.uint8)
    else:
        img = np.zeros_like(ras.values, dtype=np.uint8)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(img[::-1, :].tobytes())
    sidecar = {
        "bbox": list(ras.bbox),
        "g_max": g_max,
        "resolution": [w, h],
        "undecided_pixels": int(np.count_nonzero(ras.undecided)),
    }
    with open(f"{path}.json", "w") as fh:
        json.dump(sidecar, fh, sort_keys=True, indent=2)
        fh.write("\n")


# --------------------------------------------------------------------------- #
# measure of maximal entropy
# --------------------------------------------------------------------------- #

_ORBIT_CHUNK = 1024


def brolin_sample(poly, n_points: int, burn_in: int = 20, seed: int = 0,
                  preimages=None) -> DiscreteMeasure:
    """Backward random iteration: repeatedly jump to a uniformly chosen
    preimage, starting just outside the escape radius.

    Atoms come in fixed-size chunks with one RNG stream per chunk (seeded by
    seed XOR chunk index), so the result is independent of scheduling.
    """
    if n_points < 1:
        raise ValueError("need n_points >= 1")
    ev = DynGreenEvaluator(poly)
    if preimages is None:
        base = ev.poly.coeffs

        def preimages(c):
            shifted = base.copy()
            shifted[0] = base[0] - c
            return roots(ComplexPolynomial(shifted), tol=1e-9).roots

    pts = np.empty(n_points, dtype=np.complex128)
    n_orbits = (n_points + _ORBIT_CHUNK - 1) // _ORBIT_CHUNK
    for j in range(n_orbits):
        rng = np.random.default_rng((int(seed) ^ j) & ((1 << 63) - 1))
        z = complex(ev.escape_radius + 1.0)
        lo = j * _ORBIT_CHUNK
        hi = min(n_points, lo + _ORBIT_CHUNK)
        for step in range(burn_in + (hi - lo)):
            try:
                pre = np.asarray(preimages(z), dtype=np.complex128)
            except RootFindingError as err:
                raise RootFindingError(
                    f"preimage solve failed at backward step {step} "
                    f"of orbit {j}: {err}"
                ) from err
            z = complex(pre[int(rng.integers(len(pre)))])
            if step >= burn_in:
                pts[lo + step - burn_in] = z
    return DiscreteMeasure.uniform(pts)


def chebyshev_preimages(n: int):
    """Exact preimage solver for the degree-n monic Chebyshev-type map
    2*T_n(z/2), via the cosine parameterization: the preimages of c are
    2 cos((arccos(c/2) + 2 pi k)/n). Float Horner root-finding is useless here
    once the coefficients outgrow the 53-bit mantissa."""
    if n < 2:
        raise ValueError("need degree >= 2")
    ks = 2.0 * np.pi * np.arange(n)

    def pre(c):
        phi = np.arccos(np.complex128(c) / 2.0)
        return 2.0 * np.cos((phi + ks) / n)

    return pre


def power_preimages(n: int):
    """Exact n-th roots as the preimages under the pure power map."""
    if n < 2:
        raise ValueError("need degree >= 2")
    rot = np.exp(2j * np.pi * np.arange(n) / n)

    def pre(c):
        c = np.complex128(c)
        mag = abs(c) ** (1.0 / n)
        ang = np.angle(c) / n
        return mag * np.exp(1j * ang) * rot

    return pre


def laplacian_crosscheck(poly, bbox, resolution) -> DiscreteMeasure:
    """Independent estimate of the maximal-entropy measure: five-point
    discrete Laplacian of the Green raster, positive part, renormalized."""
    w, h = (int(r) for r in resolution)
    if w < 128 or h < 128:
        raise ValueError("laplacian crosscheck needs at least 128x128")
    ras = raster(poly, bbox, (w, h))
    member = ras.membership
    if member[0, :].any() or member[-1, :].any() \
            or member[:, 0].any() or member[:, -1].any():
        raise ValueError("filled set touches the bbox boundary; enlarge the bbox")
    v = ras.values
    lap = (v[:-2, 1:-1] + v[2:, 1:-1] + v[1:-1, :-2] + v[1:-1, 2:]
           - 4.0 * v[1:-1, 1:-1])
    lap = np.maximum(lap, 0.0)
    total = float(np.sum(lap))
    if total <= 0:
        raise ValueError("no positive curvature found; bbox misses the boundary")
    grid = ras.xs[None, 1:-1] + 1j * ras.ys[1:-1, None]
    keep = lap > 0
    return DiscreteMeasure(grid[keep], lap[keep] / total)
