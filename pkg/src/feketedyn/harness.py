"""Experiment orchestration: configured runs, trend checks, report emission.

Three runners cover the desk-scale experiments:

* run_bilu_rumely: per-degree table tying a polynomial family to a fixed
  target set of capacity one (root-cloud diameter, set height of the root
  cloud, distance of the cloud to the set, sup-norm Green distance, moment
  discrepancy of the backward-orbit measure against the target's
  equilibrium measure);
* run_dynamical_fs: containment of the family's filled sets in an
  epsilon-neighborhood of a target, judged by the threshold criterion
  gamma < delta/2 where delta is the Green minimum on the neighborhood's
  boundary ring;
* run_runaway: the drift family x^d - N x^(d-1) + 1 with N = floor(e^sqrt(d)),
  whose conjugates split into d-1 small roots and one runaway root.

Reports carry their configuration and seed. Emission produces CSV (fixed
column order, floats at 12 significant digits), a JSON mirror, optional PGM
rasters, and a MANIFEST.json with a configuration hash, so a rerun with the
same config and seed is byte-identical (wall-clock budgets excepted: a
budget truncates the ladder nondeterministically and is off by default).
Trend assertions never raise; failures land in the report's violations
array.
"""

import concurrent.futures
import dataclasses
import hashlib
import json
import math
import pathlib
import time
from fractions import Fraction

import numpy as np

from . import __version__
from .dynamics import (
    DynGreenEvaluator,
    brolin_sample,
    chebyshev_preimages,
    julia_capacity,
    power_preimages,
    raster,
    write_pgm,
)
from .heights import AlgebraicNumber, canonical_height, rumely_height, weil_height
from .metric import (
    GreenPair,
    GreenSide,
    klimek_distance,
    measure_discrepancy,
    side_from_set,
)
from .polyarith import (
    IntPolynomial,
    RootSet,
    chebyshev_monic,
    cyclotomic,
    power_map,
    roots,
    runaway_drift,
    runaway_family,
)
from .potential import (
    DEFAULT_EQUILIBRIUM_N,
    CompactSetModel,
    DiscreteMeasure,
    UnsupportedSetError,
    equilibrium_measure,
    green_eval_many,
    transfinite_diameter_of_points,
)

FAMILIES = ("cyclotomic", "chebyshev", "power_maps", "runaway", "user")
OUTPUT_FORMATS = ("csv", "json", "pgm")
DEFAULT_LADDER = (4, 8, 16, 32, 64, 128)

BILU_COLUMNS = ("n", "d_n", "h_E", "dist", "gamma", "discrepancy")
FS_COLUMNS = ("n", "gamma", "max_dist", "contained")
RUNAWAY_COLUMNS = ("d", "N_d", "inside", "max_modulus", "h", "target")

MOMENT_ORDER = 8
TARGET_SAMPLES = 1024
RING_SAMPLES = 512
RASTER_RESOLUTION = (256, 256)
TREND_FLOOR = 1e-9
TREND_SLACK = 0.10
# bounded orbits on the large-coefficient exact path are certified well
# before this many steps; keeps the per-sample cost flat
CHEB_EXACT_MAX_ITER = 48
PROBE_GAP_TOL = 1e-3


# --------------------------------------------------------------------------- #
# experiment configuration record
# --------------------------------------------------------------------------- #


@dataclasses.dataclass(frozen=True)
class ExperimentSpec:
    """One configured experiment; every knob that affects the output."""

    name: str
    family: str
    set_config: dict = dataclasses.field(default_factory=dict)
    degree_range: tuple = (4, 128)
    checkpoints: tuple | None = None
    probes: tuple = ()
    outputs: tuple = ("csv", "json")
    seed: int = 0
    epsilon: float = 0.1
    n_atoms: int = 1024
    budget_seconds: float | None = None
    user_polys: tuple = ()

    def __post_init__(self):
        if not self.name:
            raise ValueError("experiment needs a name")
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        lo, hi = self.degree_range
        if not (int(lo) == lo and int(hi) == hi and 1 <= lo <= hi):
            raise ValueError("degree_range must be a nonempty integer interval")
        if self.checkpoints is not None:
            cps = self.checkpoints
            if not cps:
                raise ValueError("checkpoints must be nonempty when given")
            if list(cps) != sorted(set(cps)) or cps[0] < 2:
                raise ValueError("checkpoints must be strictly increasing, >= 2")
            if cps[0] < lo or cps[-1] > hi:
                raise ValueError("checkpoints must lie inside degree_range")
        if set(self.outputs) - set(OUTPUT_FORMATS):
            raise ValueError(f"outputs must be a subset of {OUTPUT_FORMATS}")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.n_atoms < 256:
            raise ValueError("need n_atoms >= 256 for the sup-norm formula")
        if self.budget_seconds is not None and not self.budget_seconds > 0:
            raise ValueError("budget_seconds must be positive when given")
        if self.family == "user" and not self.user_polys:
            raise ValueError("user family needs user_polys")
        for p in self.user_polys:
            if not isinstance(p, IntPolynomial) or p.degree < 2:
                raise ValueError(
                    "user_polys must be integer polynomials of degree >= 2")

    def effective_checkpoints(self) -> tuple:
        if self.checkpoints is not None:
            return tuple(self.checkpoints)
        lo, hi = self.degree_range
        cps = tuple(d for d in DEFAULT_LADDER if lo <= d <= hi)
        if not cps:
            raise ValueError(
                "no default checkpoints inside degree_range; give explicit ones")
        return cps

    def config_dict(self) -> dict:
        """JSON-safe snapshot used for the MANIFEST hash."""
        return {
            "name": self.name,
            "family": self.family,
            "set": dict(self.set_config),
            "degree_range": [int(d) for d in self.degree_range],
            "checkpoints": (None if self.checkpoints is None
                            else [int(c) for c in self.checkpoints]),
            "probes": [str(p) for p in self.probes],
            "outputs": list(self.outputs),
            "seed": int(self.seed),
            "epsilon": float(self.epsilon),
            "n_atoms": int(self.n_atoms),
            "budget_seconds": self.budget_seconds,
            "user_polys": [p.to_text() for p in self.user_polys],
        }


@dataclasses.dataclass
class Report:
    name: str
    columns: tuple
    rows: list
    seed: int
    config: dict
    violations: list
    notes: dict
    rasters: list


# --------------------------------------------------------------------------- #
# configuration
# --------------------------------------------------------------------------- #


def build_set(config: dict, samples: int | None = None) -> CompactSetModel:
    """Catalog set from a flat config block, e.g. {kind = disk, radius = 1}."""
    cfg = dict(config)
    kind = cfg.get("kind")
    m = cfg.get("samples", samples)
    kw = {} if m is None else {"samples": int(m)}
    if kind == "interval":
        return CompactSetModel.interval(float(cfg["a"]), float(cfg["b"]), **kw)
    if kind in ("disk", "circle"):
        ctor = CompactSetModel.disk if kind == "disk" else CompactSetModel.circle
        return ctor(_as_center(cfg.get("center", 0)), float(cfg["radius"]), **kw)
    if kind == "union_of_intervals":
        iv = cfg["intervals"]
        if iv and isinstance(iv[0], (list, tuple)):
            pairs = [(float(a), float(b)) for a, b in iv]
        else:
            if len(iv) % 2:
                raise ValueError("flat interval list needs an even length")
            flat = [float(x) for x in iv]
            pairs = list(zip(flat[0::2], flat[1::2]))
        return CompactSetModel.union_of_intervals(pairs, **kw)
    raise ValueError(f"unknown set kind {kind!r}")


def _as_center(v) -> complex:
    if isinstance(v, (list, tuple)):
        re, im = v
        return complex(float(re), float(im))
    if isinstance(v, str):
        return complex(v.replace(" ", ""))
    return complex(v)


def parse_config(path) -> dict:
    """Flat key-value text (`key = value`, `{...}` blocks, `[...]` lists,
    `#` comments); a file whose first non-blank byte is `{` is read as JSON."""
    text = pathlib.Path(path).read_text()
    if text.lstrip().startswith("{"):
        return json.loads(text)
    out = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"expected 'key = value', got {line!r}")
        key, _, val = line.partition("=")
        out[key.strip()] = _parse_value(val.strip())
    return out


def _split_top(s: str) -> list:
    parts, depth, cur = [], 0, []
    for ch in s:
        if ch in "[{":
            depth += 1
        elif ch in "]}":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts if p.strip()]


def _parse_value(s: str):
    s = s.strip()
    if s.startswith("[") and s.endswith("]"):
        return [_parse_value(p) for p in _split_top(s[1:-1])]
    if s.startswith("{") and s.endswith("}"):
        block = {}
        for part in _split_top(s[1:-1]):
            key, _, val = part.partition("=")
            block[key.strip()] = _parse_value(val.strip())
        return block
    low = s.lower()
    if low in ("true", "false"):
        return low == "true"
    if low in ("none", "null"):
        return None
    if len(s) >= 2 and s[0] == s[-1] and s[0] in "'\"":
        return s[1:-1]
    for cast in (int, float):
        try:
            return cast(s)
        except ValueError:
            pass
    return s


def spec_from_config(cfg: dict, seed_override: int | None = None) -> ExperimentSpec:
    rng = cfg.get("degree_range", [4, 128])
    cps = cfg.get("checkpoints")
    seed = seed_override if seed_override is not None else cfg.get("seed", 0)
    return ExperimentSpec(
        name=str(cfg.get("name", "experiment")),
        family=str(cfg.get("family", "")),
        set_config=dict(cfg.get("set", {})),
        degree_range=(int(rng[0]), int(rng[1])),
        checkpoints=None if cps is None else tuple(int(c) for c in cps),
        probes=tuple(str(p) for p in cfg.get("probes", [])),
        outputs=tuple(cfg.get("outputs", ["csv", "json"])),
        seed=int(seed),
        epsilon=float(cfg.get("epsilon", 0.1)),
        n_atoms=int(cfg.get("n_atoms", 1024)),
        budget_seconds=(None if cfg.get("budget_seconds") is None
                        else float(cfg["budget_seconds"])),
        user_polys=tuple(IntPolynomial.from_text(t)
                         for t in cfg.get("user_polys", [])),
    )


# --------------------------------------------------------------------------- #
# shared machinery
# --------------------------------------------------------------------------- #


def _family_members(spec: ExperimentSpec) -> list:
    """(label, polynomial, preimage solver or None) per checkpoint."""
    if spec.family == "user":
        return [(p.degree, p, None) for p in spec.user_polys]
    makers = {
        "cyclotomic": lambda n: (cyclotomic(n), None),
        "chebyshev": lambda n: (chebyshev_monic(n), chebyshev_preimages(n)),
        "power_maps": lambda n: (power_map(n), power_preimages(n)),
    }
    if spec.family not in makers:
        raise ValueError(f"family {spec.family!r} has no degree ladder")
    out = []
    for n in spec.effective_checkpoints():
        poly, pre = makers[spec.family](n)
        out.append((n, poly, pre))
    return out


def _orbit(family: str, n: int, poly: IntPolynomial) -> np.ndarray:
    """Root cloud of the degree-n member, closed form where one exists."""
    if family == "cyclotomic":
        ks = np.array([k for k in range(1, n) if math.gcd(k, n) == 1])
        return np.exp(2j * np.pi * ks / n)
    if family == "chebyshev":
        k = np.arange(n)
        return (2.0 * np.cos((2 * k + 1) * np.pi / (2 * n))).astype(np.complex128)
    if family == "power_maps":
        return np.zeros(n, dtype=np.complex128)
    return roots(poly).roots


def _orbit_algebraic(poly: IntPolynomial, orbit: np.ndarray) -> AlgebraicNumber:
    rs = RootSet(roots=np.asarray(orbit, dtype=np.complex128), residual_bound=0.0)
    return AlgebraicNumber(minpoly=poly, conjugates=rs)


def _probe_algebraic(probe) -> AlgebraicNumber:
    s = str(probe).strip()
    if " " in s:
        return AlgebraicNumber.from_minpoly(IntPolynomial.from_text(s))
    return AlgebraicNumber.from_rational(Fraction(s))


def _julia_side(poly, atoms: np.ndarray, max_iter: int | None) -> GreenSide:
    ev = (DynGreenEvaluator(poly) if max_iter is None
          else DynGreenEvaluator(poly, max_iter=max_iter))

    def gm(z, ev=ev):
        return ev.green_many(np.asarray(z, dtype=np.complex128))[0]

    return GreenSide(samples=atoms, green_many=gm,
                     log_cap=math.log(julia_capacity(poly)),
                     regular=True, label="julia")


def _trend_violations(column: str, degrees, values, *, decreasing: bool = True,
                      floor: float = TREND_FLOOR,
                      slack: float = TREND_SLACK) -> list:
    """One non-monotone step of relative size <= slack is tolerated; ties at
    numerical zero are ignored. Failures become data, never exceptions."""
    out, budget = [], 1
    for i in range(1, len(values)):
        v0, v1 = values[i - 1], values[i]
        step = (v1 - v0) if decreasing else (v0 - v1)
        if step <= 0:
            continue
        if v0 <= floor and v1 <= floor:
            continue
        if budget > 0 and step <= slack * max(abs(v0), floor):
            budget -= 1
            continue
        out.append({"kind": "trend", "column": column, "degree": int(degrees[i]),
                    "previous": float(v0), "value": float(v1),
                    "direction": "decreasing" if decreasing else "increasing"})
    return out


def _collect(worker, items, threads: int, budget, consume) -> bool:
    """Run worker over items, feeding results to consume() in item order.

    Returns True when the wall-clock budget truncated the ladder. Results
    already consumed survive an exception, so callers can flush partials."""
    start = time.monotonic()
    if threads <= 1:
        for i, item in enumerate(items):
            if budget is not None and i > 0 and time.monotonic() - start > budget:
                return True
            consume(worker(item))
        return False
    with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as ex:
        futures = [ex.submit(worker, item) for item in items]
        try:
            for i, fut in enumerate(futures):
                if budget is not None and i > 0 and time.monotonic() - start > budget:
                    for rest in futures[i:]:
                        rest.cancel()
                    return True
                consume(fut.result())
        except Exception:
            for rest in futures:
                rest.cancel()
            raise
    return False


def _flush_partial(report: Report, out_dir) -> None:
    if out_dir is not None:
        emit(report, ("csv",), out_dir)


def _atoms_raster(poly, atoms: np.ndarray, max_iter: int | None):
    m = 0.5
    bbox = (float(np.min(atoms.real)) - m, float(np.max(atoms.real)) + m,
            float(np.min(atoms.imag)) - m, float(np.max(atoms.imag)) + m)
    if max_iter is None:
        return raster(poly, bbox, RASTER_RESOLUTION)
    return raster(poly, bbox, RASTER_RESOLUTION, max_iter=max_iter)


# --------------------------------------------------------------------------- #
# runners
# --------------------------------------------------------------------------- #


def _require_bilu_target(e: CompactSetModel) -> None:
    if e.kind == "interval":
        if abs(e.params["a"] + 2) <= 1e-12 and abs(e.params["b"] - 2) <= 1e-12:
            return
    if e.kind in ("disk", "circle"):
        if (abs(e.params["center"]) <= 1e-12
                and abs(e.params["radius"] - 1.0) <= 1e-12):
            return
    raise ValueError("equidistribution target must be the unit circle, the "
                     "closed unit disk, or the segment [-2, 2]")


def run_bilu_rumely(spec: ExperimentSpec, out_dir=None, threads: int = 1) -> Report:
    """Per-degree equidistribution table for one family against one target."""
    if spec.family not in ("cyclotomic", "chebyshev", "power_maps"):
        raise ValueError(
            "family must be cyclotomic, chebyshev, or power_maps")
    e = build_set(spec.set_config, samples=TARGET_SAMPLES)
    _require_bilu_target(e)
    target_side = side_from_set(e)
    eq = equilibrium_measure(e, DEFAULT_EQUILIBRIUM_N)
    members = _family_members(spec)
    max_iter = CHEB_EXACT_MAX_ITER if spec.family == "chebyshev" else None

    def worker(member):
        n, poly, pre = member
        orbit = _orbit(spec.family, n, poly)
        atoms = brolin_sample(poly, spec.n_atoms, seed=spec.seed + n,
                              preimages=pre).points
        pair = GreenPair(left=_julia_side(poly, atoms, max_iter),
                         right=target_side)
        gamma = float(klimek_distance(pair))
        disc = float(measure_discrepancy(DiscreteMeasure.uniform(atoms), eq,
                                         MOMENT_ORDER))
        alg = _orbit_algebraic(poly, orbit)
        dist = float(np.max(e.distance_to_many(orbit)))
        # below coordinate rounding the model cannot certify a nonzero gap
        if dist <= 1e-12 * max(1.0, float(np.max(np.abs(orbit)))):
            dist = 0.0
        row = (int(n),
               float(transfinite_diameter_of_points(orbit)),
               float(rumely_height(alg, e).total),
               dist,
               gamma,
               disc)
        gaps = []
        for probe in spec.probes:
            pa = _probe_algebraic(probe)
            hhat = float(canonical_height(poly, pa).total)
            target = float(rumely_height(pa, e).total)
            gap = abs(hhat - target)
            gaps.append({"degree": int(n), "probe": str(probe),
                         "canonical": hhat, "target": target, "gap": gap,
                         "gamma": gamma,
                         "ok": bool(gap <= gamma + PROBE_GAP_TOL)})
        return row, gaps, atoms, poly

    report = Report(name=spec.name, columns=BILU_COLUMNS, rows=[],
                    seed=spec.seed, config=spec.config_dict(),
                    violations=[], notes={}, rasters=[])
    gap_notes, last = [], {}

    def consume(result):
        row, gaps, atoms, poly = result
        report.rows.append(row)
        gap_notes.extend(gaps)
        last["member"] = (poly, atoms)

    try:
        truncated = _collect(worker, members, threads, spec.budget_seconds,
                             consume)
    except Exception:
        _flush_partial(report, out_dir)
        raise
    ns = [r[0] for r in report.rows]
    report.violations.extend(
        _trend_violations("gamma", ns, [r[4] for r in report.rows]))
    report.violations.extend(
        _trend_violations("discrepancy", ns, [r[5] for r in report.rows]))
    report.notes["target"] = e.kind
    report.notes["capacity"] = float(math.exp(e.log_capacity))
    if gap_notes:
        report.notes["height_gap"] = gap_notes
    if truncated:
        report.notes["budget_truncated"] = True
    if "pgm" in spec.outputs and last:
        poly, atoms = last["member"]
        report.rasters.append((f"{spec.name}_julia.pgm",
                               _atoms_raster(poly, atoms, max_iter)))
    return report


def _probe_ring(e: CompactSetModel, eps: float, m: int = RING_SAMPLES) -> np.ndarray:
    """Points at hull-distance exactly eps from the target."""
    if e.kind in ("disk", "circle"):
        c, r = e.params["center"], e.params["radius"]
        th = 2 * np.pi * np.arange(m) / m
        return c + (r + eps) * np.exp(1j * th)
    if e.kind == "interval":
        pairs = [(e.params["a"], e.params["b"])]
    elif e.kind == "union-of-intervals":
        pairs = e.params["intervals"]
    else:
        raise UnsupportedSetError(f"no containment ring for kind {e.kind!r}")
    per = max(8, m // (4 * len(pairs)))
    chunks = []
    for a, b in pairs:
        xs = np.linspace(a, b, per)
        left = a + eps * np.exp(1j * np.linspace(np.pi / 2, 3 * np.pi / 2, per))
        right = b + eps * np.exp(1j * np.linspace(-np.pi / 2, np.pi / 2, per))
        chunks.extend([xs + 1j * eps, xs - 1j * eps, left, right])
    ring = np.concatenate(chunks)
    # overlapping stadia: keep only true ring points of the union
    dist = e.hull_distance_to_many(ring)
    keep = np.abs(dist - eps) <= 1e-9 * max(1.0, eps)
    return ring[keep] if np.any(keep) else ring


def run_dynamical_fs(spec: ExperimentSpec, out_dir=None, threads: int = 1) -> Report:
    """Containment of the family's filled sets in an eps-neighborhood."""
    if spec.family == "runaway":
        raise ValueError("containment runs need a dynamical family")
    e = build_set(spec.set_config, samples=TARGET_SAMPLES)
    cap = float(math.exp(e.log_capacity))
    if cap < 1.0 - 1e-9:
        raise ValueError(
            f"target capacity {cap:.6g} is below 1: filled sets of integer "
            "polynomials have capacity |lead|^(-1/(d-1)) <= 1, so no member "
            "can shrink into this target")
    ring = _probe_ring(e, spec.epsilon)
    delta = float(np.min(green_eval_many(e, ring)))
    target_side = side_from_set(e)
    members = _family_members(spec)
    max_iter = CHEB_EXACT_MAX_ITER if spec.family == "chebyshev" else None

    def worker(member):
        n, poly, pre = member
        atoms = brolin_sample(poly, spec.n_atoms, seed=spec.seed + n,
                              preimages=pre).points
        pair = GreenPair(left=_julia_side(poly, atoms, max_iter),
                         right=target_side)
        gamma = float(klimek_distance(pair))
        max_dist = float(np.max(e.hull_distance_to_many(atoms)))
        row = (int(n), gamma, max_dist, bool(max_dist <= spec.epsilon))
        return row, atoms, poly

    report = Report(name=spec.name, columns=FS_COLUMNS, rows=[],
                    seed=spec.seed, config=spec.config_dict(), violations=[],
                    notes={"delta": delta,
                           "capacity_check": {"capacity": cap,
                                              "julia_capacity_bound": 1.0,
                                              "refused": False}},
                    rasters=[])
    last = {}

    def consume(result):
        row, atoms, poly = result
        report.rows.append(row)
        last["member"] = (poly, atoms)

    try:
        truncated = _collect(worker, members, threads, spec.budget_seconds,
                             consume)
    except Exception:
        _flush_partial(report, out_dir)
        raise
    threshold = None
    for n, gamma, _, _ in report.rows:
        if gamma < delta / 2:
            threshold = int(n)
            break
    report.notes["threshold_degree"] = threshold
    if threshold is not None:
        for n, _, max_dist, contained in report.rows:
            if n >= threshold and not contained:
                report.violations.append(
                    {"kind": "containment", "degree": int(n),
                     "max_dist": float(max_dist), "epsilon": spec.epsilon})
    if truncated:
        report.notes["budget_truncated"] = True
    if "pgm" in spec.outputs and last:
        poly, atoms = last["member"]
        report.rasters.append((f"{spec.name}_julia.pgm",
                               _atoms_raster(poly, atoms, max_iter)))
    return report


def run_runaway(spec: ExperimentSpec, out_dir=None, threads: int = 1) -> Report:
    """Per-degree table for the drift family with unbounded conjugates."""
    if spec.family != "runaway":
        raise ValueError("family must be runaway")
    lo, hi = spec.degree_range
    if lo < 4 or hi > 14:
        raise ValueError("drift family degree_range must stay within [4, 14]")
    degrees = (spec.checkpoints if spec.checkpoints is not None
               else tuple(range(lo, hi + 1)))

    def worker(d):
        drift = runaway_drift(d)
        poly = runaway_family(d)
        rs = roots(poly)
        inside = int(np.count_nonzero(np.abs(rs.roots) < 1.0))
        h = float(weil_height(AlgebraicNumber(minpoly=poly, conjugates=rs)).total)
        return (int(d), int(drift), inside, float(rs.max_modulus), h,
                float(math.log(drift) / d))

    report = Report(name=spec.name, columns=RUNAWAY_COLUMNS, rows=[],
                    seed=spec.seed, config=spec.config_dict(), violations=[],
                    notes={}, rasters=[])
    try:
        truncated = _collect(worker, degrees, threads, spec.budget_seconds,
                             report.rows.append)
    except Exception:
        _flush_partial(report, out_dir)
        raise
    for d, _, inside, _, h, target in report.rows:
        if inside != d - 1:
            report.violations.append({"kind": "root_count", "degree": int(d),
                                      "inside": int(inside),
                                      "expected": int(d - 1)})
        if abs(h - target) > 0.1 * target:
            report.violations.append({"kind": "height_band", "degree": int(d),
                                      "h": float(h), "target": float(target)})
    ds = [r[0] for r in report.rows]
    report.violations.extend(
        _trend_violations("h", ds, [r[4] for r in report.rows]))
    report.violations.extend(
        _trend_violations("max_modulus", ds, [r[3] for r in report.rows],
                          decreasing=False))
    if truncated:
        report.notes["budget_truncated"] = True
    return report


# --------------------------------------------------------------------------- #
# emission
# --------------------------------------------------------------------------- #


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.12g" % float(v)
    return str(v)


def _json_native(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(v)
    return v


def emit(report: Report, formats, out_dir) -> list:
    """Write the report under out_dir; returns the paths, MANIFEST last.

    An empty report yields the MANIFEST alone. No timestamps anywhere, so
    reruns with identical config and seed are byte-identical."""
    out = pathlib.Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    if report.rows:
        if "csv" in formats:
            name = f"{report.name}.csv"
            lines = [",".join(report.columns)]
            lines += [",".join(_cell(v) for v in row) for row in report.rows]
            (out / name).write_text("\n".join(lines) + "\n")
            files.append(name)
        if "json" in formats:
            name = f"{report.name}.json"
            payload = {
                "name": report.name,
                "seed": report.seed,
                "config": report.config,
                "columns": list(report.columns),
                "rows": [[_json_native(v) for v in row] for row in report.rows],
                "violations": report.violations,
                "notes": report.notes,
            }
            with open(out / name, "w") as fh:
                json.dump(payload, fh, sort_keys=True, indent=2)
                fh.write("\n")
            files.append(name)
        if "pgm" in formats:
            for fname, ras in report.rasters:
                write_pgm(ras, out / fname)
                files.extend([fname, f"{fname}.json"])
    canon = json.dumps(report.config, sort_keys=True, separators=(",", ":"))
    manifest = {
        "config_hash": hashlib.sha256(canon.encode()).hexdigest(),
        "files": sorted(files),
        "seed": report.seed,
        "version": __version__,
    }
    with open(out / "MANIFEST.json", "w") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=2)
        fh.write("\n")
    files.append("MANIFEST.json")
    return [str(out / f) for f in files]
