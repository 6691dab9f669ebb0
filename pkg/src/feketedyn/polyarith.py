"""Exact polynomial layer: integer polynomials, rationals, root finding, generators.

Coefficients are always stored ascending (constant term first), mirroring the
text format ``c0 c1 ... cd``. Integer polynomials carry exact arbitrary
precision coefficients; numerical work happens on complex128 copies.
"""

from __future__ import annotations

import dataclasses
import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

# Exact arbitrary-precision rationals. The stdlib type already provides the
# whole contract (normalized lowest terms, exact field arithmetic).
BigRational = Fraction


class RootFindingError(RuntimeError):
    """Simultaneous iteration failed to reach the requested residual."""


# --------------------------------------------------------------------------- #
# integer polynomials
# --------------------------------------------------------------------------- #


@dataclasses.dataclass(frozen=True)
class IntPolynomial:
    """Polynomial with exact integer coefficients, ascending order.

    >>> p = IntPolynomial((-2, 0, 1))   # z^2 - 2
    >>> p.degree, p(3)
    (2, 7)
    """

    coeffs: tuple[int, ...]

    def __post_init__(self):
        cs = tuple(int(c) for c in self.coeffs)
        while len(cs) > 1 and cs[-1] == 0:
            cs = cs[:-1]
        if not cs:
            cs = (0,)
        object.__setattr__(self, "coeffs", cs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> int:
        return self.coeffs[-1]

    @property
    def is_monic(self) -> bool:
        return self.leading == 1

    @property
    def content(self) -> int:
        return math.gcd(*(abs(c) for c in self.coeffs)) if len(self.coeffs) > 1 else abs(self.coeffs[0])

    def primitive_normalized(self) -> "IntPolynomial":
        """Divide out the content and make the leading coefficient positive."""
        c = self.content
        if c == 0:
            return self
        sign = -1 if self.leading < 0 else 1
        return IntPolynomial(tuple(sign * x // c for x in self.coeffs))

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other: "IntPolynomial") -> "IntPolynomial":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return IntPolynomial(tuple(out))

    def __neg__(self) -> "IntPolynomial":
        return IntPolynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "IntPolynomial") -> "IntPolynomial":
        return self + (-other)

    def __mul__(self, other: "IntPolynomial") -> "IntPolynomial":
        a, b = self.coeffs, other.coeffs
        out = [0] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            if ca == 0:
                continue
            for j, cb in enumerate(b):
                out[i + j] += ca * cb
        return IntPolynomial(tuple(out))

    def derivative(self) -> "IntPolynomial":
        if self.degree == 0:
            return IntPolynomial((0,))
        return IntPolynomial(tuple(i * c for i, c in enumerate(self.coeffs) if i > 0))

    def divmod_exact(self, divisor: "IntPolynomial") -> "IntPolynomial":
        """Exact division over the integers; raises if it does not divide."""
        rem = list(self.coeffs)
        dlead = divisor.leading
        dd = divisor.degree
        out = [0] * (len(rem) - dd)
        for i in range(len(rem) - 1, dd - 1, -1):
            q, r = divmod(rem[i], dlead)
            if r != 0:
                raise ValueError("not an exact integer division")
            out[i - dd] = q
            for j, c in enumerate(divisor.coeffs):
                rem[i - dd + j] -= q * c
        if any(rem):
            raise ValueError("nonzero remainder in exact division")
        return IntPolynomial(tuple(out))

    @classmethod
    def from_text(cls, text: str) -> "IntPolynomial":
        """Parse the ``c0 c1 ... cd`` whitespace-separated format."""
        parts = text.split()
        if not parts:
            raise ValueError("empty polynomial text")
        return cls(tuple(int(p) for p in parts))

    def to_text(self) -> str:
        return " ".join(str(c) for c in self.coeffs)


# --------------------------------------------------------------------------- #
# complex coefficient polynomials
# --------------------------------------------------------------------------- #


@dataclasses.dataclass(frozen=True, eq=False)
class ComplexPolynomial:
    coeffs: np.ndarray  # ascending complex128

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128)
        n = len(c)
        while n > 1 and c[n - 1] == 0:
            n -= 1
        object.__setattr__(self, "coeffs", np.array(c[:n]))

    @classmethod
    def from_int(cls, p: IntPolynomial) -> "ComplexPolynomial":
        return cls(np.array([complex(c) for c in p.coeffs]))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, z):
        z = np.asarray(z, dtype=np.complex128)
        acc = np.full(z.shape, self.coeffs[-1])
        for c in self.coeffs[-2::-1]:
            acc = acc * z + c
        return acc

    def derivative(self) -> "ComplexPolynomial":
        if self.degree == 0:
            return ComplexPolynomial(np.zeros(1, dtype=np.complex128))
        k = np.arange(1, len(self.coeffs))
        return ComplexPolynomial(self.coeffs[1:] * k)


def _coerce_coeffs(p) -> np.ndarray:
    if isinstance(p, IntPolynomial):
        return ComplexPolynomial.from_int(p).coeffs
    if isinstance(p, ComplexPolynomial):
        return p.coeffs
    return ComplexPolynomial(np.asarray(p, dtype=np.complex128)).coeffs


# --------------------------------------------------------------------------- #
# exact evaluation at dyadic points (large-coefficient safety)
# --------------------------------------------------------------------------- #

# Threshold above which float Horner on [-2, 2]-scale points loses the value to
# cancellation; beyond it we evaluate with exact big-integer arithmetic.
EXACT_EVAL_COEFF_SUM = 2**30


def _big_to_float(n: int, shift: int) -> float:
    # float(n * 2**shift) without overflowing the int -> float conversion
    if n == 0:
        return 0.0
    bl = n.bit_length()
    if bl > 1000:
        drop = bl - 64
        n >>= drop
        shift += drop
    try:
        return math.ldexp(float(n), shift)
    except OverflowError:
        return math.inf if n > 0 else -math.inf


def eval_intpoly_real_exact(coeffs: tuple[int, ...], x: float) -> float:
    """Exact Horner of an integer polynomial at a dyadic float."""
    num, den = float(x).as_integer_ratio()
    k = den.bit_length() - 1  # den == 2**k
    d = len(coeffs) - 1
    acc = coeffs[-1]
    for i in range(d - 1, -1, -1):
        acc = acc * num + coeffs[i] * (1 << (k * (d - i)))
    return _big_to_float(acc, -k * d)


def eval_intpoly_complex_exact(coeffs: tuple[int, ...], z: complex) -> complex:
    nr, dr = float(z.real).as_integer_ratio()
    ni, di = float(z.imag).as_integer_ratio()
    kr, ki = dr.bit_length() - 1, di.bit_length() - 1
    k = max(kr, ki)
    a = nr << (k - kr)
    b = ni << (k - ki)
    d = len(coeffs) - 1
    x, y = coeffs[-1], 0
    for i in range(d - 1, -1, -1):
        x, y = x * a - y * b + coeffs[i] * (1 << (k * (d - i))), x * b + y * a
    sh = -k * d
    return complex(_big_to_float(x, sh), _big_to_float(y, sh))


def eval_intpoly(p: IntPolynomial, z):
    """Evaluate at float/complex points, switching to exact arithmetic when
    the coefficient mass makes float Horner cancellation-unsafe."""
    if sum(abs(c) for c in p.coeffs) <= EXACT_EVAL_COEFF_SUM:
        return ComplexPolynomial.from_int(p)(z)
    zs = np.atleast_1d(np.asarray(z, dtype=np.complex128))
    out = np.empty(zs.shape, dtype=np.complex128)
    flat_in, flat_out = zs.ravel(), out.ravel()
    for i, w in enumerate(flat_in):
        if w.imag == 0.0:
            flat_out[i] = eval_intpoly_real_exact(p.coeffs, w.real)
        else:
            flat_out[i] = eval_intpoly_complex_exact(p.coeffs, w)
    return out.reshape(np.shape(z)) if np.ndim(z) else complex(flat_out[0])


# --------------------------------------------------------------------------- #
# root finding (Aberth simultaneous iteration)
# --------------------------------------------------------------------------- #


@dataclasses.dataclass(frozen=True, eq=False)
class RootSet:
    """All roots with multiplicity, plus the scaled residual certificate.

    residual_bound is the backward-error style quantity
    max_j |P(z_j)| / (1 + sum_i |c_i| |z_j|^i); a converged solve sits near
    machine epsilon regardless of coefficient or root magnitudes.
    """

    roots: np.ndarray  # complex128, length == degree
    residual_bound: float

    def __len__(self) -> int:
        return len(self.roots)

    @property
    def max_modulus(self) -> float:
        return float(np.max(np.abs(self.roots)))


def _horner_pair(a: np.ndarray, z: np.ndarray):
    # value and derivative in one sweep (monic-normalized coefficients)
    p = np.full(z.shape, a[-1])
    dp = np.zeros_like(z)
    for c in a[-2::-1]:
        dp = dp * z + p
        p = p * z + c
    return p, dp


def _quadratic_roots(c0, c1, c2) -> np.ndarray:
    disc = c1 * c1 - 4.0 * c2 * c0
    sq = np.sqrt(complex(disc))
    if (np.conj(c1) * sq).real < 0:
        sq = -sq
    q = -0.5 * (c1 + sq)
    if q == 0:
        return np.zeros(2, dtype=np.complex128)
    return np.array([q / c2, c0 / q], dtype=np.complex128)


def _aberth(a: np.ndarray, tol_abs: float, max_iter: int = 500) -> np.ndarray:
    """Aberth simultaneous iteration on a monic coefficient vector."""
    d = len(a) - 1
    cauchy = 1.0 + float(np.max(np.abs(a[:-1])))
    # keep the starting circle inside the overflow-safe range for |z|^d
    radius = min(cauchy, 10.0 ** (250.0 / max(d, 1)))
    k = np.arange(d)
    # deterministic perturbation: fixed rotation plus a tiny radial ramp
    z = radius * np.exp(1j * (2 * np.pi * k / d + 0.4)) * (1 + 1e-4 * (k + 1) / d)
    active = np.ones(d, dtype=bool)
    for _ in range(max_iter):
        p, dp = _horner_pair(a, z)
        bad = dp == 0
        if np.any(bad):
            z = np.where(bad, z * (1 + 1e-8) + 1e-12, z)
            p, dp = _horner_pair(a, z)
        w = p / dp
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        s = np.sum(1.0 / diff, axis=1) - 1.0  # subtract the diagonal's 1/1
        corr = w / (1.0 - w * s)
        corr = np.where(active, corr, 0.0)
        z = z - corr
        moved = np.abs(corr) > 1e-14 * (1.0 + np.abs(z))
        active &= moved
        if not np.any(active):
            break
        if np.max(np.abs(p[~np.isnan(p)] if np.any(np.isnan(p)) else p)) <= 0.01 * tol_abs:
            break
    return z


def _cluster_multiplicities(z: np.ndarray, radius: float) -> np.ndarray:
    if len(z) < 2:
        return z
    n = len(z)
    close = np.abs(z[:, None] - z[None, :]) < radius
    seen = np.zeros(n, dtype=bool)
    out = z.copy()
    for i in range(n):
        if seen[i]:
            continue
        # breadth-first closure of the proximity graph
        group = [i]
        frontier = [i]
        seen[i] = True
        while frontier:
            j = frontier.pop()
            for m in np.nonzero(close[j])[0]:
                if not seen[m]:
                    seen[m] = True
                    group.append(m)
                    frontier.append(m)
        if len(group) > 1:
            out[group] = np.mean(z[group])
    return out


def roots(p, tol: float = 1e-10) -> RootSet:
    """All complex roots with multiplicity via Aberth simultaneous iteration.

    Initial guesses sit on a deterministically perturbed circle at the Cauchy
    bound; roots closer than sqrt(tol) are merged into multiplicity clusters.
    """
    c = _coerce_coeffs(p)
    if len(c) < 2:
        raise ValueError("constant polynomial: no roots to compute")
    scale = 1.0 + float(np.max(np.abs(c)))
    # exact zero constant coefficients peel off roots at the origin
    m = 0
    work = c
    while work[0] == 0 and len(work) > 2:
        m += 1
        work = work[1:]
    if work[0] == 0 and len(work) == 2:
        m += 1
        work = work[1:]
    d = len(work) - 1
    if d == 0:
        found = np.zeros(0, dtype=np.complex128)
    elif d == 1:
        found = np.array([-work[0] / work[1]])
    elif d == 2:
        found = _quadratic_roots(work[0], work[1], work[2])
    else:
        monic = work / work[-1]
        found = _aberth(monic, tol_abs=tol * scale / abs(work[-1]))
    all_roots = np.concatenate([np.zeros(m, dtype=np.complex128), found])
    all_roots = _cluster_multiplicities(all_roots, math.sqrt(tol))
    if len(all_roots):
        vals = np.abs(ComplexPolynomial(c)(all_roots))
        mags = np.abs(all_roots)
        denom = np.ones_like(mags)
        for coeff in np.abs(c[::-1]):
            denom = denom * mags + coeff
        bound = float(np.max(vals / (1.0 + denom)))
    else:
        bound = 0.0
    if bound > tol:
        raise RootFindingError(
            f"root finding did not converge for degree {len(c) - 1} polynomial "
            f"(scaled residual {bound:.3e} > tol {tol:.1e})"
        )
    order = np.lexsort((all_roots.imag, all_roots.real))
    return RootSet(roots=all_roots[order], residual_bound=bound)


# --------------------------------------------------------------------------- #
# generators
# --------------------------------------------------------------------------- #


@lru_cache(maxsize=None)
def cyclotomic(n: int) -> IntPolynomial:
    """n-th cyclotomic polynomial by iterated exact division of z^n - 1."""
    if n < 1:
        raise ValueError("n must be positive")
    num = IntPolynomial((-1,) + (0,) * (n - 1) + (1,))
    for d in range(1, n):
        if n % d == 0:
            num = num.divmod_exact(cyclotomic(d))
    return num


def chebyshev_monic(n: int) -> IntPolynomial:
    """Monic Chebyshev-type polynomial 2*T_n(z/2) via the three-term recurrence."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    p_prev = IntPolynomial((2,))
    if n == 0:
        return p_prev
    p_cur = IntPolynomial((0, 1))
    z = IntPolynomial((0, 1))
    for _ in range(n - 1):
        p_prev, p_cur = p_cur, z * p_cur - p_prev
    return p_cur


def runaway_drift(d: int) -> int:
    return math.floor(math.exp(math.sqrt(d)))


def runaway_family(d: int) -> IntPolynomial:
    """x^d - N_d x^{d-1} + 1 with drift N_d = floor(exp(sqrt(d)))."""
    if d < 2:
        raise ValueError("degree must be at least 2")
    n = runaway_drift(d)
    return IntPolynomial((1,) + (0,) * (d - 2) + (-n, 1))


def power_map(n: int) -> IntPolynomial:
    if n < 2:
        raise ValueError("degree must be at least 2")
    return IntPolynomial((0,) * n + (1,))


def power_map_plus_z(n: int) -> IntPolynomial:
    if n < 2:
        raise ValueError("degree must be at least 2")
    return IntPolynomial((0, 1) + (0,) * (n - 2) + (1,))


# --------------------------------------------------------------------------- #
# exact orbits
# --------------------------------------------------------------------------- #


def _digit_size(x: Fraction) -> int:
    bits = x.numerator.bit_length() + x.denominator.bit_length()
    return int(bits * 0.30103) + 1


def iterate_exact(p: IntPolynomial, x0: Fraction, k: int, max_digits: int = 100_000) -> list[Fraction]:
    """Exact forward orbit [x0, P(x0), ..., P^k(x0)] over the rationals.

    Raises ValueError naming the offending step if an entry exceeds the
    digit cap.
    """
    x = Fraction(x0)
    orbit = [x]
    for i in range(1, k + 1):
        x = Fraction(p(x))
        if _digit_size(x) > max_digits:
            raise ValueError(
                f"exact orbit entry at step {i} exceeds {max_digits} digits"
            )
        orbit.append(x)
    return orbit
