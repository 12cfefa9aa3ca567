"""The geometric dictionary: fractions as geodesics, depth, Ford horoballs,
and partial sums of the relative and parabolic Poincare series.

Conventions (fixed once):
  * the base horosphere sits at Euclidean height 1 in the upper half space,
    so a fraction p/q has depth log|q|^2 exactly;
  * the depth-0 class is the single fraction class with unit denominator;
  * centers and diameters are exact rationals -- for the complex case the
    center is stored as (re, im/sqrt(d)), both Fractions, so squared
    distances stay rational.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .counting import phi, phi_profile
from .field import (
    FieldSpec,
    RingElement,
    arch_norm_sq,
    conj,
    mul,
    norm,
    sub,
    units,
)
from .ideals import (
    InvalidDenominatorError,
    is_coprime,
    norm_histogram,
    principal_ideal,
    reduce_mod,
    unit_ideal,
)


class NonCoprimeError(ValueError):
    """Raised for a fraction whose numerator and denominator share a prime."""


class MixedFieldError(ValueError):
    """Raised when horoballs from different fields are compared."""


@dataclass(frozen=True)
class RationalGeodesic:
    """A fraction p/q mod O with (p, q) = 1, plus its depth log|q|^2.

    Use make_geodesic to build the canonical representative; the dataclass
    itself does not re-normalize.
    """

    field: FieldSpec
    p: RingElement
    q: RingElement
    depth: float


@dataclass(frozen=True)
class Horoball:
    """A Ford circle/sphere tangent to the boundary at p/q.

    center: a single Fraction over Q; over Q(sqrt(-d)) the pair
    (re, im/sqrt(d)) of Fractions.  diameter = 1/|q|^2 exactly.
    """

    field: FieldSpec
    center: Fraction | tuple[Fraction, Fraction]
    diameter: Fraction
    source: RationalGeodesic


@dataclass(frozen=True)
class SeriesPartialSum:
    s: float
    cutoff: float
    value: float
    kind: str  # relative | parabolic


@dataclass(frozen=True)
class DisjointnessReport:
    overlaps: list[tuple[int, int]]
    tangencies: list[tuple[int, int]]
    unimodular_mismatches: list[tuple[int, int]]


# ----------------------------------------------------------------------
# Geodesics
# ----------------------------------------------------------------------

def _orbit_max(f: FieldSpec, q: RingElement) -> tuple[RingElement, RingElement]:
    """(canonical associate, the unit u with u*q canonical); (y, x)-lex maximum."""
    best: RingElement | None = None
    best_u: RingElement | None = None
    for u in units(f):
        cand = mul(f, u, q)
        if best is None or (cand.b, cand.a) > (best.b, best.a):
            best, best_u = cand, u
    assert best is not None and best_u is not None
    return best, best_u


def make_geodesic(f: FieldSpec, p: RingElement, q: RingElement) -> RationalGeodesic:
    """Canonical geodesic for the fraction class p/q mod O.

    q is replaced by the lexicographically largest associate and p reduced
    into the residue box of (q), so associates and O-translates of the same
    class all map to the identical object.
    """
    if q.is_zero():
        raise InvalidDenominatorError("q = 0 is the cusp itself, not a rational line")
    if not is_coprime(f, p, q):
        raise NonCoprimeError(f"({p!r}, {q!r}) is not a coprime pair")
    q_canon, u = _orbit_max(f, q)
    p_canon = reduce_mod(f, mul(f, u, p), principal_ideal(f, q_canon))
    return RationalGeodesic(f, p_canon, q_canon, math.log(arch_norm_sq(f, q_canon)))


def _snap_to_int(x: float) -> int:
    """floor(x), except that values within 1e-9 (relative) of an integer snap
    to it; cutoffs arrive as exp(t) and must not lose exact integer norms."""
    nearest = round(x)
    if abs(x - nearest) <= 1e-9 * max(1.0, abs(nearest)):
        return int(nearest)
    return int(math.floor(x))


def depth_counting(f: FieldSpec, t: float, method: str = "auto", threads: int = 1) -> int:
    """N_e(t): number of fraction classes with depth <= t.

    Depth log|q|^2 <= t means N(q) <= e^(t/2) over Q and N(q) <= e^t over
    an imaginary quadratic field; negative t admits no class (minimum
    depth is 0).
    """
    cutoff = _snap_to_int(math.exp(t / 2 if f.is_rational else t))
    if cutoff < 1:
        return 0
    return phi(f, cutoff, method=method, threads=threads)


def growth_rate(
    f: FieldSpec, t_grid: list[float], method: str = "auto", threads: int = 1
) -> float:
    """Least-squares slope of log N_e(t) against t; approaches the critical
    exponent (1 for the modular orbifold, 2 for the Bianchi ones)."""
    if len(t_grid) < 2 or any(b <= a for a, b in zip(t_grid, t_grid[1:])):
        raise ValueError("t_grid must be strictly increasing with >= 2 points")
    counts = [depth_counting(f, t, method=method, threads=threads) for t in t_grid]
    if any(c <= 0 for c in counts):
        raise ValueError("N_e must be positive on the whole grid")
    slope, _ = np.polyfit(np.asarray(t_grid), np.log(np.asarray(counts, float)), 1)
    return float(slope)


# ----------------------------------------------------------------------
# Horoballs
# ----------------------------------------------------------------------

def _center_of(f: FieldSpec, p: RingElement, q: RingElement):
    if f.is_rational:
        return Fraction(p.a, q.a)
    n = norm(f, q)
    num = mul(f, p, conj(f, q))  # p/q = num / n
    if f.half_basis:
        # a + b*omega = (a + b/2) + (b/2) sqrt(-d)
        return (Fraction(2 * num.a + num.b, 2 * n), Fraction(num.b, 2 * n))
    return (Fraction(num.a, n), Fraction(num.b, n))


def horoball_of(g: RationalGeodesic) -> Horoball:
    """The Ford ball of the geodesic: tangent at p/q, diameter 1/|q|^2."""
    f = g.field
    return Horoball(
        field=f,
        center=_center_of(f, g.p, g.q),
        diameter=Fraction(1, arch_norm_sq(f, g.q)),
        source=g,
    )


def ford_ball(f: FieldSpec, p: RingElement, q: RingElement) -> Horoball:
    """Ford ball at the fraction p/q as written (no reduction mod O).

    Useful for packing checks over a window of raw fractions; horoball_of
    gives the ball of the canonical class representative instead.
    """
    if q.is_zero():
        raise InvalidDenominatorError("q = 0 has no Ford ball")
    if not is_coprime(f, p, q):
        raise NonCoprimeError(f"({p!r}, {q!r}) is not a coprime pair")
    g = RationalGeodesic(f, p, q, math.log(arch_norm_sq(f, q)))
    return horoball_of(g)


def _center_dist_sq(f: FieldSpec, a: Horoball, b: Horoball) -> Fraction:
    if f.is_rational:
        delta = a.center - b.center
        return delta * delta
    (re1, im1), (re2, im2) = a.center, b.center
    dre, dim = re1 - re2, im1 - im2
    return dre * dre + f.d * dim * dim


def check_disjoint(balls: list[Horoball]) -> DisjointnessReport:
    """Exact pairwise disjointness of horoball interiors.

    Two balls tangent to the boundary at c1, c2 with diameters d1, d2 have
    disjoint interiors iff |c1 - c2|^2 >= d1*d2, with equality exactly at
    tangency; every comparison is exact rational arithmetic.  Each verdict
    is cross-checked against the unimodularity criterion
    N-form(p*s - q*r) = 1 on the source fractions.
    """
    if not balls:
        return DisjointnessReport([], [], [])
    f = balls[0].field
    if any(ball.field != f for ball in balls):
        raise MixedFieldError("all horoballs must come from the same field")
    overlaps: list[tuple[int, int]] = []
    tangencies: list[tuple[int, int]] = []
    mismatches: list[tuple[int, int]] = []
    for i in range(len(balls)):
        for j in range(i + 1, len(balls)):
            a, b = balls[i], balls[j]
            dist_sq = _center_dist_sq(f, a, b)
            prod = a.diameter * b.diameter
            tangent = dist_sq == prod
            if dist_sq < prod:
                overlaps.append((i, j))
            elif tangent:
                tangencies.append((i, j))
            cross = sub(
                mul(f, a.source.p, b.source.q), mul(f, a.source.q, b.source.p)
            )
            if tangent != (arch_norm_sq(f, cross) == 1):
                mismatches.append((i, j))
    return DisjointnessReport(overlaps, tangencies, mismatches)


# ----------------------------------------------------------------------
# Poincare series partial sums
# ----------------------------------------------------------------------

_series_cache_lock = threading.Lock()
_totient_increments: dict[tuple[FieldSpec, int], np.ndarray] = {}
_lattice_histograms: dict[tuple[FieldSpec, int], np.ndarray] = {}


def _totient_by_norm(f: FieldSpec, bound: int) -> np.ndarray:
    """w[n] = sum of Phi(q) over denominator classes with N(q) = n."""
    key = (f, bound)
    with _series_cache_lock:
        hit = _totient_increments.get(key)
    if hit is not None:
        return hit
    inc = np.diff(np.asarray(phi_profile(f, bound, method="brute"), dtype=np.int64),
                  prepend=0)
    with _series_cache_lock:
        _totient_increments[key] = inc
    return inc


def _o_histogram(f: FieldSpec, bound: int) -> np.ndarray:
    key = (f, bound)
    with _series_cache_lock:
        hit = _lattice_histograms.get(key)
    if hit is not None:
        return hit
    hist = norm_histogram(f, unit_ideal(f), bound)
    with _series_cache_lock:
        _lattice_histograms[key] = hist
    return hist


def relative_poincare_partial(f: FieldSpec, s: float, cutoff: float) -> SeriesPartialSum:
    """Partial sum of the relative series over double cosets: the depth-0
    term plus Phi(q) * e^(-s * depth) over denominators with N(q) <= cutoff.

    Expanded over fractions, e^(-s*depth(q)) is |q|^(-2s): N(q)^(-s) in the
    quadratic case and q^(-2s) over Q.
    """
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    bound = _snap_to_int(cutoff)
    weights = _totient_by_norm(f, bound).astype(np.float64)
    n = np.arange(bound + 1, dtype=np.float64)
    n[0] = 1.0
    exponent = 2.0 * s if f.is_rational else s
    value = float(np.dot(weights, n ** (-exponent)))
    return SeriesPartialSum(s=s, cutoff=cutoff, value=value, kind="relative")


def parabolic_poincare_partial(f: FieldSpec, s: float, cutoff: float) -> SeriesPartialSum:
    """Partial sum of the stabilizer's series: e^(-s * d(x0, x0 + c)) over
    nonzero c in O with |c| <= cutoff, where d is the upper half-space
    distance between height-1 points, d = 2 * arcsinh(|c| / 2)."""
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    if f.is_rational:
        bound = _snap_to_int(cutoff)
    else:
        bound = _snap_to_int(cutoff * cutoff)
    hist = _o_histogram(f, bound).astype(np.float64)
    n = np.arange(bound + 1, dtype=np.float64)
    abs_c = n if f.is_rational else np.sqrt(n)
    # e^(-2s*arcsinh(t)) = (t + sqrt(1 + t^2))^(-2s) with t = |c|/2
    t = abs_c / 2.0
    with np.errstate(divide="ignore"):
        terms = (t + np.sqrt(1.0 + t * t)) ** (-2.0 * s)
    value = float(np.dot(hist[1:], terms[1:]))
    return SeriesPartialSum(s=s, cutoff=cutoff, value=value, kind="parabolic")


# ----------------------------------------------------------------------
# Empirical convergence verdicts
# ----------------------------------------------------------------------

_PROTOCOL = (
    "diverges: monotone growth of the partial sums with log-log slope > 0.1; "
    "converges: last Cauchy increment < 1e-6, or increments strictly decreasing "
    "while the slope stays <= 0.1; inconclusive otherwise"
)


@dataclass(frozen=True)
class SeriesVerdict:
    verdict: str  # converges | diverges | inconclusive
    cauchy_difference: float
    growth_exponent: float
    protocol: str = _PROTOCOL


def convergence_verdict(sums: list[SeriesPartialSum]) -> SeriesVerdict:
    """Classify a series from partial sums at >= 3 increasing cutoffs.

    Divergence is not decidable from finite sums; the verdict names its
    protocol so downstream consumers never see a bare boolean.
    """
    if len(sums) < 3:
        raise ValueError("need partial sums at >= 3 cutoffs")
    ordered = sorted(sums, key=lambda ps: ps.cutoff)
    if len({ps.kind for ps in ordered}) > 1 or len({ps.s for ps in ordered}) > 1:
        raise ValueError("partial sums must share the same series and exponent")
    values = [ps.value for ps in ordered]
    cuts = [ps.cutoff for ps in ordered]
    diffs = [b - a for a, b in zip(values, values[1:])]
    slope = float(np.polyfit(np.log(cuts), np.log(values), 1)[0])
    cauchy = diffs[-1]
    if slope > 0.1:
        verdict = "diverges"
    elif cauchy < 1e-6:
        verdict = "converges"
    elif all(b < a for a, b in zip(diffs, diffs[1:])):
        verdict = "converges"
    else:
        verdict = "inconclusive"
    return SeriesVerdict(verdict=verdict, cauchy_difference=cauchy, growth_exponent=slope)


__all__ = [
    "NonCoprimeError",
    "MixedFieldError",
    "RationalGeodesic",
    "Horoball",
    "SeriesPartialSum",
    "SeriesVerdict",
    "DisjointnessReport",
    "make_geodesic",
    "depth_counting",
    "growth_rate",
    "horoball_of",
    "ford_ball",
    "check_disjoint",
    "relative_poincare_partial",
    "parabolic_poincare_partial",
    "convergence_verdict",
]
