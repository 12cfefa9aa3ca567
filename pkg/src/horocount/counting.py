"""Counting coprime fractions p/q mod O by denominator norm.

Two exact routes are implemented and must agree integer-for-integer:

* brute force -- enumerate denominators up to the norm cutoff (one
  representative per unit orbit) and count coprime residues directly;
* Moebius sieve -- phi(x) = sum over squarefree ideals I of
  mu(I) * T_I(x) / N(I), with T_I(x) the norm sum over principal ideals
  inside I (class-number-1 fields only; see phi_mobius).

Both change value only at integer cutoffs, so the table variants return
the whole profile up to floor(x) at the cost of a single pass.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import log

import numpy as np

from .arith import mobius_sieve, totient_sieve
from .field import (
    FieldSpec,
    RingElement,
    UnsupportedFieldError,
    mul,
    norm,
    omega_times,
    residue_K,
    units,
    zeta_K_2,
)
from .ideals import (
    LatticeIdeal,
    count_and_sum_norms,
    enumerate_norm_le,
    mobius_ideal,
    norm_histogram,
    principal_ideal,
    unit_ideal,
)

METHODS = ("brute", "mobius", "sieve")


@dataclass(frozen=True)
class CountSample:
    """One measured value of the fraction-counting function."""

    x: float
    phi: int
    method: str
    field: FieldSpec


# ----------------------------------------------------------------------
# Denominator enumeration
# ----------------------------------------------------------------------

def unit_orbit_reps(f: FieldSpec, x: float) -> list[RingElement]:
    """One denominator per unit orbit with 1 <= N(q) <= floor(x).

    The representative kept is the (y, x)-lexicographic minimum of its w
    associates, so the enumeration is deterministic.
    """
    bound = int(x)
    us = units(f)
    reps: list[RingElement] = []
    for e in enumerate_norm_le(f, unit_ideal(f), bound):
        lo = min(((u.b, u.a) for u in (mul(f, v, e) for v in us)))
        if (e.b, e.a) == lo:
            reps.append(e)
    return reps


def _coprime_count_box(f: FieldSpec, q: RingElement) -> int:
    """Phi(q): residues in the HNF box of (q) coprime to q, vectorized.

    Coprimality of p and q is norm((p,q)) == 1 with the pair-ideal norm
    expressed as a gcd of 2x2 minors of {p, p*omega, q, q*omega}; all five
    relevant minors are (at most quadratic) integer forms in the residue
    coordinates, so the whole box is tested with numpy integer ops.
    """
    ideal = principal_ideal(f, q)
    xs = np.arange(ideal.alpha, dtype=np.int64)[None, :]
    ys = np.arange(ideal.gamma, dtype=np.int64)[:, None]
    d = f.d
    assert d is not None
    if f.half_basis:
        m = f.half_m
        np_arr = xs * xs + xs * ys + m * ys * ys
        pw_a, pw_b = -m * ys, xs + ys
    else:
        np_arr = xs * xs + d * ys * ys
        pw_a, pw_b = -d * ys, xs
    qw = omega_times(f, q)
    g = np.gcd(np_arr, norm(f, q))
    g = np.gcd(g, xs * q.b - q.a * ys)
    g = np.gcd(g, xs * qw.b - qw.a * ys)
    g = np.gcd(g, pw_a * q.b - q.a * pw_b)
    return int(np.count_nonzero(g == 1))


def _chunks(items: list, n: int) -> list[list]:
    if n <= 1 or len(items) <= 1:
        return [items]
    size = (len(items) + n - 1) // n
    return [items[i : i + size] for i in range(0, len(items), size)]


def _brute_increments(f: FieldSpec, bound: int, threads: int) -> np.ndarray:
    """inc[n] = sum of Phi(q) over orbit representatives with N(q) = n."""
    inc = np.zeros(bound + 1, dtype=np.int64)
    if f.is_rational:
        base = np.arange(bound + 1, dtype=np.int64)

        def do_range(qs: list[int]) -> np.ndarray:
            out = np.zeros(bound + 1, dtype=np.int64)
            for q in qs:
                out[q] = 1 if q == 1 else int(
                    np.count_nonzero(np.gcd(base[1:q], q) == 1)
                )
            return out

        parts = _chunks(list(range(1, bound + 1)), threads)
        if len(parts) == 1:
            return do_range(parts[0])
        with ThreadPoolExecutor(max_workers=len(parts)) as pool:
            for part in pool.map(do_range, parts):
                inc += part
        return inc

    reps = unit_orbit_reps(f, bound)

    def do_reps(qs: list[RingElement]) -> np.ndarray:
        out = np.zeros(bound + 1, dtype=np.int64)
        for q in qs:
            out[norm(f, q)] += _coprime_count_box(f, q)
        return out

    parts = _chunks(reps, threads)
    if len(parts) == 1:
        return do_reps(parts[0])
    with ThreadPoolExecutor(max_workers=len(parts)) as pool:
        for part in pool.map(do_reps, parts):
            inc += part
    return inc


# ----------------------------------------------------------------------
# phi: brute force
# ----------------------------------------------------------------------

def phi_profile(f: FieldSpec, x: float, method: str = "brute", threads: int = 1) -> list[int]:
    """[phi(0), phi(1), ..., phi(floor(x))] computed in one pass."""
    bound = int(x)
    if bound < 1:
        return [0] * (bound + 1) if bound >= 0 else []
    if method == "brute":
        inc = _brute_increments(f, bound, threads)
        return [int(v) for v in np.cumsum(inc)]
    if method == "mobius":
        return _mobius_profile(f, bound)
    if method == "sieve":
        if not f.is_rational:
            raise UnsupportedFieldError("the totient sieve is a rational-field method")
        return list(np.cumsum(totient_sieve(bound)))
    raise ValueError(f"unknown method {method!r}")


def phi_bruteforce(f: FieldSpec, x: float, threads: int = 1) -> int:
    """phi(x): fractions p/q mod O with (p, q) = 1 and 0 < N(q) <= x."""
    if x < 1:
        warnings.warn("phi(x) with x < 1 counts no denominators", RuntimeWarning)
        return 0
    bound = int(x)
    return int(_brute_increments(f, bound, threads).sum())


# ----------------------------------------------------------------------
# phi: Moebius sieve
# ----------------------------------------------------------------------

@lru_cache(maxsize=None)
def _orbit_count_sum(f: FieldSpec, ideal: LatticeIdeal, bound: int) -> tuple[int, int]:
    """(S, T) for the ideal: count of principal ideals inside it with norm
    <= bound, and the sum of their norms.  Element totals are exact
    multiples of w (units act freely), which is asserted.
    """
    count, total = count_and_sum_norms(f, ideal, bound)
    assert count % f.w == 0 and total % f.w == 0
    return count // f.w, total // f.w


def _require_mobius_field(f: FieldSpec) -> None:
    if not f.is_rational and f.h != 1:
        raise UnsupportedFieldError(
            f"Moebius sieve needs class number 1, but {f!r} has h = {f.h}; "
            "use the brute-force method"
        )


def phi_mobius(f: FieldSpec, x: float) -> int:
    """phi(x) via the ideal Moebius sieve; class-number-1 fields only."""
    _require_mobius_field(f)
    if x < 1:
        warnings.warn("phi(x) with x < 1 counts no denominators", RuntimeWarning)
        return 0
    bound = int(x)
    if f.is_rational:
        mu = mobius_sieve(bound)
        return sum(
            mu[n] * ((bound // n) * (bound // n + 1) // 2)
            for n in range(1, bound + 1)
            if mu[n]
        )
    total = Fraction(0)
    for q in unit_orbit_reps(f, bound):
        ideal = principal_ideal(f, q)
        m = mobius_ideal(f, ideal)
        if m == 0:
            continue
        t_val = _orbit_count_sum(f, ideal, bound)[1]
        total += Fraction(m * t_val, ideal.norm)
    assert total.denominator == 1, "Moebius sum did not collapse to an integer"
    return int(total)


def _mobius_profile(f: FieldSpec, bound: int) -> list[int]:
    """The Moebius-sieve profile at every integer cutoff <= bound."""
    _require_mobius_field(f)
    if f.is_rational:
        mu = mobius_sieve(bound)
        inc = [0] * (bound + 1)
        for n in range(1, bound + 1):
            if not mu[n]:
                continue
            for k in range(1, bound // n + 1):
                inc[n * k] += mu[n] * k
        return list(np.cumsum(inc))
    per_norm: dict[int, Fraction] = {}
    for q in unit_orbit_reps(f, bound):
        ideal = principal_ideal(f, q)
        m = mobius_ideal(f, ideal)
        if m == 0:
            continue
        hist = norm_histogram(f, ideal, bound)
        for n in np.nonzero(hist)[0]:
            n = int(n)
            cnt = int(hist[n])
            assert cnt % f.w == 0
            per_norm[n] = per_norm.get(n, Fraction(0)) + Fraction(
                m * n * (cnt // f.w), ideal.norm
            )
    out = [0] * (bound + 1)
    running = Fraction(0)
    for n in range(1, bound + 1):
        running += per_norm.get(n, Fraction(0))
        assert running.denominator == 1
        out[n] = int(running)
    return out


def phi(f: FieldSpec, x: float, method: str = "auto", threads: int = 1) -> int:
    """Dispatcher: 'auto' picks the sieve over Q, the Moebius route when
    h = 1, and brute force otherwise."""
    if method == "auto":
        method = "sieve" if f.is_rational else ("mobius" if f.h == 1 else "brute")
    if method == "brute":
        return phi_bruteforce(f, x, threads)
    if method == "mobius":
        return phi_mobius(f, x)
    if method == "sieve":
        if not f.is_rational:
            raise UnsupportedFieldError("the totient sieve is a rational-field method")
        if x < 1:
            warnings.warn("phi(x) with x < 1 counts no denominators", RuntimeWarning)
            return 0
        return totient_summatory(int(x))
    raise ValueError(f"unknown method {method!r}")


def totient_summatory(x: int) -> int:
    """sum_{k <= x} EulerTotient(k) by the linear sieve (rational field)."""
    if x < 1:
        return 0
    return sum(totient_sieve(x)[1:])


# ----------------------------------------------------------------------
# The lemma quantities S and T
# ----------------------------------------------------------------------

def S_count(f: FieldSpec, ideal: LatticeIdeal, x: float) -> int:
    """Number of nonzero principal ideals (q) inside the ideal with N(q) <= x."""
    return _orbit_count_sum(f, ideal, int(x))[0]


def T_sum(f: FieldSpec, ideal: LatticeIdeal, x: float) -> int:
    """Sum of N(q) over the principal-ideal set counted by S_count."""
    return _orbit_count_sum(f, ideal, int(x))[1]


# ----------------------------------------------------------------------
# Asymptotics
# ----------------------------------------------------------------------

def phi_asymptotic(f: FieldSpec, x: float, tol: float = 1e-10) -> float:
    """Main term Res_K * x^2 / (2 h zeta_K(2)).

    For imaginary quadratic fields the h in Res_K cancels the explicit h,
    collapsing to pi * x^2 / (w * zeta_K(2) * sqrt(D)).
    """
    return residue_K(f) * x * x / (2.0 * f.h * zeta_K_2(f, tol))


def exponent_estimate(samples: list[CountSample]) -> float:
    """Least-squares slope of log(phi) against log(x); should approach 2."""
    if len(samples) < 3:
        raise ValueError("need at least 3 samples")
    xs = [s.x for s in samples]
    if any(b <= a for a, b in zip(xs, xs[1:])):
        raise ValueError("sample cutoffs must be strictly increasing")
    if any(s.phi <= 0 for s in samples):
        raise ValueError("samples with phi = 0 cannot be log-fitted")
    lx = np.log([s.x for s in samples])
    ly = np.log([float(s.phi) for s in samples])
    slope, _ = np.polyfit(lx, ly, 1)
    return float(slope)


__all__ = [
    "METHODS",
    "CountSample",
    "unit_orbit_reps",
    "phi_profile",
    "phi_bruteforce",
    "phi_mobius",
    "phi",
    "totient_summatory",
    "S_count",
    "T_sum",
    "phi_asymptotic",
    "exponent_estimate",
]
