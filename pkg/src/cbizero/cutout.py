"""Random-cutout simulation of the zero set.

The zero set is recovered as the complement of a Poisson collection of
open cut intervals ]t_i, t_i + z_i[ with birth intensity dt and duration
tail mu_bar(t) = Phi(v_t).  Durations below a truncation length eps are
discarded (the full intensity has infinite mass near 0), which biases
the uncovered set upward; every estimator therefore reports eps, and
the tests include eps-sensitivity checks.

The engine streams birth times as exponential spacings (equivalent in
law to a Poisson count with uniform births) and sweeps a coverage
frontier chunk by chunk, so horizons with tens of millions of marks run
in bounded memory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import optimize, stats

from .flow import solver
from .mechanisms import evaluate, largest_root
from .quadrature import adaptive
from .zeroset import gzero_density

MAX_EXPECTED_MARKS = 1e8
TABLE_POINTS_PER_DECADE = 24
TABLE_TAIL_FLOOR = 1e-12
TABLE_MAX_DECADES = 48
GZERO_TAIL_BOUND = 1e-3

_CHUNK = 1 << 18
_MAX_HORIZON_DOUBLINGS = 16


class CutoutError(ValueError):
    """Simulation request outside the supported regime."""


@dataclass(frozen=True, eq=False)
class UncoveredSet:
    """Exact interval representation of Z intersected with [0, horizon].

    ``intervals`` is a float array of shape (k, 2): sorted, pairwise
    disjoint closed intervals (singletons allowed).  0 is always
    uncovered because cuts are open and births are strictly positive.
    """

    horizon: float
    eps: float
    intervals: np.ndarray
    seed: Optional[int]

    @property
    def starts(self) -> np.ndarray:
        return self.intervals[:, 0]

    @property
    def ends(self) -> np.ndarray:
        return self.intervals[:, 1]

    def validate(self) -> "UncoveredSet":
        iv = self.intervals
        if iv.ndim != 2 or iv.shape[1] != 2 or iv.shape[0] == 0:
            raise CutoutError("interval array must have shape (k, 2), k >= 1")
        if not (iv[0, 0] == 0.0):
            raise CutoutError("0 must be uncovered")
        if np.any(iv[:, 1] < iv[:, 0]):
            raise CutoutError("intervals must have nonnegative length")
        if np.any(iv[1:, 0] <= iv[:-1, 1]):
            raise CutoutError("intervals must be sorted and disjoint")
        if iv[-1, 1] > self.horizon or np.any(iv < 0.0):
            raise CutoutError("intervals must lie within [0, horizon]")
        return self


@dataclass(frozen=True, eq=False)
class DurationSampler:
    """Inverse-transform sampler for cut durations on [eps, inf).

    ``rate`` is mu_bar(eps); the conditional tail S(t) = mu_bar(t)/rate
    is tabulated log-log on [eps, t_max] (exact for power-law tails) and
    inverted by interpolation, with scalar bisection beyond the table.
    ``atom`` is the conditional mass of infinite durations, positive
    exactly when the branching has a positive largest root.
    """

    eps: float
    rate: float
    atom: float
    log_tail_rev: np.ndarray
    log_time_rev: np.ndarray
    tail: Callable[[float], float]

    @classmethod
    def from_mechanisms(cls, psi, phi, eps: float) -> "DurationSampler":
        flow = solver(psi)

        def tail(t: float) -> float:
            return evaluate(phi, flow.v_from_infinity(t))

        return cls.from_tail(tail, eps,
                             atom_mass=evaluate(phi, largest_root(psi)))

    @classmethod
    def from_tail(cls, tail: Callable[[float], float], eps: float,
                  atom_mass: float = 0.0) -> "DurationSampler":
        if eps <= 0.0:
            raise CutoutError("eps must be positive")
        rate = tail(eps)
        if not (0.0 <= rate < math.inf):
            raise CutoutError("decrease ε not possible, tail infinite")
        atom = atom_mass / rate if rate > 0.0 else 0.0
        times, tails = [eps], [1.0]
        if rate > 0.0:
            stop = max(TABLE_TAIL_FLOOR, atom * (1.0 + 1e-9))
            step = 10.0 ** (1.0 / TABLE_POINTS_PER_DECADE)
            t = eps
            for _ in range(TABLE_POINTS_PER_DECADE * TABLE_MAX_DECADES):
                t *= step
                s = tail(t) / rate
                times.append(t)
                tails.append(s)
                if s <= stop:
                    break
        log_tail_rev = np.log(np.maximum(tails[::-1], 1e-300))
        log_time_rev = np.log(times[::-1])
        return cls(eps=eps, rate=rate, atom=atom,
                   log_tail_rev=log_tail_rev, log_time_rev=log_time_rev,
                   tail=tail)

    def sample_array(self, n: int, rng: np.random.Generator) -> np.ndarray:
        u = 1.0 - rng.random(n)     # (0, 1]; u = 1 maps to eps
        out = np.exp(np.interp(np.log(u), self.log_tail_rev,
                               self.log_time_rev))
        np.maximum(out, self.eps, out=out)
        if self.atom > 0.0:
            out[u <= self.atom] = math.inf
        floor = math.exp(self.log_tail_rev[0])
        beyond = (u < floor) & (u > self.atom)
        for i in np.nonzero(beyond)[0]:
            out[i] = self._invert_beyond(float(u[i]))
        return out

    def _invert_beyond(self, u: float) -> float:
        lo = math.exp(self.log_time_rev[0])
        hi = 2.0 * lo
        while self.tail(hi) / self.rate >= u:
            hi *= 2.0
            if hi > 1e280:
                return hi
        log_t = optimize.brentq(
            lambda lt: self.tail(math.exp(lt)) / self.rate - u,
            math.log(lo), math.log(hi), xtol=1e-12)
        return math.exp(log_t)


@lru_cache(maxsize=64)
def _cached_sampler(psi, phi, eps: float) -> DurationSampler:
    return DurationSampler.from_mechanisms(psi, phi, eps)


def sample_durations(sampler: DurationSampler, n: int, seed) -> np.ndarray:
    """n i.i.d. cut durations, deterministic given the seed."""
    if n < 1:
        raise CutoutError("need at least one draw")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    return sampler.sample_array(n, rng)


def _sweep(T: float, sampler: DurationSampler, rng: np.random.Generator):
    """Stream the cutout over [0, T]; returns (intervals, frontier).

    ``frontier`` is the supremum of the unclipped covered region; the
    horizon is covered exactly when frontier > T.
    """
    starts, ends = [], []
    frontier = 0.0
    clock = 0.0
    if sampler.rate > 0.0:
        expected = T * sampler.rate
        chunk = int(min(_CHUNK,
                        max(1024.0, 1.25 * expected
                            + 10.0 * math.sqrt(expected + 1.0) + 64.0)))
        while clock <= T and frontier < math.inf:
            births = clock + np.cumsum(
                rng.standard_exponential(chunk) / sampler.rate)
            clock = float(births[-1])
            if clock > T:
                births = births[births <= T]
            if births.size == 0:
                break
            cut_ends = births + sampler.sample_array(births.size, rng)
            prev = np.maximum.accumulate(
                np.concatenate(([frontier], cut_ends)))[:-1]
            gap = births > prev
            starts.append(prev[gap])
            ends.append(births[gap])
            frontier = max(float(prev[-1]), float(cut_ends[-1]))
    if frontier < T:
        starts.append(np.array([frontier]))
        ends.append(np.array([T]))
    elif frontier == T:
        starts.append(np.array([T]))
        ends.append(np.array([T]))
    if starts:
        intervals = np.column_stack((np.concatenate(starts),
                                     np.concatenate(ends)))
    else:
        intervals = np.empty((0, 2))
    if intervals.shape[0] == 0 or intervals[0, 0] > 0.0:
        # a birth at exactly 0.0 cannot cover the point 0 (cuts are open)
        intervals = np.vstack(([0.0, 0.0], intervals))
    return intervals, frontier


def cutout_with_sampler(sampler: DurationSampler, T: float,
                        seed) -> UncoveredSet:
    """One cutout realization driven by an externally built sampler."""
    if T <= 0.0:
        raise CutoutError("horizon must be positive")
    if T * sampler.rate > MAX_EXPECTED_MARKS:
        raise CutoutError("ε too small for horizon")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    intervals, _ = _sweep(T, sampler, rng)
    return UncoveredSet(horizon=T, eps=sampler.eps, intervals=intervals,
                        seed=seed)


def sample_cutout(psi, phi, T: float, eps: float, seed) -> UncoveredSet:
    """One realization of Z intersected with [0, T] at truncation eps."""
    return cutout_with_sampler(_cached_sampler(psi, phi, eps), T, seed)


def intersect(sets: Sequence[UncoveredSet]) -> UncoveredSet:
    """Exact intersection of uncovered sets on a common horizon."""
    if not sets:
        raise CutoutError("nothing to intersect")
    first = sets[0]
    for other in sets[1:]:
        if other.horizon != first.horizon or other.eps != first.eps:
            raise CutoutError("mismatched horizons or truncation lengths")
    result = first.intervals
    for other in sets[1:]:
        result = _intersect_pair(result, other.intervals)
    return UncoveredSet(horizon=first.horizon, eps=first.eps,
                        intervals=result, seed=None)


def _intersect_pair(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = []
    i = j = 0
    while i < len(a) and j < len(b):
        lo = max(a[i, 0], b[j, 0])
        hi = min(a[i, 1], b[j, 1])
        if lo <= hi:
            out.append((lo, hi))
        if a[i, 1] < b[j, 1]:
            i += 1
        else:
            j += 1
    return np.array(out) if out else np.empty((0, 2))


def statistics(uncovered: UncoveredSet, grid_sizes: Sequence[float]) -> dict:
    """Lebesgue measure, box counts, dimension fit, and last uncovered point."""
    deltas = [float(d) for d in grid_sizes]
    if len(deltas) < 2:
        raise CutoutError("need at least two grid sizes for a dimension fit")
    if any(b >= a for a, b in zip(deltas, deltas[1:])):
        raise CutoutError("grid sizes must be strictly decreasing")
    if deltas[-1] < uncovered.eps:
        raise CutoutError("grid size below the truncation length")

    iv = uncovered.intervals
    lebesgue = float((iv[:, 1] - iv[:, 0]).sum())
    g_last = float(iv[-1, 1]) if iv.shape[0] else 0.0

    box_counts = []
    for delta in deltas:
        lo = np.floor(iv[:, 0] / delta).astype(np.int64)
        # covering count: a right endpoint on a grid line does not spill
        # into the next cell, so [0,1] at delta=2^-k needs exactly 2^k cells
        hi = np.maximum(lo, np.ceil(iv[:, 1] / delta).astype(np.int64) - 1)
        prev = np.concatenate(([np.int64(-1)], hi[:-1]))
        fresh = hi - np.maximum(lo - 1, prev)
        box_counts.append((delta, int(np.maximum(fresh, 0).sum())))

    xs = [math.log(1.0 / d) for d, _ in box_counts]
    ys = [math.log(n) for _, n in box_counts]
    if max(ys) == min(ys):
        slope, stderr = 0.0, 0.0
    else:
        fit = stats.linregress(xs, ys)
        slope, stderr = fit.slope, fit.stderr
    dim_fit = {"slope": slope, "stderr": stderr,
               "ci95": (slope - 1.96 * stderr, slope + 1.96 * stderr)}
    return {"lebesgue": lebesgue, "box_counts": tuple(box_counts),
            "dim_fit": dim_fit, "g_last": g_last}


def empirical_gzero(psi, phi, n_samples: int, T_max: float, eps: float,
                    seed) -> np.ndarray:
    """Per-replicate last zero for a bounded zero set.

    A replicate whose horizon is uncovered at T is censored (the true
    last zero lies at or beyond T) and is redrawn with the horizon
    doubled; coverage at T leaves at most the g-tail mass, which the
    horizon precondition bounds by 10^-3.
    """
    if n_samples < 1:
        raise CutoutError("need at least one replicate")
    head = adaptive(lambda t: gzero_density(psi, phi, t), 0.0, T_max,
                    rel_tol=1e-9)
    if 1.0 - head >= GZERO_TAIL_BOUND:
        raise CutoutError(
            f"horizon too short: P(g > T_max) = {1.0 - head:.2e} "
            f"exceeds {GZERO_TAIL_BOUND:.0e}")
    sampler = _cached_sampler(psi, phi, eps)
    master = np.random.SeedSequence(seed)
    values = np.empty(n_samples)
    for i, child in enumerate(master.spawn(n_samples)):
        T = T_max
        for _ in range(_MAX_HORIZON_DOUBLINGS):
            if T * sampler.rate > MAX_EXPECTED_MARKS:
                raise CutoutError("ε too small for horizon")
            rng = np.random.Generator(np.random.PCG64(child.spawn(1)[0]))
            intervals, frontier = _sweep(T, sampler, rng)
            if frontier > T:
                values[i] = float(intervals[-1, 1])
                break
            T *= 2.0
        else:
            raise CutoutError("replicate censored at maximal horizon")
    return values
