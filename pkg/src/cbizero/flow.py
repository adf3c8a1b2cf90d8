"""Deterministic flow of the branching ODE and the marginal transform.

The central object is the solution ``v_t(lam)`` of dv/dt = -psi(v) with
v_0 = lam, together with its boundary version started from infinity.
Both are computed by inverting the time integral t = int_v^lam dq/psi(q)
rather than by stepping the ODE, which sidesteps the stiffness near
t -> 0 where the boundary solution blows up.

Stable and quadratic mechanisms use closed forms; everything else falls
back to an octave-walk accumulation of the time integral followed by
root refinement inside the crossing octave.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

from scipy import optimize

from .mechanisms import (
    BranchingMechanism,
    ImmigrationMechanism,
    MechanismDomainError,
    QuadraticBranching,
    StableBranching,
    grey_check,
    largest_root,
)
from .quadrature import adaptive


class GreyConditionError(ValueError):
    """Raised when an operation needs finite extinction times but Grey fails."""


class FlowError(RuntimeError):
    """Flow inversion could not certify a bracket; carries numeric evidence."""

    def __init__(self, message, evidence=None):
        super().__init__(message)
        self.evidence = evidence or {}


_MAX_OCTAVES = 2400


@dataclass(frozen=True)
class FlowSolver:
    """Inverts the branching flow for one mechanism.

    ``v_cap`` is the overflow guard: initial values above it are treated
    as the boundary condition at infinity.
    """

    psi: BranchingMechanism
    quad_tol: float = 1e-9
    root_tol: float = 1e-12
    v_cap: float = 1e300

    def __post_init__(self):
        if not (0.0 < self.quad_tol <= 1e-4):
            raise MechanismDomainError(f"quad_tol must be in (0, 1e-4], got {self.quad_tol}")
        if not (0.0 < self.root_tol <= 1e-4):
            raise MechanismDomainError(f"root_tol must be in (0, 1e-4], got {self.root_tol}")
        if not self.v_cap > 0:
            raise MechanismDomainError("v_cap must be positive")

    # -- F(a) = int_a^inf dq/psi ------------------------------------------

    def tail_time(self, a: float) -> float:
        """Time for the boundary flow to descend to level a."""
        if not a > 0:
            raise MechanismDomainError(f"tail_time needs a > 0, got {a}")
        psi = self.psi
        if isinstance(psi, StableBranching):
            return a ** (1.0 - psi.alpha) / (psi.d * (psi.alpha - 1.0))
        if isinstance(psi, QuadraticBranching) and psi.sigma2 > 0:
            if psi.b == 0.0:
                return 2.0 / (psi.sigma2 * a)
            ratio = 2.0 * psi.b / (psi.sigma2 * a)
            if ratio <= -1.0:  # at or below the supercritical root
                raise MechanismDomainError(
                    f"tail_time needs a above the largest root, got {a}")
            return math.log1p(ratio) / psi.b
        if not grey_check(psi).is_yes:
            raise GreyConditionError("v from infinity undefined: Grey's condition fails")
        if not psi(a) > 0:
            raise MechanismDomainError(
                f"tail_time needs psi positive at a, got psi({a}) = {psi(a)}")

        # u = 1/q turns the improper tail into a proper integral on (0, 1/a]
        def integrand(u):
            if u <= 0.0:
                return 0.0
            value = psi(1.0 / u)
            if not math.isfinite(value) or value <= 0.0:
                return 0.0
            return 1.0 / (u * u * value)

        return adaptive(integrand, 0.0, 1.0 / a, rel_tol=self.quad_tol)

    # -- flow from a finite level ------------------------------------------

    def v_from_lambda(self, t: float, lam: float) -> float:
        """Flow level after time t started from lam (lam above v_cap means infinity)."""
        if t < 0:
            raise MechanismDomainError(f"time must be >= 0, got {t}")
        if lam < 0:
            raise MechanismDomainError(f"initial level must be >= 0, got {lam}")
        if lam >= self.v_cap:
            return self.v_from_infinity(t) if t > 0 else math.inf
        if lam == 0.0 or t == 0.0:
            return lam
        psi = self.psi
        if isinstance(psi, StableBranching):
            am1 = psi.alpha - 1.0
            return (lam ** -am1 + psi.d * am1 * t) ** (-1.0 / am1)
        if isinstance(psi, QuadraticBranching) and psi.sigma2 > 0:
            # 1/v satisfies a linear ODE; this form is stable for either sign of b
            if psi.b == 0.0:
                return 1.0 / (1.0 / lam + 0.5 * psi.sigma2 * t)
            try:
                growth = math.exp(psi.b * t)
                spread = math.expm1(psi.b * t)
            except OverflowError:
                return 0.0  # b > 0 and t huge: level underflows
            denom = growth / lam + psi.sigma2 / (2.0 * psi.b) * spread
            if math.isinf(denom):
                return 0.0
            return 1.0 / denom
        if isinstance(psi, QuadraticBranching):  # sigma2 == 0, pure drift b > 0
            return lam * math.exp(-psi.b * t)
        return self._v_numeric(t, lam)

    def _v_numeric(self, t: float, lam: float) -> float:
        psi = self.psi
        root = largest_root(psi)
        at_lam = psi(lam)
        if at_lam == 0.0:
            return lam
        if lam > root:
            if at_lam < 0:
                raise FlowError(
                    "branching exponent negative above its largest root",
                    {"lam": lam, "root": root, "psi(lam)": at_lam})
            return self._walk(t, base=root, span=lam - root, sign=+1.0)
        if at_lam > 0:
            raise FlowError(
                "branching exponent positive below its largest root",
                {"lam": lam, "root": root, "psi(lam)": at_lam})
        return self._walk(t, base=root, span=root - lam, sign=-1.0)

    def _walk(self, t, base, span, sign):
        """Accumulate int dq/|psi| octave by octave until the clock t is spent.

        sign +1: decreasing flow, levels base + span*2^-k walking down
        toward base.  sign -1: increasing flow (supercritical start below
        the root), levels base - span*2^-k walking up toward base.
        """
        psi = self.psi

        def pace(q):
            value = psi(q)
            if value == 0.0 or not math.isfinite(value):
                return 0.0 if not math.isfinite(value) else math.inf
            return sign / value

        acc = 0.0
        prev = base + sign * span
        for k in range(1, _MAX_OCTAVES):
            level = base + sign * span * 2.0 ** (-k)
            if level == base or level == prev:
                break
            lo, hi = (level, prev) if sign > 0 else (prev, level)
            piece = adaptive(pace, lo, hi, rel_tol=self.quad_tol)
            if math.isnan(piece) or piece < 0:
                raise FlowError(
                    "time integral lost its sign inside an octave",
                    {"octave": k, "piece": piece, "lo": lo, "hi": hi})
            if acc + piece >= t:
                return self._refine(t - acc, level, prev, sign, pace)
            acc += piece
            prev = level
        return base

    def _refine(self, remaining, level, prev, sign, pace):
        """Solve for the level spending exactly `remaining` within one octave."""
        def clock(v):
            if sign > 0:
                return adaptive(pace, v, prev, rel_tol=self.quad_tol) - remaining
            return adaptive(pace, prev, v, rel_tol=self.quad_tol) - remaining

        if remaining == 0.0:
            return prev
        lo, hi = (level, prev) if sign > 0 else (prev, level)
        return optimize.brentq(clock, lo, hi, rtol=max(self.root_tol, 1e-15),
                               xtol=1e-300)

    # -- flow from infinity ------------------------------------------------

    def v_from_infinity(self, t: float) -> float:
        """Boundary flow level v_t with v_{0+} = infinity; needs Grey."""
        if not t > 0:
            raise MechanismDomainError(f"time must be > 0, got {t}")
        psi = self.psi
        if isinstance(psi, StableBranching):
            am1 = psi.alpha - 1.0
            return (psi.d * am1 * t) ** (-1.0 / am1)
        if isinstance(psi, QuadraticBranching) and psi.sigma2 > 0:
            if psi.b == 0.0:
                return 2.0 / (psi.sigma2 * t)
            try:
                spread = math.expm1(psi.b * t)
            except OverflowError:
                return 0.0
            if math.isinf(spread):
                return 0.0
            if spread == 0.0:  # b*t underflowed; b -> 0 limit
                return 2.0 / (psi.sigma2 * t)
            return 2.0 * psi.b / (psi.sigma2 * spread)
        if not grey_check(psi).is_yes:
            raise GreyConditionError("v from infinity undefined: Grey's condition fails")
        lo = self.v_from_lambda(t, self.v_cap * 0.99)
        if lo == 0.0:
            return 0.0
        target = self.tail_time(lo) - t
        if abs(target) <= self.root_tol * t:
            return lo
        # bracket [lo, v_cap] in log space; F is strictly decreasing
        def gap(w):
            return self.tail_time(math.exp(w)) - t

        return math.exp(optimize.brentq(
            gap, math.log(lo), math.log(self.v_cap),
            rtol=max(self.root_tol, 1e-15)))

    # -- probabilities -------------------------------------------------------

    def extinction_prob(self, x: float, t: float) -> float:
        """P[the branching population from mass x dies by time t] = exp(-x v_t)."""
        if x < 0:
            raise MechanismDomainError(f"mass must be >= 0, got {x}")
        if x == 0.0:
            if not t > 0:
                raise MechanismDomainError(f"time must be > 0, got {t}")
            return 1.0
        return math.exp(-x * self.v_from_infinity(t))

    def cbi_laplace(self, x: float, q: float, t: float,
                    phi: ImmigrationMechanism) -> float:
        """Marginal transform E_x[exp(-q Y_t)] of the process with immigration."""
        if x < 0 or q < 0:
            raise MechanismDomainError("x and q must be >= 0")
        if not t > 0:
            raise MechanismDomainError(f"time must be > 0, got {t}")
        if q == 0.0:
            return 1.0
        v_end = self.v_from_lambda(t, q)
        accumulated = adaptive(lambda s: phi(self.v_from_lambda(s, q)), 0.0, t,
                               rel_tol=self.quad_tol)
        return math.exp(-x * v_end - accumulated)


@lru_cache(maxsize=256)
def solver(psi: BranchingMechanism) -> FlowSolver:
    """Shared default-tolerance solver for a mechanism."""
    return FlowSolver(psi=psi)
