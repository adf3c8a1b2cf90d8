"""Branching and immigration mechanisms.

Two families of Laplace exponents drive everything in this package: a
convex branching exponent (``psi`` throughout, vanishing at 0) and a
concave nondecreasing immigration exponent (``phi``, also vanishing at
0).  Built-in families carry closed-form growth indices; user-supplied
mechanisms either declare their indices or fall back to log-log slope
probes with an explicit inconclusive flag.

Mechanisms are frozen dataclasses and are directly callable.  A small
text grammar (``parse_mechanism`` / ``mechanism_spec``) round-trips the
built-in families for the command line and config files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Callable, Optional

from scipy import optimize

from .quadrature import FINITE, INFINITE, tail_verdict_lower, tail_verdict_upper


class MechanismDomainError(ValueError):
    """Argument or parameter outside a mechanism's admissible range."""


class PositivityError(ValueError):
    """No threshold found past which the branching exponent stays positive."""


class EvaluationError(RuntimeError):
    """A user-supplied mechanism handle failed or returned unusable values."""


class VerdictValue(str, Enum):
    YES = "Yes"
    NO = "No"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class Verdict:
    """Tri-state answer bundled with the numeric evidence behind it."""

    value: VerdictValue
    evidence: dict

    @property
    def is_yes(self):
        return self.value is VerdictValue.YES

    @property
    def is_no(self):
        return self.value is VerdictValue.NO

    @property
    def is_inconclusive(self):
        return self.value is VerdictValue.INCONCLUSIVE

    @staticmethod
    def yes(evidence: dict) -> "Verdict":
        return Verdict(VerdictValue.YES, evidence)

    @staticmethod
    def no(evidence: dict) -> "Verdict":
        return Verdict(VerdictValue.NO, evidence)

    @staticmethod
    def inconclusive(evidence: dict) -> "Verdict":
        return Verdict(VerdictValue.INCONCLUSIVE, evidence)


@dataclass(frozen=True)
class MechanismIndices:
    """Growth indices at infinity and at zero, with certainty flags."""

    ind_lower_inf: float
    ind_upper_inf: float
    ind_lower_0: float
    ind_upper_0: float
    exact: bool
    inconclusive: bool


class BranchingMechanism:
    """Base class for convex branching exponents."""

    def __call__(self, q: float) -> float:
        raise NotImplementedError


class ImmigrationMechanism:
    """Base class for concave nondecreasing immigration exponents."""

    def __call__(self, q: float) -> float:
        raise NotImplementedError


def _check_arg(q):
    if q < 0:
        raise MechanismDomainError(f"mechanism argument must be >= 0, got {q}")


@dataclass(frozen=True)
class StableBranching(BranchingMechanism):
    """psi(q) = d * q**alpha with d > 0 and alpha in (1, 2]."""

    d: float
    alpha: float

    def __post_init__(self):
        if not self.d > 0:
            raise MechanismDomainError(f"stable branching needs d > 0, got {self.d}")
        if not (1.0 < self.alpha <= 2.0):
            raise MechanismDomainError(
                f"stable branching needs alpha in (1, 2], got {self.alpha}")

    def __call__(self, q: float) -> float:
        _check_arg(q)
        if q == 0.0:
            return 0.0
        try:
            return self.d * q ** self.alpha
        except OverflowError:
            return math.inf


@dataclass(frozen=True)
class QuadraticBranching(BranchingMechanism):
    """psi(q) = b*q + (sigma2/2)*q**2; b may be negative, sigma2 >= 0."""

    b: float
    sigma2: float

    def __post_init__(self):
        if self.sigma2 < 0:
            raise MechanismDomainError(f"sigma2 must be >= 0, got {self.sigma2}")
        if self.sigma2 == 0.0 and self.b == 0.0:
            raise MechanismDomainError("degenerate branching: b and sigma2 both zero")

    def __call__(self, q: float) -> float:
        _check_arg(q)
        return self.b * q + 0.5 * self.sigma2 * q * q


@dataclass(frozen=True)
class CustomBranching(BranchingMechanism):
    """User-supplied branching exponent.

    ``theta`` (positivity threshold), ``deriv0`` (right derivative at 0)
    and the four growth indices are optional declarations; anything left
    None is located or probed numerically.
    """

    eval: Callable[[float], float]
    theta: Optional[float] = None
    deriv0: Optional[float] = None
    ind_lower: Optional[float] = None
    ind_upper: Optional[float] = None
    ind0_lower: Optional[float] = None
    ind0_upper: Optional[float] = None

    def __post_init__(self):
        if self.theta is not None and not self.theta > 0:
            raise MechanismDomainError("declared theta must be positive")
        try:
            at_zero = self.eval(0.0)
        except Exception as exc:
            raise EvaluationError("custom branching handle failed at 0") from exc
        if abs(at_zero) > 1e-9:
            raise MechanismDomainError(
                f"branching exponent must vanish at 0, got {at_zero}")

    def __call__(self, q: float) -> float:
        _check_arg(q)
        try:
            return self.eval(q)
        except (OverflowError, FloatingPointError):
            return math.inf
        except Exception as exc:
            raise EvaluationError(f"custom branching handle failed at q={q}") from exc


@dataclass(frozen=True)
class StableImmigration(ImmigrationMechanism):
    """phi(q) = dprime * q**beta with dprime > 0 and beta in (0, 1]."""

    dprime: float
    beta: float

    def __post_init__(self):
        if not self.dprime > 0:
            raise MechanismDomainError(f"stable immigration needs d > 0, got {self.dprime}")
        if not (0.0 < self.beta <= 1.0):
            raise MechanismDomainError(
                f"stable immigration needs beta in (0, 1], got {self.beta}")

    def __call__(self, q: float) -> float:
        _check_arg(q)
        if q == 0.0:
            return 0.0
        try:
            return self.dprime * q ** self.beta
        except OverflowError:
            return math.inf


@dataclass(frozen=True)
class GammaImmigration(ImmigrationMechanism):
    """phi(q) = a * log(1 + q/b), the gamma-process exponent."""

    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise MechanismDomainError("gamma immigration needs a > 0 and b > 0")

    def __call__(self, q: float) -> float:
        _check_arg(q)
        return self.a * math.log1p(q / self.b)


@dataclass(frozen=True)
class LampertiImmigration(ImmigrationMechanism):
    """phi(q) = Gamma(beta + q) / (Gamma(beta) * Gamma(q)).

    Behaves like q**beta / Gamma(beta) at infinity and like q at 0.  The
    endpoint beta = 1 degenerates to the pure drift phi(q) = q and is
    accepted so the family closes over its own limiting case.
    """

    beta: float

    def __post_init__(self):
        if not (0.0 < self.beta <= 1.0):
            raise MechanismDomainError(
                f"lamperti immigration needs beta in (0, 1], got {self.beta}")

    def __call__(self, q: float) -> float:
        _check_arg(q)
        if q == 0.0:
            return 0.0
        if q >= 1e6:
            # lgamma(beta + q) - lgamma(q) loses ~log10(q lnq) digits to
            # cancellation; switch to the ratio expansion, exact to machine
            # precision here since the q**-2 term is below 1e-16
            log_ratio = (self.beta * math.log(q)
                         + math.log1p(self.beta * (self.beta - 1.0) / (2.0 * q)))
            try:
                return math.exp(log_ratio - math.lgamma(self.beta))
            except OverflowError:
                return math.inf
        try:
            return math.exp(
                math.lgamma(self.beta + q) - math.lgamma(self.beta) - math.lgamma(q))
        except OverflowError:
            return math.inf


def _exponential_jump_exponent(mass):
    def phi(q):
        return mass * q / (1.0 + q)
    return phi


@dataclass(frozen=True)
class CompoundPoissonImmigration(ImmigrationMechanism):
    """Driftless immigration with finite jump-measure mass.

    ``tail`` is an optional handle for the full exponent (bounded by
    ``mass``); when omitted, unit-mean exponential jumps are used, i.e.
    phi(q) = mass * q / (1 + q).
    """

    mass: float
    tail: Optional[Callable[[float], float]] = None

    def __post_init__(self):
        if not self.mass > 0:
            raise MechanismDomainError(f"compound Poisson mass must be > 0, got {self.mass}")
        if self.tail is not None:
            try:
                at_zero = self.tail(0.0)
            except Exception as exc:
                raise EvaluationError("compound Poisson handle failed at 0") from exc
            if abs(at_zero) > 1e-9:
                raise MechanismDomainError("immigration exponent must vanish at 0")

    def __call__(self, q: float) -> float:
        _check_arg(q)
        if self.tail is not None:
            try:
                return self.tail(q)
            except Exception as exc:
                raise EvaluationError(f"compound Poisson handle failed at q={q}") from exc
        return self.mass * q / (1.0 + q)


@dataclass(frozen=True)
class CustomImmigration(ImmigrationMechanism):
    """User-supplied immigration exponent with optional declarations."""

    eval: Callable[[float], float]
    drift: float = 0.0
    finite_levy_mass: str = "unknown"  # "yes" | "no" | "unknown"
    ind_lower: Optional[float] = None
    ind_upper: Optional[float] = None
    ind0_lower: Optional[float] = None
    ind0_upper: Optional[float] = None

    def __post_init__(self):
        if self.drift < 0:
            raise MechanismDomainError("immigration drift must be >= 0")
        if self.finite_levy_mass not in ("yes", "no", "unknown"):
            raise MechanismDomainError("finite_levy_mass must be yes/no/unknown")
        try:
            at_zero = self.eval(0.0)
        except Exception as exc:
            raise EvaluationError("custom immigration handle failed at 0") from exc
        if abs(at_zero) > 1e-9:
            raise MechanismDomainError("immigration exponent must vanish at 0")

    def __call__(self, q: float) -> float:
        _check_arg(q)
        try:
            return self.eval(q)
        except (OverflowError, FloatingPointError):
            return math.inf
        except Exception as exc:
            raise EvaluationError(f"custom immigration handle failed at q={q}") from exc


def evaluate(mech, q: float) -> float:
    """Evaluate a mechanism at q >= 0 (domain-checked)."""
    return mech(q)


_PROBE_INF = tuple(10.0 ** k for k in range(2, 9))
_PROBE_ZERO = tuple(10.0 ** (-k) for k in range(8, 1, -1))
_PROBE_SPREAD = 0.02


def _loglog_slopes(fn, grid):
    values = []
    for x in grid:
        v = fn(x)
        if not (v > 0) or math.isinf(v):
            raise EvaluationError(
                f"index probe needs positive finite values, got {v} at {x}")
        values.append(v)
    slopes = []
    for i in range(len(grid) - 1):
        slopes.append((math.log(values[i + 1]) - math.log(values[i]))
                      / (math.log(grid[i + 1]) - math.log(grid[i])))
    return min(slopes), max(slopes)


def _probe_indices(fn):
    lo_inf, hi_inf = _loglog_slopes(fn, _PROBE_INF)
    lo_0, hi_0 = _loglog_slopes(fn, _PROBE_ZERO)
    inconclusive = (hi_inf - lo_inf > _PROBE_SPREAD) or (hi_0 - lo_0 > _PROBE_SPREAD)
    return MechanismIndices(lo_inf, hi_inf, lo_0, hi_0, exact=False,
                            inconclusive=inconclusive)


def _declared_or_probe(mech):
    declared = (mech.ind_lower, mech.ind_upper, mech.ind0_lower, mech.ind0_upper)
    if all(v is not None for v in declared):
        return MechanismIndices(*declared, exact=True, inconclusive=False)
    probed = _probe_indices(mech)
    merged = (
        declared[0] if declared[0] is not None else probed.ind_lower_inf,
        declared[1] if declared[1] is not None else probed.ind_upper_inf,
        declared[2] if declared[2] is not None else probed.ind_lower_0,
        declared[3] if declared[3] is not None else probed.ind_upper_0,
    )
    return MechanismIndices(*merged, exact=False, inconclusive=probed.inconclusive)


def indices(mech) -> MechanismIndices:
    """Growth indices of a mechanism; closed form for built-in families."""
    if isinstance(mech, StableBranching):
        a = mech.alpha
        return MechanismIndices(a, a, a, a, exact=True, inconclusive=False)
    if isinstance(mech, QuadraticBranching):
        at_inf = 2.0 if mech.sigma2 > 0 else 1.0
        at_zero = 1.0 if mech.b != 0 else 2.0
        return MechanismIndices(at_inf, at_inf, at_zero, at_zero,
                                exact=True, inconclusive=False)
    if isinstance(mech, StableImmigration):
        b = mech.beta
        return MechanismIndices(b, b, b, b, exact=True, inconclusive=False)
    if isinstance(mech, GammaImmigration):
        return MechanismIndices(0.0, 0.0, 1.0, 1.0, exact=True, inconclusive=False)
    if isinstance(mech, LampertiImmigration):
        b = mech.beta
        return MechanismIndices(b, b, 1.0, 1.0, exact=True, inconclusive=False)
    if isinstance(mech, CompoundPoissonImmigration):
        if mech.tail is None:
            return MechanismIndices(0.0, 0.0, 1.0, 1.0, exact=True, inconclusive=False)
        return _probe_indices(mech)
    if isinstance(mech, (CustomBranching, CustomImmigration)):
        return _declared_or_probe(mech)
    raise TypeError(f"not a mechanism: {mech!r}")


_THETA_MAX_EXP = 100
_THETA_SAMPLES = 50


def _positive_beyond(psi, theta):
    # 50 log-spaced samples over [theta, 1e6 * theta]
    step = 1e6 ** (1.0 / (_THETA_SAMPLES - 1))
    q = theta
    for _ in range(_THETA_SAMPLES):
        if not psi(q) > 0:
            return False
        q *= step
    return True


@lru_cache(maxsize=512)
def positivity_threshold(psi) -> float:
    """Smallest power of two >= 1 past which psi stays positive."""
    if isinstance(psi, StableBranching):
        return 1.0
    if isinstance(psi, QuadraticBranching):
        if psi.sigma2 == 0.0:
            if psi.b > 0:
                return 1.0
            raise PositivityError("branching exponent is nonpositive everywhere")
        root = max(0.0, -2.0 * psi.b / psi.sigma2)
        theta = 1.0
        while theta <= root:
            theta *= 2.0
        return theta
    if isinstance(psi, CustomBranching) and psi.theta is not None:
        theta = 1.0
        while theta < psi.theta:
            theta *= 2.0
        if not _positive_beyond(psi, theta):
            raise PositivityError(
                f"declared threshold {psi.theta} fails the positivity probe")
        return theta
    theta = 1.0
    for _ in range(_THETA_MAX_EXP):
        if _positive_beyond(psi, theta):
            return theta
        theta *= 2.0
    raise PositivityError("no positivity threshold found up to 2**100")


@lru_cache(maxsize=512)
def largest_root(psi) -> float:
    """Largest root of the branching exponent (0 unless supercritical)."""
    if isinstance(psi, StableBranching):
        return 0.0
    if isinstance(psi, QuadraticBranching):
        if psi.sigma2 == 0.0:
            if psi.b > 0:
                return 0.0
            raise PositivityError("branching exponent is nonpositive everywhere")
        return max(0.0, -2.0 * psi.b / psi.sigma2)
    theta = positivity_threshold(psi)
    hi = theta
    lo = theta / 2.0
    for _ in range(1000):
        value = psi(lo)
        if value == 0.0:
            return lo
        if value < 0:
            return optimize.brentq(psi, lo, hi, xtol=1e-30, rtol=1e-14)
        hi = lo
        lo /= 2.0
        if lo < 1e-290:
            return 0.0
    return 0.0


def branching_derivative_at_zero(psi) -> float:
    """Right derivative of psi at 0 (sign decides sub/super-critical)."""
    if isinstance(psi, StableBranching):
        return 0.0
    if isinstance(psi, QuadraticBranching):
        return psi.b
    if isinstance(psi, CustomBranching) and psi.deriv0 is not None:
        return psi.deriv0
    h = 1e-8
    return psi(h) / h


def immigration_drift(phi) -> float:
    """Linear drift part of the immigration exponent."""
    if isinstance(phi, StableImmigration):
        return phi.dprime if phi.beta == 1.0 else 0.0
    if isinstance(phi, LampertiImmigration):
        return 1.0 if phi.beta == 1.0 else 0.0
    if isinstance(phi, (GammaImmigration, CompoundPoissonImmigration)):
        return 0.0
    if isinstance(phi, CustomImmigration):
        return phi.drift
    raise TypeError(f"not an immigration mechanism: {phi!r}")


def immigration_slope_at_zero(phi) -> float:
    """Coefficient c with phi(q) ~ c*q near 0, probed when unknown."""
    if isinstance(phi, StableImmigration) and phi.beta == 1.0:
        return phi.dprime
    if isinstance(phi, GammaImmigration):
        return phi.a / phi.b
    if isinstance(phi, LampertiImmigration):
        return 1.0
    if isinstance(phi, CompoundPoissonImmigration) and phi.tail is None:
        return phi.mass
    h = 1e-8
    return phi(h) / h


def _safe_recip(value: float) -> float:
    return math.inf if value == 0.0 else 1.0 / abs(value)


@lru_cache(maxsize=512)
def grey_check(psi) -> Verdict:
    """Does int^inf dq/psi(q) converge (extinction in finite time)?"""
    theta = positivity_threshold(psi)
    est = tail_verdict_upper(lambda q: _safe_recip(psi(q)), theta)
    evidence = {"theta": theta, **est.evidence()}
    if est.verdict == FINITE:
        return Verdict.yes(evidence)
    if est.verdict == INFINITE:
        return Verdict.no(evidence)
    return Verdict.inconclusive(evidence)


@lru_cache(maxsize=512)
def conservativity_check(psi) -> Verdict:
    """Does int_0 dq/|psi(q)| diverge (no explosion from finite mass)?"""
    stop = 1.0
    try:
        root = largest_root(psi)
    except PositivityError:
        root = 0.0
    if root > 0:
        stop = root / 2.0
    est = tail_verdict_lower(lambda q: _safe_recip(psi(q)), stop)
    evidence = {"stop": stop, **est.evidence()}
    if est.verdict == INFINITE:
        return Verdict.yes(evidence)
    if est.verdict == FINITE:
        return Verdict.no(evidence)
    return Verdict.inconclusive(evidence)


_CPP_PROBES = (1e4, 1e6, 1e8)
_CPP_REL = 1e-3


def is_compound_poisson(phi) -> Verdict:
    """Driftless with bounded exponent, i.e. finite jump measure and no drift."""
    if isinstance(phi, CompoundPoissonImmigration):
        return Verdict.yes({"family": "compound-poisson", "mass": phi.mass})
    drift = immigration_drift(phi)
    if drift > 0:
        return Verdict.no({"drift": drift})
    probes = [phi(q) for q in _CPP_PROBES]
    evidence = {"drift": drift, "probes": dict(zip(_CPP_PROBES, probes))}
    if probes[-1] == 0.0:
        return Verdict.no({**evidence, "note": "exponent vanishes at the probes"})
    changes = [abs(b - a) / abs(a) if a != 0 else math.inf
               for a, b in zip(probes, probes[1:])]
    evidence["relative_changes"] = changes
    if all(c < _CPP_REL for c in changes):
        return Verdict.yes(evidence)
    if all(c >= _CPP_REL for c in changes):
        return Verdict.no(evidence)
    return Verdict.inconclusive(evidence)


def scale_immigration(phi, c: float):
    """Return the immigration mechanism q -> c * phi(q)."""
    if not c > 0:
        raise MechanismDomainError(f"scale factor must be > 0, got {c}")
    if isinstance(phi, StableImmigration):
        return StableImmigration(dprime=c * phi.dprime, beta=phi.beta)
    if isinstance(phi, GammaImmigration):
        return GammaImmigration(a=c * phi.a, b=phi.b)
    if isinstance(phi, CompoundPoissonImmigration):
        if phi.tail is None:
            return CompoundPoissonImmigration(mass=c * phi.mass)
        base = phi.tail
        return CompoundPoissonImmigration(mass=c * phi.mass,
                                          tail=lambda q: c * base(q))
    idx = indices(phi)
    return CustomImmigration(
        eval=lambda q, _p=phi, _c=c: _c * _p(q),
        drift=c * immigration_drift(phi),
        finite_levy_mass=getattr(phi, "finite_levy_mass", "unknown")
        if isinstance(phi, CustomImmigration) else
        ("yes" if isinstance(phi, CompoundPoissonImmigration) else "no"),
        ind_lower=idx.ind_lower_inf, ind_upper=idx.ind_upper_inf,
        ind0_lower=idx.ind_lower_0, ind0_upper=idx.ind_upper_0,
    )


# --- mechanism mini-grammar ---------------------------------------------

class MechanismParseError(ValueError):
    """Malformed mechanism spec string; carries the character position."""

    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


_FAMILY_KEYS = {
    "quadratic": {"b", "sigma2"},
    "gamma": {"a", "b"},
    "lamperti": {"beta"},
    "cpp": {"mass"},
}


def _parse_params(body, offset):
    params = {}
    cursor = offset
    if not body:
        raise MechanismParseError("missing parameter list", cursor)
    for item in body.split(","):
        if "=" not in item:
            raise MechanismParseError(f"expected key=value, got {item!r}", cursor)
        key, _, raw = item.partition("=")
        key = key.strip()
        if not key:
            raise MechanismParseError("empty parameter name", cursor)
        if key in params:
            raise MechanismParseError(f"duplicate parameter {key!r}", cursor)
        try:
            params[key] = float(raw)
        except ValueError:
            raise MechanismParseError(
                f"bad number {raw!r} for {key!r}", cursor + len(key) + 1) from None
        cursor += len(item) + 1
    return params


def parse_mechanism(spec: str):
    """Parse a mechanism spec string like ``stable:d=1.0,alpha=2.0``."""
    if not isinstance(spec, str):
        raise MechanismParseError("mechanism spec must be a string", 0)
    text = spec.strip()
    if ":" not in text:
        raise MechanismParseError("expected family:params", 0)
    family, _, body = text.partition(":")
    family = family.strip()
    params = _parse_params(body, len(family) + 1)
    try:
        if family == "stable":
            if set(params) == {"d", "alpha"}:
                return StableBranching(d=params["d"], alpha=params["alpha"])
            if set(params) == {"d", "beta"}:
                return StableImmigration(dprime=params["d"], beta=params["beta"])
            raise MechanismParseError(
                "stable needs either d,alpha (branching) or d,beta (immigration)",
                len(family) + 1)
        if family in _FAMILY_KEYS:
            expected = _FAMILY_KEYS[family]
            if set(params) != expected:
                raise MechanismParseError(
                    f"{family} needs exactly {sorted(expected)}", len(family) + 1)
            if family == "quadratic":
                return QuadraticBranching(b=params["b"], sigma2=params["sigma2"])
            if family == "gamma":
                return GammaImmigration(a=params["a"], b=params["b"])
            if family == "lamperti":
                return LampertiImmigration(beta=params["beta"])
            return CompoundPoissonImmigration(mass=params["mass"])
    except MechanismDomainError as exc:
        raise MechanismParseError(str(exc), len(family) + 1) from exc
    raise MechanismParseError(f"unknown mechanism family {family!r}", 0)


def parse_branching(spec: str) -> BranchingMechanism:
    mech = parse_mechanism(spec)
    if not isinstance(mech, BranchingMechanism):
        raise MechanismParseError(f"{spec!r} is not a branching mechanism", 0)
    return mech


def parse_immigration(spec: str) -> ImmigrationMechanism:
    mech = parse_mechanism(spec)
    if not isinstance(mech, ImmigrationMechanism):
        raise MechanismParseError(f"{spec!r} is not an immigration mechanism", 0)
    return mech


def mechanism_spec(mech) -> str:
    """Inverse of parse_mechanism for the built-in families (round-trip exact)."""
    if isinstance(mech, StableBranching):
        return f"stable:d={mech.d!r},alpha={mech.alpha!r}"
    if isinstance(mech, QuadraticBranching):
        return f"quadratic:b={mech.b!r},sigma2={mech.sigma2!r}"
    if isinstance(mech, StableImmigration):
        return f"stable:d={mech.dprime!r},beta={mech.beta!r}"
    if isinstance(mech, GammaImmigration):
        return f"gamma:a={mech.a!r},b={mech.b!r}"
    if isinstance(mech, LampertiImmigration):
        return f"lamperti:beta={mech.beta!r}"
    if isinstance(mech, CompoundPoissonImmigration):
        if mech.tail is not None:
            raise MechanismDomainError(
                "compound Poisson with a custom handle has no spec-string form")
        return f"cpp:mass={mech.mass!r}"
    raise MechanismDomainError(f"{type(mech).__name__} has no spec-string form")
