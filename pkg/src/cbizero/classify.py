"""Classification of the zero set of a branching process with immigration.

The trichotomy (polar / transient / recurrent) for the state 0, along
with heaviness (positive Lebesgue measure), interval structure,
stationarity, and box-counting dimension bounds.

Two routes produce a classification.  The regular-variation fast path
applies closed-form index arithmetic when both mechanisms have exactly
known growth profiles; it decides strictly by the index comparisons and
abstains on uncovered boundary configurations.  The numeric route
evaluates the two criterion integrals

    outer:  int_theta^inf exp( int_theta^z R ) dz / Psi(z)
    inner:  int_v^theta   exp( -int_x^theta R ) dx / Psi(x)

with R = Phi/Psi and v the largest root of Psi, using the octave-panel
divergence protocol.  Outer divergent means 0 is polar; otherwise the
inner integral separates transient (finite) from recurrent (infinite).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .flow import solver
from .mechanisms import (
    BranchingMechanism,
    CompoundPoissonImmigration,
    CustomBranching,
    CustomImmigration,
    GammaImmigration,
    ImmigrationMechanism,
    LampertiImmigration,
    QuadraticBranching,
    StableBranching,
    StableImmigration,
    Verdict,
    branching_derivative_at_zero,
    conservativity_check,
    grey_check,
    indices,
    is_compound_poisson,
    largest_root,
    positivity_threshold,
)
from .quadrature import (
    FINITE,
    INCONCLUSIVE,
    INFINITE,
    adaptive,
    tail_verdict_lower,
    tail_verdict_upper,
)

TRIVIAL_POINT = "TrivialPoint"
POLAR = "Polar"
TRANSIENT = "Transient"
RECURRENT = "Recurrent"
INCONCLUSIVE_CLASS = "Inconclusive"
NO_IMMIGRATION = "NoImmigration"

METHOD_NUMERIC = "NumericIntegral"
METHOD_FASTPATH = "RVFastPath"
METHOD_CLOSED = "ClosedForm"

# below this right derivative at 0 the mechanism counts as supercritical
_SUPERCRITICAL_TOL = -1e-12
# index comparisons from probed (inexact) data abstain inside this margin
_BOUNDARY_MARGIN = 1e-3

_DIM_PROBES = (1e-4, 1e-6, 1e-8)


class ClassificationError(ValueError):
    """Requested quantity is undefined for this zero-set class."""


@dataclass(frozen=True)
class RegVarSummary:
    """Power-law profile of the ratio R = Phi/Psi at both ends.

    ``rho`` and ``kappa`` are the indices of R at infinity and at zero;
    r/k bounds are limsup/liminf of sR(s) there.  None means unknown.
    ``exact`` is True when every value comes from closed-form family
    data rather than probes.
    """

    rho: Optional[float]
    kappa: Optional[float]
    r_upper: Optional[float]
    r_lower: Optional[float]
    k_upper: Optional[float]
    k_lower: Optional[float]
    ind_upper_inf: float
    ind_lower_inf: float
    ind_upper_0: float
    ind_lower_0: float
    exact: bool

    def as_dict(self) -> dict:
        return {
            "rho": self.rho, "kappa": self.kappa,
            "r_upper": self.r_upper, "r_lower": self.r_lower,
            "k_upper": self.k_upper, "k_lower": self.k_lower,
            "Ind_upper": self.ind_upper_inf, "Ind_lower": self.ind_lower_inf,
            "ind_upper": self.ind_upper_0, "ind_lower": self.ind_lower_0,
            "exact": self.exact,
        }


@dataclass(frozen=True)
class ZeroSetReport:
    """Full classification record with the numeric evidence behind it."""

    grey: Verdict
    conservative: Verdict
    zero_class: str
    heavy: Verdict
    intervals: Verdict
    stationary: Verdict
    dim_upper: Optional[float]
    dim_lower: Optional[float]
    method: str
    evidence: dict

    def as_dict(self) -> dict:
        return {
            "grey": self.grey.value.value,
            "conservative": self.conservative.value.value,
            "zero_class": self.zero_class,
            "heavy": self.heavy.value.value,
            "intervals": self.intervals.value.value,
            "stationary": self.stationary.value.value,
            "dim_upper": self.dim_upper,
            "dim_lower": self.dim_lower,
            "method": self.method,
            "evidence": self.evidence,
        }


# --- growth profiles ------------------------------------------------------

@dataclass(frozen=True)
class _Profile:
    idx_inf: Optional[float]     # exponent at infinity, None if ill-defined
    coeff_inf: Optional[float]   # leading coefficient there, None if unknown
    idx_0: Optional[float]
    coeff_0: Optional[float]
    exact: bool


def _profile(mech) -> Optional[_Profile]:
    if isinstance(mech, StableBranching):
        return _Profile(mech.alpha, mech.d, mech.alpha, mech.d, True)
    if isinstance(mech, QuadraticBranching):
        if mech.sigma2 == 0.0:
            return _Profile(1.0, mech.b, 1.0, mech.b, True)
        half = 0.5 * mech.sigma2
        if mech.b > 0:
            return _Profile(2.0, half, 1.0, mech.b, True)
        if mech.b == 0.0:
            return _Profile(2.0, half, 2.0, half, True)
        return _Profile(2.0, half, None, None, True)  # supercritical near 0
    if isinstance(mech, StableImmigration):
        return _Profile(mech.beta, mech.dprime, mech.beta, mech.dprime, True)
    if isinstance(mech, GammaImmigration):
        # slowly varying (log) at infinity: index 0, no power coefficient
        return _Profile(0.0, None, 1.0, mech.a / mech.b, True)
    if isinstance(mech, LampertiImmigration):
        return _Profile(mech.beta, 1.0 / math.gamma(mech.beta), 1.0, 1.0, True)
    if isinstance(mech, CompoundPoissonImmigration):
        if mech.tail is None:
            return _Profile(0.0, mech.mass, 1.0, mech.mass, True)
        return _probed_profile(mech)
    if isinstance(mech, (CustomBranching, CustomImmigration)):
        return _probed_profile(mech)
    return None


def _collapse(lower: float, upper: float) -> Optional[float]:
    # probe slopes carry float jitter; only a real spread means unequal indices
    if upper - lower <= 1e-6:
        return 0.5 * (lower + upper)
    return None


def _probed_profile(mech) -> Optional[_Profile]:
    idx = indices(mech)
    if idx.inconclusive:
        return None
    idx_inf = _collapse(idx.ind_lower_inf, idx.ind_upper_inf)
    idx_0 = _collapse(idx.ind_lower_0, idx.ind_upper_0)
    return _Profile(idx_inf, None, idx_0, None, exact=False)


def is_supercritical(psi: BranchingMechanism) -> bool:
    return branching_derivative_at_zero(psi) < _SUPERCRITICAL_TOL


def regvar_summary(psi, phi) -> Optional[RegVarSummary]:
    """Index data of R = Phi/Psi; None when a profile is unavailable."""
    pp, fp = _profile(psi), _profile(phi)
    if pp is None or fp is None:
        return None
    exact = pp.exact and fp.exact

    rho = None
    r_upper = r_lower = None
    if pp.idx_inf is not None and fp.idx_inf is not None:
        rho = fp.idx_inf - pp.idx_inf
        if rho > -1.0:
            r_upper = r_lower = math.inf
        elif rho < -1.0:
            r_upper = r_lower = 0.0
        elif fp.coeff_inf is not None and pp.coeff_inf is not None:
            r_upper = r_lower = fp.coeff_inf / pp.coeff_inf

    kappa = None
    k_upper = k_lower = None
    if pp.idx_0 is not None and fp.idx_0 is not None:
        kappa = fp.idx_0 - pp.idx_0
        if kappa > -1.0:
            k_upper = k_lower = math.inf
        elif kappa < -1.0:
            k_upper = k_lower = 0.0
        elif fp.coeff_0 is not None and pp.coeff_0 is not None and pp.coeff_0 > 0:
            k_upper = k_lower = fp.coeff_0 / pp.coeff_0

    psi_idx = indices(psi)
    return RegVarSummary(
        rho=rho, kappa=kappa,
        r_upper=r_upper, r_lower=r_lower,
        k_upper=k_upper, k_lower=k_lower,
        ind_upper_inf=psi_idx.ind_upper_inf, ind_lower_inf=psi_idx.ind_lower_inf,
        ind_upper_0=psi_idx.ind_upper_0, ind_lower_0=psi_idx.ind_lower_0,
        exact=exact,
    )


# --- component verdicts ----------------------------------------------------

def _ratio_func(psi, phi):
    def R(u):
        den = psi(u)
        if den == 0.0:
            return math.inf
        num = phi(u)
        if math.isinf(den):
            return math.nan if math.isinf(num) else 0.0
        return num / den
    return R


def heaviness(psi, phi) -> Verdict:
    """Positive Lebesgue measure of the zero set: does int_theta^inf R converge?"""
    theta = positivity_threshold(psi)
    est = tail_verdict_upper(_ratio_func(psi, phi), theta)
    evidence = {"theta": theta, **est.evidence()}
    if est.verdict == FINITE:
        return Verdict.yes(evidence)
    if est.verdict == INFINITE:
        return Verdict.no(evidence)
    return Verdict.inconclusive(evidence)


def has_intervals(phi) -> Verdict:
    """Is the zero set a union of closed nonempty intervals?

    True exactly when the immigration subordinator is compound Poisson
    (no drift, finite jump measure).
    """
    return is_compound_poisson(phi)


def stationary_exists(psi, phi) -> Verdict:
    """Stationary law: nonnegative drift at 0 and int_0 R finite."""
    deriv = branching_derivative_at_zero(psi)
    if deriv < _SUPERCRITICAL_TOL:
        return Verdict.no({"psi_deriv_at_0": deriv, "reason": "supercritical"})
    theta = positivity_threshold(psi)
    est = tail_verdict_lower(_ratio_func(psi, phi), theta)
    evidence = {"psi_deriv_at_0": deriv, "theta": theta, **est.evidence()}
    if est.verdict == FINITE:
        return Verdict.yes(evidence)
    if est.verdict == INFINITE:
        return Verdict.no(evidence)
    return Verdict.inconclusive(evidence)


# --- criterion integrals ----------------------------------------------------

def _exp_over(w: float, den: float) -> float:
    if den <= 0.0 or math.isnan(den):
        return math.nan
    if math.isinf(den):
        return 0.0
    try:
        return math.exp(w) / den
    except OverflowError:
        return math.inf


def _outer_estimate(psi, phi, theta, rel_tol=1e-9):
    """Divergence verdict for int_theta^inf exp(W(z)) dz/Psi(z), W(z)=int_theta^z R."""
    R = _ratio_func(psi, phi)
    state = {"edge": theta, "w": 0.0}
    # the weight must be resolved well below the outer tolerance or its
    # quadrature noise looks like structure and the outer rule subdivides
    # to its limit on every panel
    w_tol = rel_tol * 1e-3

    def hook(lo, hi):
        if lo > state["edge"]:
            state["w"] += adaptive(R, state["edge"], lo, rel_tol=w_tol)
            state["edge"] = lo

    def f(z):
        w = state["w"] + adaptive(R, state["edge"], z, rel_tol=w_tol)
        return _exp_over(w, psi(z))

    return tail_verdict_upper(f, theta, rel_tol=rel_tol, panel_hook=hook)


def _inner_estimate(psi, phi, theta, floor, rel_tol=1e-9):
    """Divergence verdict for int_floor^theta exp(-int_x^theta R) dx/Psi(x)."""
    R = _ratio_func(psi, phi)
    state = {"edge": theta, "w": 0.0}
    w_tol = rel_tol * 1e-3

    def hook(lo, hi):
        if hi < state["edge"]:
            state["w"] -= adaptive(R, hi, state["edge"], rel_tol=w_tol)
            state["edge"] = hi

    def f(x):
        w = state["w"] - adaptive(R, x, state["edge"], rel_tol=w_tol)
        return _exp_over(w, psi(x))

    return tail_verdict_lower(f, theta, floor=floor, rel_tol=rel_tol,
                              panel_hook=hook)


def weight_between(psi, phi, a: float, b: float, rel_tol: float = 1e-9) -> float:
    """int_a^b R(u) du computed on a log grid (well conditioned over decades)."""
    if a == b:
        return 0.0
    if not (a > 0 and b > 0):
        raise ClassificationError("weight integral needs positive endpoints")
    R = _ratio_func(psi, phi)
    return adaptive(lambda z: R(math.exp(z)) * math.exp(z),
                    math.log(a), math.log(b), rel_tol=rel_tol)


# --- dimensions -------------------------------------------------------------

def _clip_unit(x: float) -> float:
    return min(1.0, max(0.0, x))


def _dims_from_summary(summary: RegVarSummary):
    """Interval bounds on the box dimensions from the index data."""
    if summary.r_upper is None or summary.r_lower is None:
        return None
    if math.isinf(summary.r_upper):
        return None  # polar regime, no dimensions
    ind_up = summary.ind_upper_inf
    ind_lo = summary.ind_lower_inf
    if ind_lo <= 1.0 or ind_up <= 1.0:
        return None
    upper = 1.0 - summary.r_lower / (ind_up - 1.0)
    lower = 1.0 - summary.r_upper / (ind_lo - 1.0)
    return _clip_unit(upper), _clip_unit(lower)


def _dims_numeric(psi, phi, rel_tol=1e-9):
    """Box-dimension probes 1 - W(u)/log(1/u) at shrinking u."""
    fs = solver(psi)
    v1 = fs.v_from_infinity(1.0)
    samples = {}
    for u in _DIM_PROBES:
        vu = fs.v_from_infinity(u)
        w = weight_between(psi, phi, v1, vu, rel_tol=rel_tol)
        samples[u] = 1.0 - w / math.log(1.0 / u)
    values = list(samples.values())
    upper, lower = _clip_unit(max(values)), _clip_unit(min(values))
    spread = max(values) - min(values)
    return upper, lower, {"samples": samples, "spread": spread}


def box_dims(psi, phi, zero_class: Optional[str] = None):
    """Upper and lower box-counting dimension of the zero set.

    Only defined for transient or recurrent classes; raises otherwise.
    ``zero_class`` skips re-classification when the caller already has it.
    """
    if zero_class is None:
        zero_class = classify_zero_state(psi, phi).zero_class
    if zero_class not in (TRANSIENT, RECURRENT):
        raise ClassificationError(
            f"dimensions undefined for zero-set class {zero_class}")
    summary = regvar_summary(psi, phi)
    if summary is not None and summary.exact:
        dims = _dims_from_summary(summary)
        if dims is not None:
            return dims
    upper, lower, _ = _dims_numeric(psi, phi)
    return upper, lower


# --- fast path ---------------------------------------------------------------

def rv_fastpath(psi, phi) -> Optional[ZeroSetReport]:
    """Classification by regular-variation index arithmetic.

    Returns None (no fast path) whenever the indices are unknown, a
    comparison lands inside the abstention margin for probed data, or
    the configuration falls in a gap the index theorems do not decide.
    Exact family data decides boundary cases via the theorems' own
    non-strict clauses.
    """
    summary = regvar_summary(psi, phi)
    if summary is None or summary.rho is None:
        return None
    margin = 0.0 if summary.exact else _BOUNDARY_MARGIN
    rho = summary.rho

    heavy: Optional[Verdict] = None
    polar: Optional[bool] = None
    if rho > -1.0 + margin:
        polar = True
        heavy = Verdict.no({"rho": rho, "reason": "ratio integral diverges"})
    elif rho < -1.0 - margin:
        polar = False
        heavy = Verdict.yes({"rho": rho, "reason": "ratio integral converges"})
    elif margin > 0.0:
        return None  # probed data too close to the boundary
    else:
        # rho == -1 exactly: compare sR(s) against the growth indices
        if summary.r_upper is None or summary.r_lower is None:
            return None
        if summary.r_lower >= summary.ind_upper_inf - 1.0:
            polar = True
            heavy = Verdict.no({"rho": rho, "r_lower": summary.r_lower})
        elif summary.r_upper < summary.ind_lower_inf - 1.0:
            polar = False
            if summary.r_lower > 0:
                heavy = Verdict.no({"rho": rho, "r_lower": summary.r_lower,
                                    "reason": "sR(s) bounded away from 0"})
            else:
                heavy = Verdict.inconclusive({"rho": rho, "r_lower": 0.0})
        else:
            return None  # gap between the polar and non-polar clauses

    base = {
        "regvar": summary.as_dict(),
        "margin": margin,
    }
    grey = grey_check(psi)
    if not grey.is_yes:
        return None  # trivial or undecided extinction: fast path does not apply
    conservative = conservativity_check(psi)
    intervals = has_intervals(phi)
    stationary = stationary_exists(psi, phi)

    if polar:
        return ZeroSetReport(
            grey=grey, conservative=conservative, zero_class=POLAR,
            heavy=heavy, intervals=intervals, stationary=stationary,
            dim_upper=None, dim_lower=None, method=METHOD_FASTPATH,
            evidence=base)

    if is_supercritical(psi):
        zero_class = TRANSIENT
        base["recurrence_rule"] = "supercritical: zero set is bounded"
    elif summary.kappa is None:
        return None
    elif summary.kappa < -1.0 - margin:
        zero_class = TRANSIENT
        base["recurrence_rule"] = "kappa < -1"
    elif summary.kappa > -1.0 + margin:
        zero_class = RECURRENT
        base["recurrence_rule"] = "kappa > -1"
    elif margin > 0.0:
        return None
    else:
        if summary.k_upper is None or summary.k_lower is None:
            return None
        if summary.k_upper - summary.ind_lower_0 <= -1.0:
            zero_class = RECURRENT
            base["recurrence_rule"] = "kappa = -1, k_upper <= ind_lower - 1"
        elif summary.k_lower - summary.ind_upper_0 > -1.0:
            zero_class = TRANSIENT
            base["recurrence_rule"] = "kappa = -1, k_lower > ind_upper - 1"
        else:
            return None

    dims = _dims_from_summary(summary) if summary.exact else None
    if dims is None:
        dim_upper = dim_lower = None
    else:
        dim_upper, dim_lower = dims
    return ZeroSetReport(
        grey=grey, conservative=conservative, zero_class=zero_class,
        heavy=heavy, intervals=intervals, stationary=stationary,
        dim_upper=dim_upper, dim_lower=dim_lower, method=METHOD_FASTPATH,
        evidence=base)


# --- main entry ---------------------------------------------------------------

def _is_zero_immigration(phi) -> bool:
    if phi is None:
        return True
    return phi(1.0) == 0.0 and phi(1e6) == 0.0


def classify_zero_state(psi: BranchingMechanism,
                        phi: Optional[ImmigrationMechanism],
                        *, numeric_only: bool = False,
                        rel_tol: float = 1e-9) -> ZeroSetReport:
    """Full zero-set classification; ``numeric_only`` skips the fast path."""
    grey = grey_check(psi)
    conservative = conservativity_check(psi)

    if _is_zero_immigration(phi):
        note = {"note": "no immigration: started at 0 the process stays at 0"}
        return ZeroSetReport(
            grey=grey, conservative=conservative, zero_class=NO_IMMIGRATION,
            heavy=Verdict.yes(dict(note)), intervals=Verdict.yes(dict(note)),
            stationary=Verdict.yes(dict(note)) if not is_supercritical(psi)
            else Verdict.no(dict(note)),
            dim_upper=1.0, dim_lower=1.0, method=METHOD_CLOSED, evidence=note)

    intervals = has_intervals(phi)
    if grey.is_no:
        return ZeroSetReport(
            grey=grey, conservative=conservative, zero_class=TRIVIAL_POINT,
            heavy=Verdict.no({"reason": "zero set is the single point 0"}),
            intervals=intervals, stationary=stationary_exists(psi, phi),
            dim_upper=0.0, dim_lower=0.0, method=METHOD_CLOSED,
            evidence={"grey": grey.evidence})
    if grey.is_inconclusive:
        return ZeroSetReport(
            grey=grey, conservative=conservative, zero_class=INCONCLUSIVE_CLASS,
            heavy=Verdict.inconclusive({"reason": "extinction test undecided"}),
            intervals=intervals, stationary=stationary_exists(psi, phi),
            dim_upper=None, dim_lower=None, method=METHOD_NUMERIC,
            evidence={"grey": grey.evidence})

    if not numeric_only:
        fast = rv_fastpath(psi, phi)
        if fast is not None:
            return fast

    theta = positivity_threshold(psi)
    stationary = stationary_exists(psi, phi)
    heavy = heaviness(psi, phi)
    outer = _outer_estimate(psi, phi, theta, rel_tol=rel_tol)
    evidence = {"theta": theta, "outer": outer.evidence()}

    if outer.verdict == INFINITE:
        return ZeroSetReport(
            grey=grey, conservative=conservative, zero_class=POLAR,
            heavy=heavy, intervals=intervals, stationary=stationary,
            dim_upper=None, dim_lower=None, method=METHOD_NUMERIC,
            evidence=evidence)
    if outer.verdict == INCONCLUSIVE:
        return ZeroSetReport(
            grey=grey, conservative=conservative, zero_class=INCONCLUSIVE_CLASS,
            heavy=heavy, intervals=intervals, stationary=stationary,
            dim_upper=None, dim_lower=None, method=METHOD_NUMERIC,
            evidence=evidence)

    root = largest_root(psi)
    supercritical = is_supercritical(psi)
    inner = _inner_estimate(psi, phi, theta, root, rel_tol=rel_tol)
    evidence["inner"] = inner.evidence()
    evidence["root"] = root
    evidence["supercritical"] = supercritical

    if inner.verdict == FINITE:
        zero_class = TRANSIENT
    elif inner.verdict == INFINITE:
        if supercritical:
            # theory forbids recurrence for supercritical branching; a
            # divergent inner integral here means the numerics are off
            zero_class = INCONCLUSIVE_CLASS
            evidence["note"] = ("inner integral diverged for a supercritical "
                                "mechanism; recurrence is impossible")
        else:
            zero_class = RECURRENT
    else:
        zero_class = INCONCLUSIVE_CLASS

    if zero_class in (TRANSIENT, RECURRENT):
        dim_upper, dim_lower, dim_evidence = _dims_numeric(psi, phi)
        evidence["dims"] = dim_evidence
    else:
        dim_upper = dim_lower = None

    return ZeroSetReport(
        grey=grey, conservative=conservative, zero_class=zero_class,
        heavy=heavy, intervals=intervals, stationary=stationary,
        dim_upper=dim_upper, dim_lower=dim_lower, method=METHOD_NUMERIC,
        evidence=evidence)
