"""Zero-set classification: trichotomy, heaviness, dimensions, fast path."""

import math

import pytest

from cbizero.classify import (
    ClassificationError,
    RECURRENT,
    TRANSIENT,
    POLAR,
    TRIVIAL_POINT,
    NO_IMMIGRATION,
    INCONCLUSIVE_CLASS,
    METHOD_CLOSED,
    METHOD_FASTPATH,
    METHOD_NUMERIC,
    box_dims,
    classify_zero_state,
    has_intervals,
    heaviness,
    is_supercritical,
    regvar_summary,
    rv_fastpath,
    stationary_exists,
    weight_between,
)
from cbizero.mechanisms import (
    CompoundPoissonImmigration,
    CustomBranching,
    CustomImmigration,
    GammaImmigration,
    LampertiImmigration,
    QuadraticBranching,
    StableBranching,
    StableImmigration,
)

FELLER = StableBranching(d=1.0, alpha=2.0)
SUPER = QuadraticBranching(b=-1.0, sigma2=2.0)
SUBQUAD = QuadraticBranching(b=1.0, sigma2=2.0)


def drift(c):
    return StableImmigration(dprime=c, beta=1.0)


class TestStableOnStable:
    def test_polar_when_ratio_at_least_alpha_minus_one(self):
        report = classify_zero_state(FELLER, drift(1.0))
        assert report.zero_class == POLAR
        assert report.dim_upper is None

    def test_polar_strictly_above(self):
        assert classify_zero_state(FELLER, drift(2.0)).zero_class == POLAR

    def test_recurrent_below(self):
        report = classify_zero_state(FELLER, drift(0.5))
        assert report.zero_class == RECURRENT
        assert report.heavy.is_no
        assert report.dim_upper == pytest.approx(0.5)
        assert report.dim_lower == pytest.approx(0.5)

    def test_transient_weak_immigration(self):
        report = classify_zero_state(FELLER, StableImmigration(dprime=1.0, beta=0.5))
        assert report.zero_class == TRANSIENT
        assert report.heavy.is_yes
        assert (report.dim_upper, report.dim_lower) == (1.0, 1.0)

    def test_polar_strong_immigration_any_alpha(self):
        # rho = beta - alpha > -1
        report = classify_zero_state(StableBranching(d=1.0, alpha=1.3),
                                     StableImmigration(dprime=1.0, beta=0.9))
        assert report.zero_class == POLAR

    def test_transient_non_critical(self):
        report = classify_zero_state(StableBranching(d=1.0, alpha=1.8),
                                     StableImmigration(dprime=1.0, beta=0.3))
        assert report.zero_class == TRANSIENT
        assert report.heavy.is_yes


class TestGammaImmigration:
    def test_alpha_two_boundary_is_recurrent(self):
        # kappa = -1 with limit a/(b d); recurrent exactly when a/b <= d
        report = classify_zero_state(FELLER, GammaImmigration(a=1.0, b=1.0))
        assert report.zero_class == RECURRENT
        assert report.heavy.is_yes
        assert (report.dim_upper, report.dim_lower) == (1.0, 1.0)

    def test_alpha_two_transient_above(self):
        report = classify_zero_state(FELLER, GammaImmigration(a=3.0, b=1.0))
        assert report.zero_class == TRANSIENT
        assert report.heavy.is_yes

    def test_alpha_below_two_always_recurrent(self):
        report = classify_zero_state(StableBranching(d=1.0, alpha=1.5),
                                     GammaImmigration(a=5.0, b=1.0))
        assert report.zero_class == RECURRENT


class TestLampertiImmigration:
    def test_drift_case_polar_at_d_one(self):
        # immigration behaves like q; polar exactly when d <= 1/Gamma(2) = 1
        assert classify_zero_state(FELLER, LampertiImmigration(beta=1.0)).zero_class == POLAR

    def test_drift_case_recurrent_at_d_two(self):
        report = classify_zero_state(StableBranching(d=2.0, alpha=2.0),
                                     LampertiImmigration(beta=1.0))
        assert report.zero_class == RECURRENT
        assert report.dim_upper == pytest.approx(0.5)

    def test_fractional_case_recurrent(self):
        # rho = -1.5 so heavy; near zero the immigration has unit slope, and
        # kappa-bar = 1 <= ind(Psi) - 1 lands on the recurrent side
        report = classify_zero_state(FELLER, LampertiImmigration(beta=0.5))
        assert report.zero_class == RECURRENT
        assert report.heavy.is_yes

    def test_fractional_case_transient(self):
        # halving d doubles kappa-bar past the boundary
        report = classify_zero_state(StableBranching(d=0.5, alpha=2.0),
                                     LampertiImmigration(beta=0.5))
        assert report.zero_class == TRANSIENT
        assert report.heavy.is_yes


class TestSupercritical:
    def test_never_recurrent(self):
        report = classify_zero_state(SUPER, drift(0.5))
        assert report.zero_class == TRANSIENT
        report = classify_zero_state(SUPER, drift(0.5), numeric_only=True)
        assert report.zero_class == TRANSIENT

    def test_strong_immigration_still_polar(self):
        assert classify_zero_state(SUPER, drift(5.0)).zero_class == POLAR
        assert classify_zero_state(
            SUPER, drift(5.0), numeric_only=True).zero_class == POLAR

    def test_detection(self):
        assert is_supercritical(SUPER)
        assert not is_supercritical(FELLER)
        assert not is_supercritical(SUBQUAD)


class TestDegenerate:
    def test_grey_failure_is_trivial_point(self):
        report = classify_zero_state(QuadraticBranching(b=1.0, sigma2=0.0),
                                     drift(1.0))
        assert report.zero_class == TRIVIAL_POINT
        assert report.heavy.is_no
        assert (report.dim_upper, report.dim_lower) == (0.0, 0.0)
        assert report.method == METHOD_CLOSED

    def test_no_immigration(self):
        report = classify_zero_state(FELLER, None)
        assert report.zero_class == NO_IMMIGRATION
        assert (report.dim_upper, report.dim_lower) == (1.0, 1.0)
        assert report.heavy.is_yes

    def test_vanishing_immigration_handle(self):
        report = classify_zero_state(FELLER, CustomImmigration(eval=lambda q: 0.0))
        assert report.zero_class == NO_IMMIGRATION

    def test_borderline_grey_reports_inconclusive(self):
        slow = CustomBranching(eval=lambda q: q * math.log1p(q))
        report = classify_zero_state(slow, drift(1.0))
        assert report.zero_class == INCONCLUSIVE_CLASS


class TestComponentVerdicts:
    def test_heaviness_examples(self):
        assert heaviness(FELLER, StableImmigration(dprime=1.0, beta=0.5)).is_yes
        assert heaviness(FELLER, drift(0.5)).is_no
        assert heaviness(FELLER, GammaImmigration(a=1.0, b=1.0)).is_yes

    def test_interval_structure(self):
        assert has_intervals(CompoundPoissonImmigration(mass=1.0)).is_yes
        assert has_intervals(StableImmigration(dprime=1.0, beta=0.5)).is_no
        assert has_intervals(GammaImmigration(a=1.0, b=1.0)).is_no

    def test_stationary_examples(self):
        assert stationary_exists(FELLER, drift(1.0)).is_no
        assert stationary_exists(SUBQUAD, drift(1.0)).is_yes
        assert stationary_exists(SUPER, drift(1.0)).is_no

    def test_weight_between_closed_form(self):
        # R = s^{-1.5} for psi=q^2, phi=q^0.5: antiderivative -2 s^{-1/2}
        phi = StableImmigration(dprime=1.0, beta=0.5)
        got = weight_between(FELLER, phi, 1.0, 100.0)
        assert got == pytest.approx(2.0 * (1.0 - 0.1), rel=1e-8)


class TestRegVarSummary:
    def test_stable_pair(self):
        s = regvar_summary(StableBranching(d=2.0, alpha=1.5),
                           StableImmigration(dprime=1.0, beta=0.5))
        assert s.exact
        assert s.rho == pytest.approx(-1.0)
        assert s.r_upper == s.r_lower == pytest.approx(0.5)
        assert s.kappa == pytest.approx(-1.0)

    def test_gamma_pair(self):
        s = regvar_summary(FELLER, GammaImmigration(a=3.0, b=2.0))
        assert s.rho == pytest.approx(-2.0)
        assert s.r_upper == 0.0
        assert s.kappa == pytest.approx(-1.0)
        assert s.k_upper == pytest.approx(1.5)

    def test_quadratic_supercritical_has_no_zero_profile(self):
        s = regvar_summary(SUPER, drift(1.0))
        assert s.rho == pytest.approx(-1.0)
        assert s.kappa is None

    def test_custom_probed_is_inexact(self):
        phi = CustomImmigration(eval=lambda q: 2.0 * q ** 0.4 if q > 0 else 0.0)
        s = regvar_summary(FELLER, phi)
        assert s is not None and not s.exact
        assert s.rho == pytest.approx(-1.6, abs=1e-6)


class TestFastPath:
    def test_decides_all_plain_cases(self):
        cases = [
            (FELLER, drift(1.0), POLAR),
            (FELLER, drift(0.5), RECURRENT),
            (FELLER, StableImmigration(dprime=1.0, beta=0.5), TRANSIENT),
        ]
        for psi, phi, expected in cases:
            report = rv_fastpath(psi, phi)
            assert report is not None
            assert report.zero_class == expected
            assert report.method == METHOD_FASTPATH

    def test_probed_boundary_abstains(self):
        # numerically indistinguishable from the rho = -1 boundary
        phi = CustomImmigration(eval=lambda q: q ** 0.9995 if q > 0 else 0.0)
        psi = CustomBranching(eval=lambda q: q * q)
        assert rv_fastpath(psi, phi) is None

    def test_probed_clear_case_decides(self):
        phi = CustomImmigration(eval=lambda q: q ** 0.5 if q > 0 else 0.0)
        psi = CustomBranching(eval=lambda q: q * q)
        report = rv_fastpath(psi, phi)
        assert report is not None
        assert report.zero_class == TRANSIENT

    def test_oscillating_mechanism_abstains(self):
        wobble = CustomImmigration(
            eval=lambda q: q ** 0.5 * (1.0 + 0.5 * math.sin(math.log(q)))
            if q > 0 else 0.0)
        assert rv_fastpath(FELLER, wobble) is None

    def test_grey_failure_abstains(self):
        assert rv_fastpath(QuadraticBranching(b=1.0, sigma2=0.0), drift(1.0)) is None


class TestNumericAgreement:
    CASES = [
        (StableBranching(d=1.0, alpha=1.5), StableImmigration(dprime=1.0, beta=0.9)),
        (StableBranching(d=1.0, alpha=1.5), StableImmigration(dprime=0.5, beta=0.5)),
        (StableBranching(d=2.0, alpha=1.8), StableImmigration(dprime=1.0, beta=0.8)),
        (FELLER, GammaImmigration(a=1.0, b=2.0)),
        (SUBQUAD, drift(0.5)),
        (SUPER, drift(0.5)),
    ]

    @pytest.mark.parametrize("psi,phi", CASES)
    def test_routes_agree(self, psi, phi):
        fast = rv_fastpath(psi, phi)
        assert fast is not None
        numeric = classify_zero_state(psi, phi, numeric_only=True)
        assert numeric.method == METHOD_NUMERIC
        assert numeric.zero_class == fast.zero_class
        assert numeric.heavy.value == fast.heavy.value


class TestScalingMonotonicity:
    @pytest.mark.parametrize("phi", [drift(0.5), StableImmigration(dprime=0.3, beta=1.0),
                                     LampertiImmigration(beta=1.0)])
    def test_polar_set_upward_closed_in_scale(self, phi):
        from cbizero.mechanisms import scale_immigration
        seen_polar = False
        for c in (1.0, 2.0, 5.0):
            cls = classify_zero_state(FELLER, scale_immigration(phi, c)).zero_class
            if seen_polar:
                assert cls == POLAR
            seen_polar = seen_polar or cls == POLAR


class TestBoxDims:
    def test_critical_recurrent_formula(self):
        assert box_dims(FELLER, drift(0.5)) == (pytest.approx(0.5), pytest.approx(0.5))

    def test_heavy_is_full_dimension(self):
        assert box_dims(FELLER, StableImmigration(dprime=1.0, beta=0.5)) == (1.0, 1.0)

    def test_lamperti_critical(self):
        got = box_dims(StableBranching(d=2.0, alpha=2.0), LampertiImmigration(beta=1.0))
        assert got == (pytest.approx(0.5), pytest.approx(0.5))

    def test_undefined_for_polar(self):
        with pytest.raises(ClassificationError):
            box_dims(FELLER, drift(1.0))

    def test_undefined_for_trivial_point(self):
        with pytest.raises(ClassificationError):
            box_dims(QuadraticBranching(b=1.0, sigma2=0.0), drift(1.0))

    def test_numeric_probes_track_exact_value(self):
        # numeric fallback on a pair whose exact dimension is 0.75
        psi = CustomBranching(eval=lambda q: q * q)
        phi = CustomImmigration(eval=lambda q: 0.25 * q)
        report = classify_zero_state(psi, phi, numeric_only=True)
        assert report.zero_class == RECURRENT
        assert report.dim_upper == pytest.approx(0.75, abs=0.02)
        assert report.dim_lower == pytest.approx(0.75, abs=0.02)


class TestReportShape:
    def test_as_dict_keys(self):
        report = classify_zero_state(FELLER, drift(0.5))
        data = report.as_dict()
        assert set(data) == {"grey", "conservative", "zero_class", "heavy",
                             "intervals", "stationary", "dim_upper", "dim_lower",
                             "method", "evidence"}
        assert data["zero_class"] == RECURRENT
        assert data["grey"] == "Yes"
