"""Flow inversion, extinction probabilities, and the marginal transform."""

import math

import pytest

from cbizero.flow import FlowError, FlowSolver, GreyConditionError, solver
from cbizero.mechanisms import (
    CustomBranching,
    MechanismDomainError,
    QuadraticBranching,
    StableBranching,
    StableImmigration,
)

FELLER = StableBranching(d=1.0, alpha=2.0)          # psi = q^2
STABLE15 = StableBranching(d=1.0, alpha=1.5)        # psi = q^1.5
SUBCRIT = QuadraticBranching(b=1.0, sigma2=2.0)     # psi = q + q^2
SUPER = QuadraticBranching(b=-1.0, sigma2=2.0)      # psi = -q + q^2, root 1


class TestTailTime:
    def test_feller(self):
        assert solver(FELLER).tail_time(2.0) == pytest.approx(0.5)

    def test_stable_15(self):
        # antiderivative 2 a^{-1/2}
        assert solver(STABLE15).tail_time(1.0) == pytest.approx(2.0)
        assert solver(STABLE15).tail_time(4.0) == pytest.approx(1.0)

    def test_subcritical_quadratic(self):
        # partial fractions: int dq/(q(1+q)) = log(q/(1+q))
        assert solver(SUBCRIT).tail_time(1.0) == pytest.approx(math.log(2.0))

    def test_strictly_decreasing(self):
        s = solver(STABLE15)
        values = [s.tail_time(a) for a in (0.5, 1.0, 2.0, 4.0)]
        assert all(x > y for x, y in zip(values, values[1:]))

    def test_custom_matches_closed_form(self):
        custom = FlowSolver(psi=CustomBranching(eval=lambda q: q * q))
        assert custom.tail_time(2.0) == pytest.approx(0.5, rel=1e-8)

    def test_pure_drift_has_no_tail_time(self):
        drift = FlowSolver(psi=QuadraticBranching(b=1.0, sigma2=0.0))
        with pytest.raises(GreyConditionError):
            drift.tail_time(1.0)

    def test_below_supercritical_root_rejected(self):
        with pytest.raises(MechanismDomainError):
            solver(SUPER).tail_time(0.5)

    def test_nonpositive_argument_rejected(self):
        with pytest.raises(MechanismDomainError):
            solver(FELLER).tail_time(0.0)


class TestBoundaryFlow:
    def test_feller_is_one_over_t(self):
        s = solver(FELLER)
        assert s.v_from_infinity(1.0) == pytest.approx(1.0)
        assert s.v_from_infinity(0.25) == pytest.approx(4.0)

    def test_stable_15_inverts_tail_time(self):
        assert solver(STABLE15).v_from_infinity(2.0) == pytest.approx(1.0)

    def test_strictly_decreasing_in_t(self):
        s = solver(SUBCRIT)
        values = [s.v_from_infinity(t) for t in (0.1, 0.5, 1.0, 5.0)]
        assert all(x > y for x, y in zip(values, values[1:]))

    def test_supercritical_limit_is_largest_root(self):
        assert solver(SUPER).v_from_infinity(200.0) == pytest.approx(1.0)

    def test_custom_route_agrees(self):
        custom = FlowSolver(psi=CustomBranching(eval=lambda q: q * q))
        assert custom.v_from_infinity(1.0) == pytest.approx(1.0, rel=1e-6)

    def test_nonpositive_time_rejected(self):
        with pytest.raises(MechanismDomainError):
            solver(FELLER).v_from_infinity(0.0)


class TestFlowFromLambda:
    def test_feller_closed_form(self):
        assert solver(FELLER).v_from_lambda(1.0, 1.0) == pytest.approx(0.5)

    def test_zero_is_fixed_point(self):
        for s in (solver(FELLER), solver(SUPER)):
            assert s.v_from_lambda(3.0, 0.0) == 0.0

    def test_time_zero_is_identity(self):
        assert solver(STABLE15).v_from_lambda(0.0, 4.0) == 4.0

    def test_stable_15_satisfies_defining_equation(self):
        # 2 (v^{-1/2} - lambda^{-1/2}) = t at lambda=4, t=1 gives v=1
        v = solver(STABLE15).v_from_lambda(1.0, 4.0)
        assert 2.0 * (v ** -0.5 - 4.0 ** -0.5) == pytest.approx(1.0, rel=1e-10)
        assert v == pytest.approx(1.0)

    def test_supercritical_both_sides_of_root(self):
        s = solver(SUPER)
        # exact: 1/v = e^{-t}/lam - expm1(-t)
        assert s.v_from_lambda(1.0, 0.5) == pytest.approx(math.e / (1 + math.e))
        assert s.v_from_lambda(1.0, 2.0) == pytest.approx(2 * math.e / (2 * math.e - 1))
        assert s.v_from_lambda(5.0, 1.0) == pytest.approx(1.0)  # started at the root

    def test_numeric_route_matches_closed_form(self):
        custom = FlowSolver(psi=CustomBranching(eval=lambda q: -q + q * q))
        assert custom.v_from_lambda(1.0, 0.5) == pytest.approx(
            math.e / (1 + math.e), rel=1e-9)
        assert custom.v_from_lambda(1.0, 2.0) == pytest.approx(
            2 * math.e / (2 * math.e - 1), rel=1e-9)

    def test_monotone_nonincreasing_in_t_subcritical(self):
        s = solver(SUBCRIT)
        values = [s.v_from_lambda(t, 3.0) for t in (0.0, 0.5, 1.0, 2.0, 8.0)]
        assert all(x >= y for x, y in zip(values, values[1:]))

    def test_dominated_by_boundary_flow(self):
        s = solver(STABLE15)
        for t in (0.1, 1.0, 10.0):
            assert s.v_from_lambda(t, 7.0) <= s.v_from_infinity(t)

    def test_above_cap_means_infinity(self):
        s = solver(FELLER)
        assert s.v_from_lambda(0.5, 1e301) == s.v_from_infinity(0.5)

    def test_inconsistent_custom_structure_raises(self):
        # positive dip below the detected largest root: not a convex exponent
        wild = CustomBranching(eval=lambda q: q * (q - 1.0) * (q - 2.0) * (q - 3.0),
                               theta=4.0)
        s = FlowSolver(psi=wild)
        with pytest.raises(FlowError):
            s.v_from_lambda(1.0, 2.5)


class TestSemigroup:
    @pytest.mark.parametrize("mech", [FELLER, STABLE15, SUBCRIT, SUPER])
    def test_flow_composes(self, mech):
        s = solver(mech)
        for t, u, lam in [(0.3, 0.7, 2.0), (1.0, 1.0, 0.4), (0.05, 2.0, 5.0)]:
            direct = s.v_from_lambda(t + u, lam)
            composed = s.v_from_lambda(t, s.v_from_lambda(u, lam))
            assert composed == pytest.approx(direct, rel=1e-9, abs=1e-12)

    @pytest.mark.parametrize("mech", [FELLER, SUBCRIT])
    def test_ode_residual_shrinks_first_order(self, mech):
        s = solver(mech)
        lam, t = 2.0, 0.5
        v = s.v_from_lambda(t, lam)
        residuals = []
        for h in (1e-3, 1e-4, 1e-5):
            rate = (s.v_from_lambda(t + h, lam) - v) / h
            residuals.append(abs(rate + mech(v)))
        assert residuals[0] / residuals[1] == pytest.approx(10.0, rel=0.2)
        assert residuals[1] / residuals[2] == pytest.approx(10.0, rel=0.2)


class TestExtinction:
    def test_feller_values(self):
        s = solver(FELLER)
        assert s.extinction_prob(1.0, 1.0) == pytest.approx(math.exp(-1.0))
        assert s.extinction_prob(2.0, 0.5) == pytest.approx(math.exp(-4.0))

    def test_zero_mass_dies_immediately(self):
        assert solver(STABLE15).extinction_prob(0.0, 3.0) == 1.0

    def test_nondecreasing_in_t(self):
        s = solver(STABLE15)
        probs = [s.extinction_prob(1.0, t) for t in (0.1, 1.0, 10.0, 100.0)]
        assert all(p <= r for p, r in zip(probs, probs[1:]))


class TestMarginalTransform:
    def test_drift_immigration_oracle(self):
        # psi=q^2, phi=2q from x=0: transform is (1+qt)^{-2}
        s = solver(FELLER)
        phi = StableImmigration(dprime=2.0, beta=1.0)
        for q, t in [(1.0, 1.0), (0.5, 2.0), (4.0, 0.25), (2.0, 3.0)]:
            assert s.cbi_laplace(0.0, q, t, phi) == pytest.approx(
                (1.0 + q * t) ** -2.0, rel=1e-8)

    def test_with_initial_mass(self):
        s = solver(FELLER)
        phi = StableImmigration(dprime=0.5, beta=1.0)
        expected = math.exp(-0.5) * 2.0 ** -0.5
        assert s.cbi_laplace(1.0, 1.0, 1.0, phi) == pytest.approx(expected, rel=1e-8)

    def test_q_zero_is_one(self):
        phi = StableImmigration(dprime=1.0, beta=0.5)
        assert solver(STABLE15).cbi_laplace(2.0, 0.0, 1.0, phi) == 1.0

    def test_nonincreasing_in_q_and_x(self):
        s = solver(SUBCRIT)
        phi = StableImmigration(dprime=1.0, beta=0.5)
        in_q = [s.cbi_laplace(1.0, q, 1.0, phi) for q in (0.5, 1.0, 2.0, 4.0)]
        assert all(a >= b for a, b in zip(in_q, in_q[1:]))
        in_x = [s.cbi_laplace(x, 1.0, 1.0, phi) for x in (0.0, 1.0, 2.0, 4.0)]
        assert all(a >= b for a, b in zip(in_x, in_x[1:]))


class TestSolverValidation:
    def test_tolerances_must_be_small(self):
        with pytest.raises(MechanismDomainError):
            FlowSolver(psi=FELLER, quad_tol=1e-3)
        with pytest.raises(MechanismDomainError):
            FlowSolver(psi=FELLER, root_tol=0.0)
