import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ringbot.errors import StraightLineMotion
from ringbot.estimation import fit_circle
from ringbot.kinematics import (
    MotionParams,
    Pose,
    half_orbit_sine_sum,
    iterate_trajectory,
    max_periods,
    orbit_radius_estimate,
    orbit_radius_exact,
    params_from_accelerations,
    rotate,
)


def turning(deg, dx=1.0, T=1.0, beta=0.0):
    return MotionParams(delta_phi=math.radians(deg), delta_x=dx,
                        period_T=T, beta=beta)


class TestMotionParams:
    def test_invariants(self):
        with pytest.raises(ValueError):
            MotionParams(delta_phi=0.1, delta_x=-0.1, period_T=1.0)
        with pytest.raises(ValueError):
            MotionParams(delta_phi=0.1, delta_x=0.1, period_T=0.0)
        with pytest.raises(ValueError):
            MotionParams(delta_phi=math.pi, delta_x=0.1, period_T=1.0)

    def test_orbit_radius_property(self):
        assert turning(60).orbit_radius == pytest.approx(1.0)
        assert turning(0).orbit_radius == math.inf


class TestPose:
    def test_unit_vector_enforced(self):
        with pytest.raises(ValueError):
            Pose(0, 0, 1.0, 1.0)

    def test_from_heading(self):
        p = Pose.from_heading(1.0, 2.0, math.pi / 2)
        assert p.heading == pytest.approx(math.pi / 2)
        assert p.position == (1.0, 2.0)


class TestOrbitRadiusEstimate:
    def test_hexagon(self):
        # hand evaluation: sin60 + sin120 + sin180 = 1.73205, halved
        assert orbit_radius_estimate(turning(60)) == pytest.approx(
            0.86603, abs=5e-6)

    def test_square(self):
        assert orbit_radius_estimate(turning(90)) == pytest.approx(0.5)

    def test_degenerate_turn(self):
        with pytest.raises(StraightLineMotion):
            orbit_radius_estimate(
                MotionParams(delta_phi=1e-9, delta_x=1.0, period_T=1.0))

    def test_sine_sum_at_10_deg(self):
        # regression pins: sum = 11.430, estimate 5.715 vs exact 5.737
        assert half_orbit_sine_sum(math.radians(10)) == pytest.approx(
            11.430, abs=1e-3)
        assert orbit_radius_estimate(turning(10)) == pytest.approx(
            5.715, abs=1e-3)
        assert orbit_radius_exact(turning(10)) == pytest.approx(5.737, abs=1e-3)

    def test_sign_of_turn_ignored(self):
        assert orbit_radius_estimate(turning(-60)) == pytest.approx(
            orbit_radius_estimate(turning(60)))


class TestOrbitRadiusExact:
    def test_hexagon_chord(self):
        assert orbit_radius_exact(turning(60)) == pytest.approx(1.0)

    def test_square_chord(self):
        assert orbit_radius_exact(turning(90)) == pytest.approx(0.70711, abs=5e-6)

    def test_back_and_forth(self):
        assert orbit_radius_exact(turning(179.9999)) == pytest.approx(0.5, rel=1e-6)

    def test_degenerate(self):
        with pytest.raises(StraightLineMotion):
            orbit_radius_exact(turning(0))

    @pytest.mark.parametrize("deg", [1, 2, 5, 10, 20])
    def test_estimator_converges_to_exact(self, deg):
        ratio = orbit_radius_estimate(turning(deg)) / orbit_radius_exact(
            turning(deg))
        assert ratio == pytest.approx(1.0, abs=math.radians(deg))


class TestIterateTrajectory:
    def test_unit_square_closure(self):
        traj = iterate_trajectory(turning(90), Pose(0, 0), 4)
        pts = traj.positions()
        assert pts[1] == pytest.approx((1, 0), abs=1e-12)
        assert pts[2] == pytest.approx((1, 1), abs=1e-12)
        assert pts[3] == pytest.approx((0, 1), abs=1e-12)
        assert pts[4] == pytest.approx((0, 0), abs=1e-12)

    def test_straight_line(self):
        traj = iterate_trajectory(turning(0, dx=0.5), Pose(0, 0), 5)
        for k, s in enumerate(traj):
            assert s.pose.x == pytest.approx(0.5 * k, abs=1e-12)
            assert s.pose.y == 0.0

    def test_straight_line_rotated_by_beta(self):
        traj = iterate_trajectory(turning(0, dx=0.5, beta=math.pi / 2),
                                  Pose(0, 0), 5)
        for k, s in enumerate(traj):
            assert s.pose.x == pytest.approx(0.0, abs=1e-12)
            assert s.pose.y == pytest.approx(0.5 * k, abs=1e-12)

    def test_timestamps_and_indices(self):
        traj = iterate_trajectory(turning(30, T=2.5), Pose(0, 0), 7)
        assert [s.k for s in traj] == list(range(8))
        for s in traj:
            assert s.t == pytest.approx(s.k * 2.5)

    def test_zero_periods_single_row(self):
        traj = iterate_trajectory(turning(30), Pose(1, 2), 0)
        assert len(traj) == 1
        assert traj[0].pose.position == (1, 2)

    @pytest.mark.parametrize("deg", [10, 30, 60, 90])
    def test_points_on_exact_circle(self, deg):
        params = turning(deg, dx=0.05, beta=0.3)
        n = round(360 / deg)
        traj = iterate_trajectory(params, Pose(0.2, -0.1, 0.6, 0.8), n)
        fit = fit_circle(traj.positions())
        r_exact = orbit_radius_exact(params)
        radii = [math.dist(p, fit.center) for p in traj.positions()]
        for r in radii:
            assert abs(r - r_exact) < 1e-9 * params.delta_x

    @pytest.mark.parametrize("deg", [10, 30, 60, 90])
    def test_closure_when_turn_divides_full_circle(self, deg):
        params = turning(deg, dx=0.05)
        m = round(360 / deg)
        traj = iterate_trajectory(params, Pose(0, 0), m)
        assert math.dist(traj[m].pose.position, traj[0].pose.position) \
            < 1e-9 * params.delta_x

    def test_heading_consistency(self):
        params = turning(17.3, beta=1.0)
        traj = iterate_trajectory(params, Pose(0, 0), 40)
        for s in traj:
            expected = rotate((1.0, 0.0), s.k * params.delta_phi)
            assert s.pose.ref_x == pytest.approx(expected[0], abs=1e-9)
            assert s.pose.ref_y == pytest.approx(expected[1], abs=1e-9)

    def test_rejects_negative_period_count(self):
        with pytest.raises(ValueError):
            iterate_trajectory(turning(30), Pose(0, 0), -1)


class TestRotationMatrix:
    @given(a=st.floats(-10, 10), b=st.floats(-10, 10))
    @settings(max_examples=100)
    def test_composition(self, a, b):
        v = (0.3, -0.7)
        once = rotate(rotate(v, a), b)
        combined = rotate(v, a + b)
        assert once[0] == pytest.approx(combined[0], abs=1e-12)
        assert once[1] == pytest.approx(combined[1], abs=1e-12)

    @given(a=st.floats(-10, 10))
    def test_preserves_length(self, a):
        x, y = rotate((3.0, 4.0), a)
        assert math.hypot(x, y) == pytest.approx(5.0, abs=1e-12)


class TestMaxPeriods:
    def test_even_division(self):
        assert max_periods(10, 2) == 5

    def test_boundary_lap_time(self):
        assert max_periods(268.13, 2.5) == 107

    def test_shorter_than_one_period(self):
        assert max_periods(1, 2) == 0

    def test_rejects_bad_period(self):
        with pytest.raises(ValueError):
            max_periods(1, 0)


class TestParamsFromAccelerations:
    def test_zero_acceleration(self):
        p = params_from_accelerations(0.0, 1.0, 0.1)
        assert p.delta_x == 0.0

    def test_distance(self):
        p = params_from_accelerations(2.0, 0.0, 0.1)
        assert p.delta_x == pytest.approx(0.01)

    def test_turn(self):
        p = params_from_accelerations(0.0, 34.50, 0.1)
        assert p.delta_phi == pytest.approx(0.1725)

    def test_rejects_bad_release_time(self):
        with pytest.raises(ValueError):
            params_from_accelerations(1.0, 1.0, 0.0)


def test_circle_membership_property():
    rng = np.random.default_rng(7)
    for _ in range(20):
        deg = rng.uniform(5, 120)
        params = turning(deg, dx=float(rng.uniform(0.01, 0.2)),
                         beta=float(rng.uniform(-math.pi, math.pi)))
        traj = iterate_trajectory(params, Pose(0, 0), 30)
        # all points equidistant from the analytic center
        fit = fit_circle(traj.positions())
        r = orbit_radius_exact(params)
        for p in traj.positions():
            assert abs(math.dist(p, fit.center) - r) < 1e-9 * params.delta_x
