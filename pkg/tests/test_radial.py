"""Exact radial solutions and the modified Laplace-transform identity."""

import math

import numpy as np
import pytest

import oracles
from varadhan_lab import (
    ConfigurationError,
    QuadratureSpec,
    TruncationError,
    ball_elliptic_eval,
    ball_series_eval,
    ball_series_profile,
    ball_series_radial_table,
    build_series_solution,
    coefficient_identity_value,
    density_exponent,
    exterior_elliptic_eval,
    global_elliptic_eval,
    global_parabolic_eval,
    half_space_eval,
    laplace_transform_check,
    log_ball_elliptic_eval,
    log_exterior_elliptic_eval,
    log_global_parabolic_eval,
    log_half_space_eval,
    rate_fit,
    varadhan_parabolic_residual,
)

QUAD = QuadratureSpec()
INF = math.inf


def radial_pde_residual(u_of_r_t, N, p, r, t, step=1e-4):
    """Central-difference check of u_t = ((p-1)/p) u_rr + ((N-1)/p) u_r / r.

    At p = inf the radial form degenerates to u_t = u_rr.
    """
    u_t = (u_of_r_t(r, t + step) - u_of_r_t(r, t - step)) / (2.0 * step)
    u_r = (u_of_r_t(r + step, t) - u_of_r_t(r - step, t)) / (2.0 * step)
    u_rr = (
        u_of_r_t(r + step, t) - 2.0 * u_of_r_t(r, t) + u_of_r_t(r - step, t)
    ) / (step * step)
    if math.isinf(p):
        return u_t - u_rr
    return u_t - ((p - 1.0) / p) * u_rr - ((N - 1.0) / p) * u_r / r


class TestGlobalParabolic:
    def test_origin_normalization(self):
        assert global_parabolic_eval(3, 2.0, 0.0, 1.0) == pytest.approx(1.0, abs=1e-15)

    def test_p2_closed_form(self):
        for rn, t in ((0.7, 0.3), (1.4, 1.0)):
            expect = t ** (-1.0) * math.exp(-rn * rn / (2.0 * t))
            assert global_parabolic_eval(2, 2.0, rn, t) == pytest.approx(expect, rel=1e-13)

    def test_pde_residual(self):
        for N, p in ((2, 2.0), (3, 3.0), (2, INF)):
            res = radial_pde_residual(
                lambda r, t: global_parabolic_eval(N, p, r, t), N, p, 1.0, 0.5
            )
            assert abs(res) <= 1e-6

    def test_log_variant(self):
        assert log_global_parabolic_eval(3, 2.0, 1.0, 0.01) == pytest.approx(
            math.log(global_parabolic_eval(3, 2.0, 1.0, 0.01)), rel=1e-12
        )


class TestGlobalElliptic:
    def test_p_inf_closed_form(self):
        assert global_elliptic_eval(2, INF, 1.0, 1.0, QUAD) == pytest.approx(
            math.exp(-1.0), rel=1e-12
        )

    def test_exterior_is_normalized_ratio(self):
        num = global_elliptic_eval(3, 2.0, 1.7, 0.5, QUAD)
        den = global_elliptic_eval(3, 2.0, 1.0, 0.5, QUAD)
        ext = exterior_elliptic_eval(3, 2.0, 1.0, 0.5, 1.7, QUAD)
        assert num / den == pytest.approx(ext, rel=1e-9)

    def test_n3_p2_closed_form(self):
        # the theta-integral collapses to e^{-sigma}/sigma at this order
        for rn, eps in ((0.8, 0.4), (1.5, 0.25)):
            sigma = math.sqrt(2.0) * rn / eps
            assert global_elliptic_eval(3, 2.0, rn, eps, QUAD) == pytest.approx(
                math.exp(-sigma) / sigma, rel=1e-9
            )


class TestBallElliptic:
    def test_boundary_value(self):
        assert ball_elliptic_eval(2, 3.0, 1.0, 0.3, 1.0, QUAD) == pytest.approx(
            1.0, rel=1e-12
        )

    def test_p_inf_closed_form(self):
        assert ball_elliptic_eval(2, INF, 1.0, 1.0, 0.0, QUAD) == pytest.approx(
            1.0 / math.cosh(1.0), rel=1e-12
        )

    def test_n3_p2_closed_form(self):
        R, eps, r = 1.0, 0.5, 0.5
        expect = (R / r) * math.sinh(math.sqrt(2.0) * r / eps) / math.sinh(
            math.sqrt(2.0) * R / eps
        )
        assert ball_elliptic_eval(3, 2.0, R, eps, r, QUAD) == pytest.approx(
            expect, rel=1e-9
        )

    def test_radial_monotone_and_positive(self):
        rs = np.linspace(0.0, 1.0, 21)
        vals = [ball_elliptic_eval(2, 3.0, 1.0, 0.3, float(r), QUAD) for r in rs]
        assert all(v > 0.0 for v in vals)
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))

    def test_log_variant_survives_small_eps(self):
        val = log_ball_elliptic_eval(2, 2.0, 1.0, 1e-3, 0.2, QUAD)
        assert math.isfinite(val)
        # leading behavior -sqrt(p') d / eps
        assert val == pytest.approx(-math.sqrt(2.0) * 0.8 / 1e-3, rel=0.05)
        mid = log_ball_elliptic_eval(2, 2.0, 1.0, 0.4, 0.5, QUAD)
        assert mid == pytest.approx(
            math.log(ball_elliptic_eval(2, 2.0, 1.0, 0.4, 0.5, QUAD)), rel=1e-9
        )


class TestExteriorElliptic:
    def test_boundary_value(self):
        assert exterior_elliptic_eval(2, 3.0, 1.0, 0.3, 1.0, QUAD) == pytest.approx(
            1.0, rel=1e-12
        )

    def test_p_inf_closed_form(self):
        assert exterior_elliptic_eval(3, INF, 1.0, 0.5, 2.0, QUAD) == pytest.approx(
            math.exp(-2.0), rel=1e-12
        )

    def test_n3_p2_closed_form(self):
        R, eps = 1.0, 0.4
        for r in (1.3, 2.1):
            expect = (R / r) * math.exp(-math.sqrt(2.0) * (r - R) / eps)
            assert exterior_elliptic_eval(3, 2.0, R, eps, r, QUAD) == pytest.approx(
                expect, rel=1e-9
            )

    def test_decreasing_in_r(self):
        rs = np.linspace(1.0, 3.0, 15)
        vals = [exterior_elliptic_eval(2, 3.0, 1.0, 0.3, float(r), QUAD) for r in rs]
        assert all(b < a for a, b in zip(vals, vals[1:]))
        assert all(v <= 1.0 + 1e-12 for v in vals)

    def test_log_variant(self):
        assert log_exterior_elliptic_eval(3, 2.0, 1.0, 0.4, 1.5, QUAD) == pytest.approx(
            math.log(exterior_elliptic_eval(3, 2.0, 1.0, 0.4, 1.5, QUAD)), rel=1e-9
        )


class TestHalfSpace:
    def test_boundary_value(self):
        assert half_space_eval(2.0, 0.0, 0.5) == 1.0

    def test_matches_erfc(self):
        for p in (1.5, 2.0, INF):
            pc = 1.0 if math.isinf(p) else p / (p - 1.0)
            for x1, t in ((0.2, 0.05), (0.7, 0.3)):
                assert half_space_eval(p, x1, t) == pytest.approx(
                    oracles.halfspace_erfc(pc, x1, t), rel=1e-12
                )

    def test_rate_sign(self):
        # 4 t log u + p' x1^2 <= 0 everywhere
        for x1 in (0.1, 0.4, 1.0):
            for t in (1e-4, 1e-2, 0.5):
                resid = 4.0 * t * log_half_space_eval(2.0, x1, t) + 2.0 * x1 * x1
                assert resid <= 1e-12

    def test_residual_rate_exponent(self):
        ts = np.geomspace(1e-2, 1e-5, 7)
        lad = [
            (float(t), abs(4.0 * t * log_half_space_eval(2.0, 0.3, float(t)) + 2.0 * 0.09))
            for t in ts
        ]
        exponent, _, r2 = rate_fit(lad, "t*log(1/t)")
        assert 0.85 <= exponent <= 1.15
        assert r2 > 0.99


class TestSeriesSolution:
    def test_boundary_and_long_time(self, sol_n3_p2):
        assert ball_series_eval(sol_n3_p2, 1.0, 0.3) == pytest.approx(1.0, abs=1e-10)
        assert ball_series_eval(sol_n3_p2, 0.5, 50.0) == pytest.approx(1.0, abs=1e-10)

    def test_matches_sine_series_oracle(self, sol_n3_p2):
        for r, t in ((0.5, 0.1), (0.25, 0.05), (0.0, 0.2)):
            assert ball_series_eval(sol_n3_p2, r, t) == pytest.approx(
                oracles.heat_ball_p2_n3(r, t), abs=1e-8
            )

    def test_coefficient_identity(self, sol_n3_p2):
        assert coefficient_identity_value(sol_n3_p2, 0.5) == pytest.approx(1.0, abs=1e-6)

    def test_time_monotonicity(self, sol_n3_p2):
        ts = np.linspace(sol_n3_p2.t_min, 0.5, 12)
        vals = ball_series_profile(sol_n3_p2, 0.4, ts)
        assert np.all(np.diff(vals) >= -1e-9)

    def test_values_in_unit_interval(self, sol_n3_p2):
        radii = np.linspace(0.0, 1.0, 9)
        vals = ball_series_radial_table(sol_n3_p2, radii, 0.05)
        assert np.all(vals >= -1e-8)
        assert np.all(vals <= 1.0 + 1e-8)
        assert np.all(np.diff(vals) >= -1e-8)

    def test_truncation_guard(self, sol_n3_p2):
        with pytest.raises(TruncationError):
            ball_series_eval(sol_n3_p2, 0.5, sol_n3_p2.t_min / 50.0)

    def test_cosine_variant(self, sol_n2_pinf):
        # p = inf on the disk: order -1/2, zeros (2n-1) pi / 2
        assert sol_n2_pinf.alpha == -0.5
        assert sol_n2_pinf.zeros[0] == pytest.approx(math.pi / 2.0, abs=1e-10)
        val = ball_series_eval(sol_n2_pinf, 0.5, 0.2)
        assert 0.0 < val < 1.0

    def test_asymptotic_zero_build_agrees(self, sol_n3_p2):
        fast = build_series_solution(3, 2.0, 1.0, zero_method="asymptotic")
        for r, t in ((0.3, 0.05), (0.7, 0.2)):
            assert ball_series_eval(fast, r, t) == pytest.approx(
                ball_series_eval(sol_n3_p2, r, t), abs=1e-7
            )

    def test_initial_limit_interior(self, sol_n3_p2):
        assert ball_series_eval(sol_n3_p2, 0.4, sol_n3_p2.t_min) <= 1e-8


class TestLaplaceIdentity:
    def test_boundary_is_exact(self, sol_n3_p2):
        res = laplace_transform_check(3, 2.0, 1.0, 0.4, 1.0, QUAD, sol=sol_n3_p2)
        assert res <= 1e-9

    def test_single_points(self, sol_n3_p2, sol_n2_pinf):
        res = laplace_transform_check(3, 2.0, 1.0, 0.5, 0.5, QUAD, sol=sol_n3_p2)
        assert res <= 1e-6
        res = laplace_transform_check(2, INF, 1.0, 0.5, 0.0, QUAD, sol=sol_n2_pinf)
        assert res <= 1e-6

    def test_n2_p3_point(self):
        res = laplace_transform_check(2, 3.0, 1.0, 0.3, 0.5, QUAD)
        assert res <= 1e-6


class TestVaradhanConsistency:
    def test_halfspace_residual_through_asympt(self):
        from varadhan_lab import half_space_domain

        dom = half_space_domain(2)
        res = varadhan_parabolic_residual(
            lambda x, t: log_half_space_eval(2.0, x[0], t),
            dom,
            (0.3, 0.0),
            2.0,
            1e-3,
            log_values=True,
        )
        assert abs(res) < 0.05
        assert res <= 1e-12


class TestDensityExponent:
    def test_values(self):
        assert density_exponent(2.0, 3) == pytest.approx(1.0, abs=1e-15)
        assert density_exponent(INF, 3) == pytest.approx(-1.0, abs=1e-15)
        assert density_exponent(2.0, 2) == pytest.approx(0.0, abs=1e-15)
