"""q-means, their limit constants, and the surface constancy probes."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

import oracles
from varadhan_lab import (
    ConfigurationError,
    HypothesisViolation,
    QMeanLimitConstants,
    QMeanQuery,
    ball_domain,
    ball_lattice,
    barrier_q_mean_limit,
    ellipse_domain,
    elliptic_limit_constant,
    empirical_q_mean_limit,
    erfc_fn,
    half_space_domain,
    limit_constants,
    parabolic_limit_constant,
    q_mean,
    q_mean_translation_scale_check,
    surface_constancy,
    surface_q_means,
)

INF = math.inf


class TestQMean:
    def test_q2_is_weighted_mean(self):
        rng = np.random.default_rng(0)
        v = rng.normal(size=200)
        w = rng.uniform(0.5, 2.0, size=200)
        assert q_mean(v, 2.0, weights=w) == pytest.approx(
            float(np.sum(w * v) / np.sum(w)), abs=1e-9
        )

    def test_q_inf_is_midrange(self):
        v = np.array([0.1, 0.25, 0.9, 0.3])
        assert q_mean(v, INF) == pytest.approx(0.5, abs=1e-15)

    def test_two_level_function(self):
        v = np.array([0.0] * 50 + [1.0] * 50)
        for q in (1.5, 2.0, 3.0, 7.0, INF):
            assert q_mean(v, q) == pytest.approx(0.5, abs=1e-11)

    def test_constant_input(self):
        v = np.full(17, 0.42)
        for q in (1.5, INF):
            assert q_mean(v, q) == 0.42

    def test_against_independent_root_finder(self):
        rng = np.random.default_rng(5)
        v = rng.uniform(-1.0, 3.0, size=300)
        w = rng.uniform(0.1, 1.0, size=300)
        for q in (1.3, 2.5, 4.0):
            assert q_mean(v, q, weights=w) == pytest.approx(
                oracles.q_mean_brentq(v, q, weights=w), abs=1e-9
            )

    def test_q_must_exceed_one(self):
        with pytest.raises(ConfigurationError):
            q_mean(np.array([1.0, 2.0]), 1.0)

    @given(
        arrays(np.float64, 25, elements=st.floats(-5.0, 5.0)),
        arrays(np.float64, 25, elements=st.floats(0.0, 2.0)),
        st.sampled_from([1.5, 2.0, 3.0, INF]),
    )
    @settings(max_examples=80, deadline=None)
    def test_monotone_in_samples(self, v, bump, q):
        lo = q_mean(v, q)
        hi = q_mean(v + bump, q)
        assert hi >= lo - 1e-9

    def test_sandwich_transfer(self):
        rng = np.random.default_rng(11)
        v = rng.uniform(0.0, 1.0, size=120)
        lower, upper = np.clip(v - 0.07, 0.0, 1.0), np.clip(v + 0.07, 0.0, 1.0)
        for q in (1.5, 3.0, INF):
            assert q_mean(lower, q) - 1e-12 <= q_mean(v, q) <= q_mean(upper, q) + 1e-12


class TestAffineEquivariance:
    def test_identity_and_constant(self):
        v = np.linspace(0.0, 1.0, 40)
        assert q_mean_translation_scale_check(v, 3.0, 1.0, 0.0) == (0.0, 0.0)
        c = np.full(9, 0.7)
        res = q_mean_translation_scale_check(c, 2.5, 2.0, -0.3)
        assert max(res) <= 1e-12

    def test_random_field(self):
        rng = np.random.default_rng(2)
        v = rng.normal(size=150)
        for q in (1.7, 2.0, 5.0, INF):
            res = q_mean_translation_scale_check(v, q, 2.0, -0.3)
            assert max(res) <= 1e-10


class TestBallLattice:
    def test_linear_functions_exact(self):
        pts, w = ball_lattice((0.3, -0.2), 0.5, 60, 120)
        assert float(np.sum(w)) == pytest.approx(math.pi * 0.25, rel=1e-12)
        for coeff in ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (2.0, -1.0, 0.5)):
            a, b, c = coeff
            vals = a * pts[:, 0] + b * pts[:, 1] + c
            mean = float(np.sum(w * vals) / np.sum(w))
            exact = a * 0.3 + b * (-0.2) + c
            assert mean == pytest.approx(exact, abs=1e-6)

    def test_query_wrapper(self):
        query = QMeanQuery(q=2.0, center=(0.1, 0.2), R=0.3, resolution=24)
        pts, w = query.lattice()
        assert pts.shape[1] == 2
        assert np.all(np.hypot(pts[:, 0] - 0.1, pts[:, 1] - 0.2) <= 0.3)
        with pytest.raises(ConfigurationError):
            QMeanQuery(q=1.0, center=(0.0, 0.0), R=0.3)
        with pytest.raises(ConfigurationError):
            QMeanQuery(q=2.0, center=(0.0, 0.0), R=-1.0)


class TestLimitConstants:
    def test_parabolic_against_reference(self):
        for N, p, q in ((2, 2.0, 2.0), (2, 3.0, 2.0), (3, 2.0, 3.0)):
            assert parabolic_limit_constant(N, p, q) == pytest.approx(
                oracles.parabolic_constant_ref(N, p, q), rel=1e-8
            )

    def test_elliptic_closed_form_example(self):
        # (N, p, q) = (2, 2, 2): 2^{-3/2} * 2 / Gamma(3/2) * 2^{-3/4}
        expect = 2.0 ** (-1.5) * 2.0 / math.gamma(1.5) * 2.0 ** (-0.75)
        assert elliptic_limit_constant(2, 2.0, 2.0) == pytest.approx(expect, rel=1e-14)
        assert elliptic_limit_constant(2, 2.0, 2.0) == pytest.approx(
            0.47442499832879403, rel=1e-12
        )

    def test_elliptic_against_reference(self):
        for N, p, q in ((2, 1.5, 2.0), (3, 4.0, 2.5)):
            assert elliptic_limit_constant(N, p, q) == pytest.approx(
                oracles.elliptic_constant_ref(N, p, q), rel=1e-12
            )

    def test_p_dependence_ratio(self):
        # the constant at p = inf exceeds the one at p = 2 by
        # 2^{(N+1)/(4(q-1))} since only p' enters
        for N, q in ((2, 2.0), (3, 3.0)):
            factor = 2.0 ** ((N + 1.0) / (4.0 * (q - 1.0)))
            assert parabolic_limit_constant(N, INF, q) == pytest.approx(
                parabolic_limit_constant(N, 2.0, q) * factor, rel=1e-10
            )
            assert elliptic_limit_constant(N, INF, q) == pytest.approx(
                elliptic_limit_constant(N, 2.0, q) * factor, rel=1e-12
            )

    def test_q_inf_excluded(self):
        with pytest.raises(ConfigurationError):
            parabolic_limit_constant(2, 2.0, INF)
        with pytest.raises(ConfigurationError):
            elliptic_limit_constant(2, 2.0, INF)

    def test_bundle(self):
        c = limit_constants(2, 3.0, 2.0)
        assert isinstance(c, QMeanLimitConstants)
        assert c.parabolic_C > 0.0
        assert c.elliptic_C > 0.0
        assert c.parabolic_C == pytest.approx(parabolic_limit_constant(2, 3.0, 2.0))


class TestBarrierQMeanLimit:
    def test_elliptic_kernel_reproduces_constant(self):
        # f = exp(-sigma) at scale xi = eps / sqrt(p') recovers the
        # elliptic constant; the Pi and p' factors are explicit
        for N, p, q in ((2, 2.0, 2.0), (2, 3.0, 2.0), (3, 2.0, 3.0), (2, INF, 2.0)):
            pc = 1.0 if math.isinf(p) else p / (p - 1.0)
            for Pi in (1.0, 0.5):
                val = barrier_q_mean_limit(lambda s: np.exp(-s), N, q, 0.7, Pi)
                expect = (
                    elliptic_limit_constant(N, p, q)
                    * Pi ** (-1.0 / (2.0 * (q - 1.0)))
                    * pc ** ((N + 1.0) / (4.0 * (q - 1.0)))
                )
                assert val == pytest.approx(expect, rel=1e-8)

    def test_parabolic_kernel_reproduces_constant(self):
        # f = Erfc at scale xi = sqrt(4 t / p') recovers the parabolic
        # constant with the inverse p' factor
        for N, p, q in ((2, 2.0, 2.0), (3, 2.0, 3.0), (2, INF, 2.0)):
            pc = 1.0 if math.isinf(p) else p / (p - 1.0)
            val = barrier_q_mean_limit(erfc_fn, N, q, 0.7, 0.5)
            expect = (
                parabolic_limit_constant(N, p, q)
                * 0.5 ** (-1.0 / (2.0 * (q - 1.0)))
                * (pc / 4.0) ** ((N + 1.0) / (4.0 * (q - 1.0)))
            )
            assert val == pytest.approx(expect, rel=1e-8)

    def test_direct_gamma_arithmetic(self):
        # Pi = 1, f = exp(-sigma), N = 2, q = 2: the moment is Gamma(3/2)
        val = barrier_q_mean_limit(lambda s: np.exp(-s), 2, 2.0, 1.0, 1.0)
        expect = 2.0 ** (-1.5) * 2.0 * math.gamma(1.5) / math.gamma(1.5) ** 2
        assert val == pytest.approx(expect, rel=1e-9)

    def test_r_independence(self):
        a = barrier_q_mean_limit(lambda s: np.exp(-s), 2, 2.0, 0.25, 1.0)
        b = barrier_q_mean_limit(lambda s: np.exp(-s), 2, 2.0, 1.5, 1.0)
        assert a == pytest.approx(b, rel=1e-12)

    def test_moment_against_quadrature_oracle(self):
        mine = barrier_q_mean_limit(lambda s: np.exp(-2.0 * s), 2, 3.0, 1.0, 1.0)
        moment = oracles.kernel_moment_quad(lambda s: np.exp(-2.0 * s), 2, 3.0)
        expect = (
            2.0 ** (-1.5) * 2.0 * moment / math.gamma(1.5) ** 2
        ) ** (1.0 / 2.0)
        assert mine == pytest.approx(expect, rel=1e-8)

    def test_divergent_kernel_rejected(self):
        with pytest.raises(HypothesisViolation):
            barrier_q_mean_limit(
                lambda s: np.ones_like(np.asarray(s, dtype=float)), 2, 2.0, 1.0, 1.0
            )

    def test_increasing_kernel_rejected(self):
        with pytest.raises(HypothesisViolation):
            barrier_q_mean_limit(lambda s: np.asarray(s, dtype=float), 2, 2.0, 1.0, 1.0)

    def test_invalid_geometry_rejected(self):
        with pytest.raises(ConfigurationError):
            barrier_q_mean_limit(lambda s: np.exp(-s), 2, 2.0, -1.0, 1.0)
        with pytest.raises(ConfigurationError):
            barrier_q_mean_limit(lambda s: np.exp(-s), 2, 2.0, 1.0, 0.0)


class TestEmpiricalLimit:
    def test_half_space_parabolic_within_5_percent(self):
        dom = half_space_domain(2)
        ladder = np.geomspace(1e-1, 1e-5, 9)
        rep = empirical_q_mean_limit(dom, (0.25, 0.0), 0.25, 2.0, 2.0, ladder)
        assert rep.prediction == pytest.approx(parabolic_limit_constant(2, 2.0, 2.0))
        assert rep.relative_gap <= 0.05

    def test_half_space_elliptic(self):
        dom = half_space_domain(2)
        ladder = np.geomspace(0.3, 0.003, 7)
        rep = empirical_q_mean_limit(
            dom, (0.25, 0.0), 0.25, 2.0, 2.0, ladder, mode="elliptic"
        )
        assert rep.relative_gap <= 0.05

    def test_disk_parabolic_sandwich(self):
        dom = ball_domain(2, 1.0)
        ladder = np.geomspace(1e-1, 1e-5, 9)
        rep = empirical_q_mean_limit(dom, (0.5, 0.0), 0.5, 2.0, 2.0, ladder)
        lower = np.asarray(rep.extra["scaled_lower"])
        upper = np.asarray(rep.extra["scaled_upper"])
        assert np.all(lower <= upper + 1e-12)
        assert abs(lower[-1] - rep.prediction) / rep.prediction <= 0.10
        assert abs(upper[-1] - rep.prediction) / rep.prediction <= 0.10

    def test_q_inf_midrange(self):
        dom = half_space_domain(2)
        ladder = np.geomspace(1e-2, 1e-4, 5)
        rep = empirical_q_mean_limit(dom, (0.25, 0.0), 0.25, 2.0, INF, ladder)
        assert rep.prediction == 0.5
        assert abs(rep.scaled_values[-1] - 0.5) <= 0.01
        assert "midrange" in rep.extra.get("note", "")

    def test_touching_hypothesis_enforced(self):
        dom = ball_domain(2, 1.0)
        with pytest.raises(HypothesisViolation):
            empirical_q_mean_limit(
                dom, (0.1, 0.0), 0.5, 2.0, 2.0, np.geomspace(1e-2, 1e-4, 5)
            )

    def test_report_serialization_keys(self):
        dom = half_space_domain(2)
        rep = empirical_q_mean_limit(
            dom, (0.25, 0.0), 0.25, 2.0, 2.0, np.geomspace(1e-2, 1e-4, 5)
        )
        payload = rep.to_json_dict()
        for key in ("ladder", "scaled_values", "prediction", "relative_gap"):
            assert key in payload


class TestSurfaceConstancy:
    def test_disk_spread_small_and_ellipse_larger(self):
        # matched coarse resolution keeps this a module-level smoke check;
        # the acceptance suite runs the full-size comparison
        disk = ball_domain(2, 1.0)
        ell = ellipse_domain(2.0, 1.0)
        spread_disk = surface_constancy(disk, 0.2, 2.0, 2.0, 0.02, n_samples=8)
        spread_ell = surface_constancy(ell, 0.2, 2.0, 2.0, 0.02, n_samples=8)
        assert spread_disk >= 0.0
        assert spread_ell > spread_disk

    def test_sample_points_sit_on_parallel_surface(self):
        dom = ellipse_domain(2.0, 1.0)
        centers, mus = surface_q_means(dom, 0.25, 2.0, 2.0, 0.02, n_samples=6)
        assert len(centers) == len(mus) == 6
        from varadhan_lab import distance_to_boundary

        for c in centers:
            assert distance_to_boundary(dom, c) == pytest.approx(0.25, abs=1e-3)
