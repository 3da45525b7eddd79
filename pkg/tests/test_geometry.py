"""Domains, distances, curvature, parallel surfaces, cap measures."""

import json
import math

import numpy as np
import pytest

import oracles
from varadhan_lab import (
    ConfigurationError,
    HypothesisViolation,
    ball_domain,
    cap_measure,
    curvature_product,
    curve_from_json,
    distance_gradient,
    distance_to_boundary,
    ellipse_domain,
    exterior_ball_domain,
    half_space_domain,
    nearest_boundary_point,
    parallel_surface,
    point_in_domain,
    polyline_domain,
    unit_sphere_area,
)


class TestDistance:
    def test_ball(self):
        dom = ball_domain(2, 1.0)
        assert distance_to_boundary(dom, (0.4, 0.0)) == pytest.approx(0.6, abs=1e-12)
        assert distance_to_boundary(dom, (0.0, 0.0)) == pytest.approx(1.0, abs=1e-12)

    def test_half_space(self):
        dom = half_space_domain(2)
        assert distance_to_boundary(dom, (0.3, 17.0)) == pytest.approx(0.3, abs=1e-12)

    def test_exterior_ball(self):
        dom = exterior_ball_domain(2, 1.0)
        assert distance_to_boundary(dom, (2.5, 0.0)) == pytest.approx(1.5, abs=1e-12)

    def test_ellipse_center_vs_brute_force(self):
        dom = ellipse_domain(2.0, 1.0)
        brute = oracles.ellipse_distance_brute(2.0, 1.0, (0.0, 0.0))
        assert distance_to_boundary(dom, (0.0, 0.0)) == pytest.approx(brute, abs=1e-6)
        assert distance_to_boundary(dom, (0.0, 0.0)) == pytest.approx(1.0, abs=1e-9)

    def test_ellipse_generic_point_vs_brute_force(self):
        dom = ellipse_domain(2.0, 1.0)
        for x in ((1.2, 0.3), (-0.5, -0.6), (1.9, 0.0)):
            brute = oracles.ellipse_distance_brute(2.0, 1.0, x, n_samples=400_000)
            assert distance_to_boundary(dom, x) == pytest.approx(brute, abs=1e-6)

    def test_membership(self):
        dom = ellipse_domain(2.0, 1.0)
        assert point_in_domain(dom, (1.5, 0.2))
        assert not point_in_domain(dom, (2.5, 0.0))


class TestNearestBoundaryPoint:
    def test_ball(self):
        dom = ball_domain(2, 1.0)
        bp = nearest_boundary_point(dom, (0.5, 0.0))
        assert bp.position == pytest.approx([1.0, 0.0], abs=1e-12)
        assert bp.curvatures[0] == pytest.approx(1.0, abs=1e-12)
        assert bp.is_unique

    def test_disk_center_not_unique(self):
        dom = ball_domain(2, 1.0)
        bp = nearest_boundary_point(dom, (0.0, 0.0))
        assert not bp.is_unique

    def test_ellipse_vertex_curvature(self):
        dom = ellipse_domain(2.0, 1.0)
        bp = nearest_boundary_point(dom, (1.0, 0.0))
        assert bp.position == pytest.approx([2.0, 0.0], abs=1e-9)
        assert bp.curvatures[0] == pytest.approx(
            oracles.ellipse_curvature(2.0, 1.0, 0.0), rel=1e-9
        )
        assert bp.curvatures[0] == pytest.approx(2.0, rel=1e-9)

    def test_inward_normal_is_unit(self):
        dom = ellipse_domain(2.0, 1.0)
        bp = nearest_boundary_point(dom, (0.3, 0.4))
        assert np.linalg.norm(bp.inward_normal) == pytest.approx(1.0, abs=1e-12)


class TestCurvatureProduct:
    def test_circle(self):
        dom = ball_domain(2, 2.0)
        bp = nearest_boundary_point(dom, (1.5, 0.0))
        assert curvature_product(bp, 0.5) == pytest.approx(1.0 - 0.5 / 2.0, rel=1e-12)

    def test_half_space(self):
        dom = half_space_domain(2)
        bp = nearest_boundary_point(dom, (0.4, 0.0))
        assert curvature_product(bp, 0.4) == pytest.approx(1.0, abs=1e-12)

    def test_ellipse_vertex(self):
        dom = ellipse_domain(2.0, 1.0)
        bp = nearest_boundary_point(dom, (1.5, 0.0))
        assert curvature_product(bp, 0.25) == pytest.approx(0.5, rel=1e-9)

    def test_hypothesis_violation(self):
        dom = ball_domain(2, 1.0)
        bp = nearest_boundary_point(dom, (0.5, 0.0))
        with pytest.raises(HypothesisViolation):
            curvature_product(bp, 1.0)


class TestParallelSurface:
    def test_ball(self):
        dom = ball_domain(2, 1.0)
        surf = parallel_surface(dom, 0.3, n_samples=64)
        radii = np.linalg.norm(surf.points, axis=1)
        assert np.max(np.abs(radii - 0.7)) <= 1e-9

    def test_half_space(self):
        dom = half_space_domain(2)
        surf = parallel_surface(dom, 0.3, n_samples=32)
        assert np.max(np.abs(surf.points[:, 0] - 0.3)) <= 1e-9

    def test_ellipse_distances_reverify(self):
        dom = ellipse_domain(2.0, 1.0)
        surf = parallel_surface(dom, 0.2, n_samples=128)
        for pt in surf.points:
            assert distance_to_boundary(dom, pt) == pytest.approx(0.2, abs=1e-3)

    def test_beyond_inradius(self):
        dom = ball_domain(2, 1.0)
        with pytest.raises(ConfigurationError):
            parallel_surface(dom, 1.2, n_samples=16)


class TestCapMeasure:
    def test_half_space_chord(self):
        dom = half_space_domain(2)
        R = 0.4
        for s in (0.01, 0.1, 0.3):
            assert cap_measure(dom, (R, 0.0), R, s) == pytest.approx(
                oracles.halfspace_cap_length(R, s), rel=1e-10
            )

    def test_disk_closed_form(self):
        rho, R = 1.0, 0.4
        dom = ball_domain(2, rho)
        x = (rho - R, 0.0)
        for s in (0.01, 0.05, 0.2):
            assert cap_measure(dom, x, R, s) == pytest.approx(
                oracles.circle_cap_arc(rho, R, s), rel=1e-10
            )

    def test_touching_precondition(self):
        dom = ball_domain(2, 1.0)
        with pytest.raises(HypothesisViolation):
            cap_measure(dom, (0.1, 0.0), 0.4, 0.05)

    def test_scaled_ratio_converges_monotonically(self):
        # the scaled arc length approaches its geometric limit from one side
        rho, R = 1.0, 0.4
        dom = ball_domain(2, rho)
        x = (rho - R, 0.0)
        Pi = 1.0 - R / rho
        limit = unit_sphere_area(1) * math.sqrt(2.0 * R) / math.sqrt(Pi)
        svals = [1e-2 / 2**k for k in range(5)]
        gaps = []
        for s in svals:
            ratio = cap_measure(dom, x, R, s) / math.sqrt(s)
            gaps.append(abs(ratio - limit))
        assert all(b < a for a, b in zip(gaps, gaps[1:]))

    def test_ellipse_marching_vs_disk_scale(self):
        dom = ellipse_domain(2.0, 1.0)
        R = 0.2
        x = (2.0 - R, 0.0)
        bp = nearest_boundary_point(dom, (1.5, 0.0))
        Pi = curvature_product(bp, R)
        limit = unit_sphere_area(1) * math.sqrt(2.0 * R) / math.sqrt(Pi)
        ratio = cap_measure(dom, x, R, 1e-3) / math.sqrt(1e-3)
        assert ratio == pytest.approx(limit, rel=0.05)


class TestUnitSphereArea:
    def test_values(self):
        assert unit_sphere_area(2) == pytest.approx(2.0 * math.pi, rel=1e-12)
        assert unit_sphere_area(3) == pytest.approx(4.0 * math.pi, rel=1e-12)
        assert unit_sphere_area(1) == pytest.approx(2.0, abs=1e-12)


class TestEikonal:
    @pytest.mark.parametrize(
        "dom_builder",
        [lambda: ball_domain(2, 1.0), lambda: ellipse_domain(2.0, 1.0)],
        ids=["disk", "ellipse"],
    )
    def test_gradient_magnitude(self, dom_builder):
        dom = dom_builder()
        rng = np.random.default_rng(7)
        checked = 0
        while checked < 100:
            x = rng.uniform(-2.0, 2.0, size=2)
            if not point_in_domain(dom, x):
                continue
            d = distance_to_boundary(dom, x)
            # stay near the boundary, clear of the medial axis
            if not (0.05 < d < 0.35):
                continue
            g = np.linalg.norm(distance_gradient(dom, x))
            assert 0.99 <= g <= 1.01
            checked += 1


class TestOffsetConsistency:
    def test_normal_offsets(self):
        dom = ellipse_domain(2.0, 1.0)
        surf = parallel_surface(dom, 0.15, n_samples=64)
        # points were built as base - s * inward normal flipped; re-derive
        for base, nrm in zip(surf.base_points, surf.normals):
            y = base + 0.15 * nrm
            assert distance_to_boundary(dom, y) == pytest.approx(0.15, abs=1e-6)


class TestCurveLoading:
    def test_ellipse_json(self, tmp_path):
        path = tmp_path / "curve.json"
        path.write_text(json.dumps({"kind": "ellipse", "a": 2.0, "b": 1.0}))
        dom = curve_from_json(str(path))
        assert distance_to_boundary(dom, (0.0, 0.0)) == pytest.approx(1.0, abs=1e-9)

    def test_dict_and_string(self):
        dom = curve_from_json({"kind": "ellipse", "a": 1.0, "b": 1.0})
        assert distance_to_boundary(dom, (0.0, 0.0)) == pytest.approx(1.0, abs=1e-9)
        dom2 = curve_from_json('{"kind": "polyline", "points": '
                               + json.dumps(_circle_points(1.0, 512))
                               + "}")
        assert distance_to_boundary(dom2, (0.0, 0.0)) == pytest.approx(1.0, abs=1e-4)

    def test_bad_payload(self):
        with pytest.raises(ConfigurationError):
            curve_from_json({"kind": "hexagon"})


def _circle_points(rho, n):
    return [
        [rho * math.cos(2.0 * math.pi * k / n), rho * math.sin(2.0 * math.pi * k / n)]
        for k in range(n)
    ]


class TestPolylineCurvature:
    def test_circle_curvature_recovered(self):
        # resolution 1e-4 arc spacing on the unit circle
        n = int(round(2.0 * math.pi / 1e-4))
        dom = polyline_domain(_circle_points(1.0, n))
        bp = nearest_boundary_point(dom, (0.5, 0.0))
        assert bp.curvatures[0] == pytest.approx(1.0, abs=1e-4)

    def test_self_intersection_rejected(self):
        bowtie = [[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]]
        with pytest.raises(ConfigurationError):
            polyline_domain(bowtie)
