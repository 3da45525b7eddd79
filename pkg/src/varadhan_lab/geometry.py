"""Domains, boundary geometry, and measure helpers.

A Domain is one of five kinds:

* ``ball``: the open ball of radius R about the origin in R^N,
* ``exterior_ball``: the complement of the closed ball,
* ``half_space``: {x : x_1 > 0},
* ``parametric2d``: a planar domain bounded by a smooth closed curve, given
  analytically (ellipse) or as a polyline,
* ``grid_mask``: a raw lattice mask, only enough geometry for the solver.

Boundary distance is exact for the symmetric kinds and is computed for
curves by dense point-to-segment minimization followed by a golden section
refinement of the curve parameter, so its accuracy is far below the polyline
resolution. Curvature sign convention: positive where the boundary bends
toward the domain interior (the disk seen from inside has curvature +1/R,
the same circle bounding an exterior domain has curvature -1/R).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import ConfigurationError, HypothesisViolation
from .special import DEFAULT_QUADRATURE, adaptive_quadrature, gamma_fn

__all__ = [
    "Domain",
    "BoundaryPoint",
    "ParallelSurface",
    "ball_domain",
    "exterior_ball_domain",
    "half_space_domain",
    "ellipse_domain",
    "polyline_domain",
    "grid_mask_domain",
    "curve_from_json",
    "distance_to_boundary",
    "distance_field",
    "distance_gradient",
    "point_in_domain",
    "nearest_boundary_point",
    "curvature_product",
    "parallel_surface",
    "cap_measure",
    "unit_sphere_area",
]

_KINDS = ("ball", "exterior_ball", "half_space", "parametric2d", "grid_mask")


# --------------------------------------------------------------------------
# curve backing for parametric2d


class _Curve:
    """Closed planar curve, either an exact ellipse or a polyline.

    The parameter runs counterclockwise over [0, 2 pi) for the ellipse and
    over vertex index for polylines. A dense sample cache supports distance
    queries; analytic tangent and curvature are used when available.
    """

    def __init__(self, kind, a=None, b=None, points=None, dense=4096):
        self.kind = kind
        if kind == "ellipse":
            if not (a > 0.0 and b > 0.0):
                raise ConfigurationError("ellipse semi-axes must be positive")
            self.a, self.b = float(a), float(b)
            theta = np.linspace(0.0, 2.0 * math.pi, dense, endpoint=False)
            self._dense_theta = theta
            self._dense_pts = np.stack(
                [self.a * np.cos(theta), self.b * np.sin(theta)], axis=1
            )
        elif kind == "polyline":
            pts = np.asarray(points, dtype=float)
            if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 4:
                raise ConfigurationError("polyline needs at least 4 planar points")
            if np.allclose(pts[0], pts[-1]):
                pts = pts[:-1]
            self._vertices = pts
            # arclength reparametrization onto a uniform dense grid
            closed = np.vstack([pts, pts[:1]])
            seg = np.linalg.norm(np.diff(closed, axis=0), axis=1)
            if np.any(seg == 0.0):
                raise ConfigurationError("polyline has repeated consecutive points")
            cum = np.concatenate([[0.0], np.cumsum(seg)])
            total = cum[-1]
            s_dense = np.linspace(0.0, total, dense, endpoint=False)
            x = np.interp(s_dense, cum, closed[:, 0])
            y = np.interp(s_dense, cum, closed[:, 1])
            self._dense_pts = np.stack([x, y], axis=1)
            self._dense_theta = s_dense
            self._total_len = total
        else:
            raise ConfigurationError("unknown curve kind %r" % (kind,))
        self._check_orientation_and_simple()

    # -- orientation, simplicity ------------------------------------------

    def _check_orientation_and_simple(self):
        pts = self._dense_pts
        x, y = pts[:, 0], pts[:, 1]
        area2 = float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))
        if area2 < 0:
            # flip to counterclockwise so the inward normal formula holds
            self._dense_pts = pts[::-1].copy()
            if self.kind == "polyline":
                self._vertices = self._vertices[::-1].copy()
        coarse = self._dense_pts[:: max(1, len(self._dense_pts) // 400)]
        if _polyline_self_intersects(coarse):
            raise ConfigurationError("boundary curve intersects itself")

    # -- local data --------------------------------------------------------

    def point(self, t):
        if self.kind == "ellipse":
            return np.array([self.a * math.cos(t), self.b * math.sin(t)])
        return self._interp_polyline(t)

    def _interp_polyline(self, s):
        pts = self._dense_pts
        th = self._dense_theta
        total = self._total_len
        s = s % total
        i = int(np.searchsorted(th, s, side="right")) - 1
        j = (i + 1) % len(pts)
        t0 = th[i]
        t1 = th[i + 1] if i + 1 < len(th) else total
        w = 0.0 if t1 == t0 else (s - t0) / (t1 - t0)
        return (1 - w) * pts[i] + w * pts[j]

    def speed(self, t):
        if self.kind == "ellipse":
            return math.hypot(self.a * math.sin(t), self.b * math.cos(t))
        return 1.0  # arclength parametrization

    def inward_normal(self, t):
        if self.kind == "ellipse":
            tx, ty = -self.a * math.sin(t), self.b * math.cos(t)
            n = math.hypot(tx, ty)
            return np.array([-ty / n, tx / n])
        # FD tangent on the dense arclength samples
        h = self._total_len / len(self._dense_pts)
        p0 = self._interp_polyline(t - h)
        p1 = self._interp_polyline(t + h)
        tx, ty = (p1 - p0) / (2 * h)
        n = math.hypot(tx, ty)
        return np.array([-ty / n, tx / n])

    def curvature(self, t):
        if self.kind == "ellipse":
            a, b = self.a, self.b
            return a * b / (a * a * math.sin(t) ** 2 + b * b * math.cos(t) ** 2) ** 1.5
        # 5 point finite differences on the arclength parametrization
        h = self._total_len / len(self._dense_pts) * 2.0
        pm2 = self._interp_polyline(t - 2 * h)
        pm1 = self._interp_polyline(t - h)
        pp1 = self._interp_polyline(t + h)
        pp2 = self._interp_polyline(t + 2 * h)
        d1 = (pm2 - 8 * pm1 + 8 * pp1 - pp2) / (12 * h)
        p0 = self._interp_polyline(t)
        d2 = (-pm2 + 16 * pm1 - 30 * p0 + 16 * pp1 - pp2) / (12 * h * h)
        sp = float(np.hypot(*d1))
        if sp == 0.0:
            return 0.0
        return float((d1[0] * d2[1] - d1[1] * d2[0]) / sp ** 3)

    @property
    def param_period(self):
        return 2.0 * math.pi if self.kind == "ellipse" else self._total_len


def _polyline_self_intersects(pts):
    # O(n^2) proper-crossing test on a coarse subsample; adjacent segments
    # share an endpoint and are skipped.
    n = len(pts)
    closed = np.vstack([pts, pts[:1]])
    a = closed[:-1]
    b = closed[1:]
    for i in range(n):
        p, r = a[i], b[i] - a[i]
        js = np.arange(n)
        keep = (js != i) & (js != (i - 1) % n) & (js != (i + 1) % n)
        q = a[keep]
        s = b[keep] - q
        denom = r[0] * s[:, 1] - r[1] * s[:, 0]
        with np.errstate(divide="ignore", invalid="ignore"):
            t = ((q[:, 0] - p[0]) * s[:, 1] - (q[:, 1] - p[1]) * s[:, 0]) / denom
            u = ((q[:, 0] - p[0]) * r[1] - (q[:, 1] - p[1]) * r[0]) / denom
        hit = (
            np.isfinite(t) & np.isfinite(u)
            & (t > 1e-12) & (t < 1 - 1e-12)
            & (u > 1e-12) & (u < 1 - 1e-12)
        )
        if np.any(hit):
            return True
    return False


# --------------------------------------------------------------------------
# domain type and constructors


@dataclass
class Domain:
    """A region of R^N with enough structure for boundary geometry queries."""

    kind: str
    N: int
    R: float = None
    curve: _Curve = dc_field(default=None, repr=False)
    mask: np.ndarray = dc_field(default=None, repr=False)
    mask_h: float = None
    mask_origin: tuple = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ConfigurationError("unknown domain kind %r" % (self.kind,))
        if not (isinstance(self.N, (int, np.integer)) and self.N >= 1):
            raise ConfigurationError("dimension N must be a positive integer")
        if self.kind in ("ball", "exterior_ball") and not (self.R and self.R > 0):
            raise ConfigurationError("ball domains need a positive radius")
        if self.kind == "parametric2d":
            if self.N != 2 or self.curve is None:
                raise ConfigurationError("parametric2d domains are planar and need a curve")
        if self.kind == "grid_mask" and (self.mask is None or not self.mask_h):
            raise ConfigurationError("grid_mask domains need mask and cell size")


def ball_domain(N, R) -> Domain:
    return Domain(kind="ball", N=int(N), R=float(R))


def exterior_ball_domain(N, R) -> Domain:
    return Domain(kind="exterior_ball", N=int(N), R=float(R))


def half_space_domain(N=2) -> Domain:
    return Domain(kind="half_space", N=int(N))


def ellipse_domain(a, b) -> Domain:
    return Domain(kind="parametric2d", N=2, curve=_Curve("ellipse", a=a, b=b))


def polyline_domain(points) -> Domain:
    return Domain(kind="parametric2d", N=2, curve=_Curve("polyline", points=points))


def grid_mask_domain(mask, h, origin=(0.0, 0.0)) -> Domain:
    mask = np.asarray(mask, dtype=bool)
    return Domain(kind="grid_mask", N=2, mask=mask, mask_h=float(h),
                  mask_origin=(float(origin[0]), float(origin[1])))


def curve_from_json(source) -> Domain:
    """Load a planar domain from a JSON description.

    Accepts a path, a JSON string, or a dict with either
    {"kind": "ellipse", "a": .., "b": ..} or
    {"kind": "polyline", "points": [[x, y], ...]}.
    """
    if isinstance(source, dict):
        data = source
    else:
        text = None
        try:
            with open(source, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError:
            text = str(source)
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigurationError("not a valid curve description: %s" % exc)
    kind = data.get("kind")
    if kind == "ellipse":
        return ellipse_domain(data["a"], data["b"])
    if kind == "polyline":
        return polyline_domain(data["points"])
    raise ConfigurationError("curve kind must be 'ellipse' or 'polyline'")


# --------------------------------------------------------------------------
# membership and distance


def point_in_domain(dom: Domain, x) -> bool:
    x = np.asarray(x, dtype=float)
    if dom.kind == "ball":
        return float(np.linalg.norm(x)) < dom.R
    if dom.kind == "exterior_ball":
        return float(np.linalg.norm(x)) > dom.R
    if dom.kind == "half_space":
        return x[0] > 0.0
    if dom.kind == "parametric2d":
        return bool(_inside_mask_points(dom.curve, x[None, :])[0])
    if dom.kind == "grid_mask":
        i = int(round((x[1] - dom.mask_origin[1]) / dom.mask_h))
        j = int(round((x[0] - dom.mask_origin[0]) / dom.mask_h))
        if 0 <= i < dom.mask.shape[0] and 0 <= j < dom.mask.shape[1]:
            return bool(dom.mask[i, j])
        return False
    raise ConfigurationError("unsupported domain kind")


def _inside_mask_points(curve: _Curve, pts) -> np.ndarray:
    # crossing number against the dense polyline, vectorized over pts
    poly = curve._dense_pts
    x0, y0 = poly[:, 0], poly[:, 1]
    x1, y1 = np.roll(x0, -1), np.roll(y0, -1)
    px = pts[:, 0][:, None]
    py = pts[:, 1][:, None]
    cond = (y0[None, :] > py) != (y1[None, :] > py)
    with np.errstate(divide="ignore", invalid="ignore"):
        xin = x0[None, :] + (py - y0[None, :]) / (y1 - y0)[None, :] * (x1 - x0)[None, :]
    crossing = cond & (px < xin)
    return np.sum(crossing, axis=1) % 2 == 1


def _segment_distance(pts, poly):
    # min distance from each point to the closed polyline, plus argmin vertex
    a = poly
    b = np.roll(poly, -1, axis=0)
    ab = b - a
    denom = np.einsum("ij,ij->i", ab, ab)
    best = np.full(len(pts), np.inf)
    best_idx = np.zeros(len(pts), dtype=int)
    chunk = max(1, int(4e6 // max(len(poly), 1)))
    for lo in range(0, len(pts), chunk):
        P = pts[lo:lo + chunk]
        ap = P[:, None, :] - a[None, :, :]
        t = np.einsum("pij,ij->pi", ap, ab) / denom[None, :]
        t = np.clip(t, 0.0, 1.0)
        proj = a[None, :, :] + t[:, :, None] * ab[None, :, :]
        d = np.linalg.norm(P[:, None, :] - proj, axis=2)
        idx = np.argmin(d, axis=1)
        best[lo:lo + chunk] = d[np.arange(len(P)), idx]
        best_idx[lo:lo + chunk] = idx
    return best, best_idx


def _refine_param(curve: _Curve, x, t_center, span) -> float:
    # golden section minimization of |x - c(t)|^2 on [t-span, t+span]
    gr = (math.sqrt(5.0) - 1.0) / 2.0
    lo, hi = t_center - span, t_center + span

    def val(t):
        p = curve.point(t)
        dx, dy = p[0] - x[0], p[1] - x[1]
        return dx * dx + dy * dy

    c = hi - gr * (hi - lo)
    d = lo + gr * (hi - lo)
    fc, fd = val(c), val(d)
    for _ in range(90):
        if hi - lo < 1e-13 * max(1.0, abs(t_center)):
            break
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - gr * (hi - lo)
            fc = val(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + gr * (hi - lo)
            fd = val(d)
    return 0.5 * (lo + hi)


def distance_to_boundary(dom: Domain, x) -> float:
    """Distance from x (in the closed domain) to the boundary.

    Exact for the symmetric kinds; for curves the dense-polyline minimum is
    refined by a golden section pass over the curve parameter. Raises
    ConfigurationError when x lies outside the closed domain.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (dom.N,):
        raise ConfigurationError("point dimension does not match the domain")
    if dom.kind == "ball":
        d = dom.R - float(np.linalg.norm(x))
        if d < -1e-12 * dom.R:
            raise ConfigurationError("point lies outside the closed ball")
        return max(d, 0.0)
    if dom.kind == "exterior_ball":
        d = float(np.linalg.norm(x)) - dom.R
        if d < -1e-12 * dom.R:
            raise ConfigurationError("point lies inside the excluded ball")
        return max(d, 0.0)
    if dom.kind == "half_space":
        if x[0] < 0.0:
            raise ConfigurationError("point lies outside the half space")
        return float(x[0])
    if dom.kind == "parametric2d":
        d, idx = _segment_distance(x[None, :], dom.curve._dense_pts)
        if dom.curve.kind == "ellipse":
            th = dom.curve._dense_theta
            span = 2.0 * (th[1] - th[0])
            t = _refine_param(dom.curve, x, th[idx[0]], span)
            p = dom.curve.point(t)
            d = np.array([math.hypot(x[0] - p[0], x[1] - p[1])])
        if d[0] > 1e-9 and not point_in_domain(dom, x):
            raise ConfigurationError("point lies outside the closed domain")
        return float(d[0])
    if dom.kind == "grid_mask":
        ys, xs = np.nonzero(_mask_boundary_cells(dom.mask))
        cx = dom.mask_origin[0] + xs * dom.mask_h
        cy = dom.mask_origin[1] + ys * dom.mask_h
        return float(np.min(np.hypot(cx - x[0], cy - x[1])))
    raise ConfigurationError("unsupported domain kind")


def _mask_boundary_cells(mask):
    inner = mask.copy()
    pad = np.pad(mask, 1, constant_values=False)
    nb = (
        pad[:-2, 1:-1] & pad[2:, 1:-1] & pad[1:-1, :-2] & pad[1:-1, 2:]
    )
    return mask & ~nb


def distance_field(dom: Domain, X, Y):
    """Vectorized (distance, inside) over planar coordinate arrays.

    Distance is unsigned distance to the boundary curve; inside is the
    domain membership mask. Only planar domains are supported.
    """
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if dom.kind == "ball":
        rr = np.hypot(X, Y)
        return np.abs(dom.R - rr), rr < dom.R
    if dom.kind == "exterior_ball":
        rr = np.hypot(X, Y)
        return np.abs(rr - dom.R), rr > dom.R
    if dom.kind == "half_space":
        return np.abs(X), X > 0.0
    if dom.kind == "parametric2d":
        pts = np.stack([X.ravel(), Y.ravel()], axis=1)
        d, _ = _segment_distance(pts, dom.curve._dense_pts)
        inside = _inside_mask_points(dom.curve, pts)
        return d.reshape(X.shape), inside.reshape(X.shape)
    raise ConfigurationError("distance_field supports planar analytic domains")


def distance_gradient(dom: Domain, x, h=1e-6) -> np.ndarray:
    """Central difference gradient of the boundary distance at x."""
    x = np.asarray(x, dtype=float)
    g = np.zeros_like(x)
    for i in range(len(x)):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (distance_to_boundary(dom, x + e) - distance_to_boundary(dom, x - e)) / (2 * h)
    return g


# --------------------------------------------------------------------------
# nearest boundary point and curvature


@dataclass
class BoundaryPoint:
    """Foot of the boundary projection with local geometry.

    curvatures lists the N-1 principal curvatures with the sign convention
    stated in the module docstring; is_unique records whether the nearest
    point was detected to be unique.
    """

    position: np.ndarray
    inward_normal: np.ndarray
    curvatures: list
    is_unique: bool = True


def nearest_boundary_point(dom: Domain, x) -> BoundaryPoint:
    x = np.asarray(x, dtype=float)
    if dom.kind == "ball":
        r = float(np.linalg.norm(x))
        if r == 0.0:
            pos = np.zeros(dom.N)
            pos[0] = dom.R
            return BoundaryPoint(pos, -pos / dom.R, [1.0 / dom.R] * (dom.N - 1), False)
        pos = x * (dom.R / r)
        return BoundaryPoint(pos, -pos / dom.R, [1.0 / dom.R] * (dom.N - 1), True)
    if dom.kind == "exterior_ball":
        r = float(np.linalg.norm(x))
        if r == 0.0:
            raise ConfigurationError("center is not in the closed exterior domain")
        pos = x * (dom.R / r)
        return BoundaryPoint(pos, pos / dom.R, [-1.0 / dom.R] * (dom.N - 1), True)
    if dom.kind == "half_space":
        pos = x.copy()
        pos[0] = 0.0
        normal = np.zeros(dom.N)
        normal[0] = 1.0
        return BoundaryPoint(pos, normal, [0.0] * (dom.N - 1), True)
    if dom.kind == "parametric2d":
        curve = dom.curve
        pts = curve._dense_pts
        d = np.linalg.norm(pts - x[None, :], axis=1)
        dmin = float(np.min(d))
        # non-uniqueness: another well separated local minimum at the same depth
        sep = len(pts) // 16
        idx = int(np.argmin(d))
        competing = d <= dmin * (1.0 + 1e-9) + 1e-12
        comp_idx = np.nonzero(competing)[0]
        spread = (comp_idx - idx) % len(pts)
        spread = np.minimum(spread, len(pts) - spread)
        unique = bool(np.all(spread < sep))
        th = curve._dense_theta
        span = 2.0 * (curve.param_period / len(pts))
        t = _refine_param(curve, x, th[idx], span)
        pos = curve.point(t)
        return BoundaryPoint(
            np.asarray(pos), curve.inward_normal(t), [curve.curvature(t)], unique
        )
    raise ConfigurationError("nearest_boundary_point supports analytic domains only")


def curvature_product(bp, R: float) -> float:
    """Product of (1 - R * kappa_j) over the principal curvatures at bp.

    Accepts a BoundaryPoint or a plain curvature list. Raises
    HypothesisViolation when some kappa_j >= 1/R, where the interior
    touching ball of radius R ceases to exist and the product loses its
    meaning.
    """
    if not (R > 0.0):
        raise ConfigurationError("radius R must be positive")
    curvatures = bp.curvatures if isinstance(bp, BoundaryPoint) else list(bp)
    prod = 1.0
    for kap in curvatures:
        if kap * R >= 1.0:
            raise HypothesisViolation(
                "curvature %.6g reaches 1/R; no interior touching ball of "
                "radius %.6g" % (kap, R),
                operation="curvature_product",
            )
        prod *= 1.0 - R * kap
    return prod


# --------------------------------------------------------------------------
# parallel surfaces


@dataclass
class ParallelSurface:
    """Sampled level set {d_Gamma = s} inside the domain."""

    level: float
    points: np.ndarray
    base_points: np.ndarray
    normals: np.ndarray


def parallel_surface(dom: Domain, s: float, n_samples: int = 512, seed: int = 0) -> ParallelSurface:
    """Sample the inner parallel surface at distance s.

    Samples are boundary points pushed inward along the normal; any sample
    whose recomputed boundary distance differs from s by more than twice the
    sampling tolerance is rejected (cut locus). An empty result raises
    ConfigurationError, which is what happens when s reaches the inradius.
    """
    if not (s > 0.0):
        raise ConfigurationError("level s must be positive")
    tol = 1e-7 * max(1.0, s)
    if dom.kind == "ball":
        if s >= dom.R:
            raise ConfigurationError("parallel surface is empty at s >= R")
        base = _sphere_points(dom.N, n_samples, seed) * dom.R
        pts = base * ((dom.R - s) / dom.R)
        normals = -base / dom.R
        return ParallelSurface(s, pts, base, normals)
    if dom.kind == "exterior_ball":
        base = _sphere_points(dom.N, n_samples, seed) * dom.R
        pts = base * ((dom.R + s) / dom.R)
        normals = base / dom.R
        return ParallelSurface(s, pts, base, normals)
    if dom.kind == "half_space":
        base = np.zeros((n_samples, dom.N))
        spread = np.linspace(-1.0, 1.0, n_samples)
        if dom.N >= 2:
            base[:, 1] = spread
        pts = base.copy()
        pts[:, 0] = s
        normals = np.zeros_like(base)
        normals[:, 0] = 1.0
        return ParallelSurface(s, pts, base, normals)
    if dom.kind == "parametric2d":
        curve = dom.curve
        period = curve.param_period
        ts = np.linspace(0.0, period, n_samples, endpoint=False)
        keep_pts, keep_base, keep_nrm = [], [], []
        for t in ts:
            base = np.asarray(curve.point(t))
            nrm = curve.inward_normal(t)
            y = base + s * nrm
            if not point_in_domain(dom, y):
                continue
            if abs(distance_to_boundary(dom, y) - s) > 2.0 * tol:
                continue
            keep_pts.append(y)
            keep_base.append(base)
            keep_nrm.append(nrm)
        if not keep_pts:
            raise ConfigurationError(
                "parallel surface at s = %g is empty (level beyond the inradius)" % s
            )
        return ParallelSurface(
            s, np.asarray(keep_pts), np.asarray(keep_base), np.asarray(keep_nrm)
        )
    raise ConfigurationError("parallel_surface supports analytic domains only")


def _sphere_points(N, n, seed):
    if N == 1:
        return np.array([[1.0], [-1.0]] * ((n + 1) // 2))[:n]
    if N == 2:
        th = np.linspace(0.0, 2 * math.pi, n, endpoint=False)
        return np.stack([np.cos(th), np.sin(th)], axis=1)
    if N == 3:
        # Fibonacci sphere, deterministic
        i = np.arange(n) + 0.5
        phi = math.pi * (3.0 - math.sqrt(5.0)) * i
        z = 1.0 - 2.0 * i / n
        r = np.sqrt(1.0 - z * z)
        return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)
    rng = np.random.default_rng(seed)
    v = rng.normal(size=(n, N))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


# --------------------------------------------------------------------------
# cap measure on parallel surfaces


def _circle_cap_length(r_cap: float, r_level: float, d_centers: float) -> float:
    # length of the arc of the circle of radius r_level (about the origin)
    # inside the disk of radius r_cap centered at distance d_centers
    if r_level <= 0.0:
        raise HypothesisViolation("parallel level beyond the inradius",
                                  operation="cap_measure")
    c = (d_centers * d_centers + r_level * r_level - r_cap * r_cap) / (
        2.0 * d_centers * r_level
    )
    if c >= 1.0:
        return 0.0
    if c <= -1.0:
        return 2.0 * math.pi * r_level
    return 2.0 * r_level * math.acos(c)


def cap_measure(dom: Domain, x, R: float, s: float,
                quad=DEFAULT_QUADRATURE) -> float:
    """Measure of the parallel surface {d = s} inside the ball B_R(x).

    Hypotheses: B_R(x) is contained in the closed domain and touches the
    boundary (distance_to_boundary(x) = R), and 0 < s < R. For planar curve
    domains the measure is computed by marching the parallel curve and
    integrating its speed between the circle crossings; disks, exteriors of
    disks and half spaces use closed forms.
    """
    x = np.asarray(x, dtype=float)
    if not (0.0 < s < R):
        raise ConfigurationError("cap level must satisfy 0 < s < R")
    d = distance_to_boundary(dom, x)
    if abs(d - R) > 1e-6 * max(1.0, R):
        raise HypothesisViolation(
            "B_R(x) must touch the boundary: distance %.9g vs R = %.9g" % (d, R),
            operation="cap_measure",
        )
    if dom.kind == "half_space":
        r_c = math.sqrt(s * (2.0 * R - s))
        if dom.N == 2:
            return 2.0 * r_c
        m = dom.N - 1
        return math.pi ** (m / 2.0) * r_c ** m / gamma_fn(m / 2.0 + 1.0)
    if dom.kind == "ball":
        if dom.N != 2:
            raise ConfigurationError("cap_measure on curved boundaries is planar only")
        return _circle_cap_length(R, dom.R - s, float(np.linalg.norm(x)))
    if dom.kind == "exterior_ball":
        if dom.N != 2:
            raise ConfigurationError("cap_measure on curved boundaries is planar only")
        return _circle_cap_length(R, dom.R + s, float(np.linalg.norm(x)))
    if dom.kind == "parametric2d":
        return _cap_measure_curve(dom, x, R, s, quad)
    raise ConfigurationError("cap_measure supports analytic domains only")


def _cap_measure_curve(dom: Domain, x, R: float, s: float, quad) -> float:
    curve = dom.curve
    period = curve.param_period
    m = 4096
    ts = np.linspace(0.0, period, m, endpoint=False)
    vals = np.empty(m)
    for i, t in enumerate(ts):
        y = np.asarray(curve.point(t)) + s * curve.inward_normal(t)
        vals[i] = math.hypot(y[0] - x[0], y[1] - x[1]) - R
    inside = vals < 0.0
    if not np.any(inside):
        return 0.0
    if np.all(inside):
        raise HypothesisViolation(
            "B_R(x) contains the whole parallel curve", operation="cap_measure"
        )
    # locate the two sign changes
    flips = np.nonzero(inside != np.roll(inside, -1))[0]
    if len(flips) != 2:
        raise HypothesisViolation(
            "expected one connected cap, found %d crossings" % len(flips),
            operation="cap_measure",
        )

    def level(t):
        y = np.asarray(curve.point(t)) + s * curve.inward_normal(t)
        return math.hypot(y[0] - x[0], y[1] - x[1]) - R

    cross = []
    for idx in flips:
        lo = ts[idx]
        hi = ts[(idx + 1) % m] if idx + 1 < m else period
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if level(mid) < 0.0:
                if vals[idx] < 0.0:
                    lo = mid
                else:
                    hi = mid
            else:
                if vals[idx] < 0.0:
                    hi = mid
                else:
                    lo = mid
        cross.append(0.5 * (lo + hi))
    t_in, t_out = cross
    # the window where the parallel point is inside starts at the flip from
    # outside to inside
    if vals[flips[0]] < 0.0:
        t_in, t_out = cross[1], cross[0] + period if cross[0] < cross[1] else cross[0]
    if t_out < t_in:
        t_out += period

    def speed(t):
        kap = curve.curvature(t)
        fac = 1.0 - s * kap
        if fac <= 0.0:
            raise HypothesisViolation(
                "parallel curve degenerates inside the cap (s beyond focal distance)",
                operation="cap_measure",
            )
        return curve.speed(t) * fac

    return adaptive_quadrature(speed, t_in, t_out, quad)


def unit_sphere_area(m: int) -> float:
    """Measure of the unit sphere in R^m, i.e. of S^(m-1): 2 pi^(m/2)/Gamma(m/2).

    m = 1 gives 2, the counting measure of the two point sphere.
    """
    if not (isinstance(m, (int, np.integer)) and m >= 1):
        raise ConfigurationError("unit_sphere_area needs an integer m >= 1")
    return 2.0 * math.pi ** (m / 2.0) / gamma_fn(m / 2.0)
