"""Near-boundary asymptotics: residuals, barrier functions, rate fitting.

The module quantifies how fast heat and resolvent profiles concentrate
near the boundary. Its three layers:

* barrier functions: closed-form or single-quadrature envelopes that
  bound the solution from below and above using only the distance to the
  boundary and the one-sided ball radii of the domain;
* residuals: the combinations 4t log u + p'd^2 (heat) and
  eps log u + sqrt(p') d (resolvent) that the barriers squeeze to zero,
  together with assertable two-sided bounds;
* rate fitting: least-squares estimation of the decay exponent of a
  residual ladder against a named model curve, including the
  modulus-of-continuity models that involve the graph distance psi.

Everything is computed in log-space first. The profiles underflow at
exactly the parameter sizes where the asymptotics become informative, so
each barrier exposes a log variant and the plain variants are thin
exponentials around them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from .errors import ConfigurationError, NumericalFailure
from .geometry import distance_to_boundary
from .radial import density_exponent
from .special import (
    DEFAULT_QUADRATURE,
    QuadratureSpec,
    as_p_exponent,
    erfc_ln,
    inv_erfc,
    log_asym_f,
    log_asym_g,
)

__all__ = [
    "ModulusSpec",
    "AsymptoticsReport",
    "BarrierSet",
    "RATE_MODELS",
    "barrier_E_minus",
    "log_barrier_E_minus",
    "barrier_E_plus",
    "log_barrier_E_plus",
    "barrier_e_pz",
    "log_barrier_e_pz",
    "barrier_E_p_eps",
    "log_barrier_E_p_eps",
    "barriers_c2",
    "log_barriers_c2",
    "psi_omega",
    "varadhan_parabolic_residual",
    "parabolic_residual_bounds",
    "varadhan_elliptic_residual",
    "elliptic_residual_bounds",
    "enhanced_v",
    "enhanced_v_values",
    "rate_fit",
    "select_rate_model",
    "asymptotics_report",
    "parabolic_threshold_probe",
]


# --------------------------------------------------------------------------
# boundary modulus and the graph distance psi


@dataclass(frozen=True)
class ModulusSpec:
    """Modulus of continuity omega on [0, r] describing boundary roughness.

    omega must be continuous, strictly increasing and vanish at 0+. The
    constructor runs a sampled check of those properties; it cannot prove
    them, but it rejects the common mistakes (decreasing handles, negative
    values, omega(0+) bounded away from zero).
    """

    omega: Callable[[float], float]
    r: float

    def __post_init__(self):
        if not callable(self.omega):
            raise ConfigurationError("omega must be callable")
        if not (self.r > 0.0):
            raise ConfigurationError("modulus reach r must be positive")
        samples = self.r * np.geomspace(1e-9, 1.0, 16)
        vals = np.array([float(self.omega(float(s))) for s in samples])
        if not np.all(np.isfinite(vals)):
            raise ConfigurationError("omega produced non-finite values")
        if np.any(vals < 0.0):
            raise ConfigurationError("omega must be nonnegative")
        if np.any(np.diff(vals) <= 0.0):
            raise ConfigurationError("omega must be strictly increasing (sampled)")
        if vals[0] > 0.5 * vals[-1]:
            raise ConfigurationError("omega does not appear to vanish at 0+")


def psi_omega(spec: ModulusSpec, sigma: float) -> float:
    """Distance from the point (0', sigma) to the graph of omega.

    psi(sigma) = min over s in [0, r] of sqrt(s^2 + (omega(s) - sigma)^2).
    A scan over a mixed uniform/geometric grid brackets the minimizer and
    golden-section search refines the bracket. The s = 0 endpoint uses the
    limit omega(0+) = 0, so psi(0) = 0 exactly.
    """
    if not (sigma >= 0.0):
        raise ConfigurationError("sigma must be nonnegative")
    if sigma == 0.0:
        return 0.0

    def h(s: float) -> float:
        w = 0.0 if s == 0.0 else float(spec.omega(s))
        return s * s + (w - sigma) ** 2

    grid = np.unique(
        np.concatenate(
            [
                np.array([0.0]),
                np.linspace(0.0, spec.r, 257),
                spec.r * np.geomspace(1e-12, 1.0, 97),
            ]
        )
    )
    vals = np.array([h(float(s)) for s in grid])
    i = int(np.argmin(vals))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, len(grid) - 1)]
    # golden-section refinement of the bracketed minimizer
    gr = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = float(lo), float(hi)
    c = b - gr * (b - a)
    d = a + gr * (b - a)
    hc, hd = h(c), h(d)
    for _ in range(90):
        if b - a <= 1e-14 * max(1.0, spec.r):
            break
        if hc < hd:
            b, d, hd = d, c, hc
            c = b - gr * (b - a)
            hc = h(c)
        else:
            a, c, hc = c, d, hd
            d = a + gr * (b - a)
            hd = h(d)
    best = min(vals[i], hc, hd)
    return math.sqrt(max(best, 0.0))


# --------------------------------------------------------------------------
# barrier functions
#
# Shared notation: beta = (N - p)/(p - 1) weights the sinh/sin kernel
# densities, p' = p/(p - 1). Every barrier has an explicit closed form at
# p = inf where the kernels collapse to hyperbolic functions.


def _check_np(N, pe):
    if not (isinstance(N, (int, np.integer)) and N >= 2):
        raise ConfigurationError("dimension N must be an integer >= 2")


def log_barrier_E_minus(N, p, d_z: float, t: float) -> float:
    """log of the pointwise lower envelope A * t^-k * d_z^2k.

    k = (N + p - 2)/(2(p - 1)) and A = {p e / (2(N + p - 2))}^k; at p = inf
    both reduce to their limits k = 1/2, A = sqrt(e/2). The envelope bounds
    the heat profile from below through the shifted-source comparison, and
    t log of it vanishes with t at fixed d_z.
    """
    pe = as_p_exponent(p)
    _check_np(N, pe)
    if not (d_z > 0.0):
        raise ConfigurationError("d_z must be positive")
    if not (t > 0.0):
        raise ConfigurationError("time t must be positive")
    if pe.is_inf:
        k = 0.5
        log_a = 0.5 * (1.0 - math.log(2.0))
    else:
        k = (N + pe.p - 2.0) / (2.0 * (pe.p - 1.0))
        log_a = k * (math.log(pe.p) + 1.0 - math.log(2.0 * (N + pe.p - 2.0)))
    return log_a - k * math.log(t) + 2.0 * k * math.log(d_z)


def barrier_E_minus(N, p, d_z: float, t: float) -> float:
    return math.exp(log_barrier_E_minus(N, p, d_z, t))


def log_barrier_E_plus(
    N, p, d: float, t: float, quad: QuadratureSpec = DEFAULT_QUADRATURE
) -> float:
    """log of the uniform upper factor: a ratio of weighted cosine kernels.

    E+(d, t) = g(0)/g(p' d^2 / (2t)) with the density exponent beta, and
    2/(1 + exp(-d^2/t)) at p = inf. Always >= 1, equal to 1 at d = 0, and
    t log E+ is O(t log t) on bounded distance sets (O(t) at p = inf).
    """
    pe = as_p_exponent(p)
    _check_np(N, pe)
    if not (d >= 0.0):
        raise ConfigurationError("distance d must be nonnegative")
    if not (t > 0.0):
        raise ConfigurationError("time t must be positive")
    if pe.is_inf:
        return math.log(2.0) - math.log1p(math.exp(-d * d / t))
    beta = density_exponent(pe, N)
    s = pe.p_conj * d * d / (2.0 * t)
    val = log_asym_g(beta, 0.0, quad) - log_asym_g(beta, s, quad)
    return max(val, 0.0)


def barrier_E_plus(N, p, d: float, t: float, quad: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    return math.exp(log_barrier_E_plus(N, p, d, t, quad))


def log_barrier_e_pz(
    N, p, dist_xz: float, d_z: float, eps: float,
    quad: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """log of the resolvent lower factor: a ratio of weighted cosh kernels.

    e(dist, d_z) = f(sqrt(p') dist / eps) / f(sqrt(p') d_z / eps) with f the
    sinh-weighted kernel; since f decreases and dist >= d_z the value lies
    in (0, 1]. At p = inf the factor is identically 1.
    """
    pe = as_p_exponent(p)
    _check_np(N, pe)
    if not (d_z > 0.0):
        raise ConfigurationError("d_z must be positive")
    if not (dist_xz >= d_z):
        raise ConfigurationError("dist_xz must be at least d_z")
    if not (eps > 0.0):
        raise ConfigurationError("eps must be positive")
    if pe.is_inf:
        return 0.0
    beta = density_exponent(pe, N)
    root = math.sqrt(pe.p_conj)
    val = log_asym_f(beta, root * dist_xz / eps, quad) - log_asym_f(
        beta, root * d_z / eps, quad
    )
    return min(val, 0.0)


def barrier_e_pz(
    N, p, dist_xz: float, d_z: float, eps: float,
    quad: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    return math.exp(log_barrier_e_pz(N, p, dist_xz, d_z, eps, quad))


def log_barrier_E_p_eps(
    N, p, d: float, eps: float, quad: QuadratureSpec = DEFAULT_QUADRATURE
) -> float:
    """log of the resolvent upper factor g(0)/g(sqrt(p') d / eps).

    At p = inf the closed form is 2/(1 + exp(-2d/eps)). Always >= 1 and
    eps log of it is O(eps log eps) on bounded distance sets (O(eps) at
    p = inf).
    """
    pe = as_p_exponent(p)
    _check_np(N, pe)
    if not (d >= 0.0):
        raise ConfigurationError("distance d must be nonnegative")
    if not (eps > 0.0):
        raise ConfigurationError("eps must be positive")
    if pe.is_inf:
        return math.log(2.0) - math.log1p(math.exp(-2.0 * d / eps))
    beta = density_exponent(pe, N)
    s = math.sqrt(pe.p_conj) * d / eps
    val = log_asym_g(beta, 0.0, quad) - log_asym_g(beta, s, quad)
    return max(val, 0.0)


def barrier_E_p_eps(
    N, p, d: float, eps: float, quad: QuadratureSpec = DEFAULT_QUADRATURE
) -> float:
    return math.exp(log_barrier_E_p_eps(N, p, d, eps, quad))


def _log_cosh(x: float) -> float:
    ax = abs(x)
    return ax + math.log1p(math.exp(-2.0 * ax)) - math.log(2.0)


def log_barriers_c2(
    N, p, d: float, eps: float, r_i: float, r_e: float,
    quad: QuadratureSpec = DEFAULT_QUADRATURE,
):
    """(log lower, log upper) resolvent envelopes for two-sided ball domains.

    With sigma = sqrt(p') d / eps and tau_* = sqrt(p') r_* / eps:

        lower(sigma) = e^-sigma f(sigma + tau_e) / f(tau_e)
        upper(sigma) = e^-sigma g(tau_i - sigma) / g(tau_i)   sigma < tau_i
                       e^-sigma g(0) / g(sigma)               sigma >= tau_i

    and at p = inf the kernels collapse: lower = e^-sigma, upper the
    matching cosh ratio with the same branch switch. The exterior radius
    r_e feeds the lower envelope and the interior radius r_i the upper
    one; the derivations tie each envelope to its own one-sided ball, and
    the two radii agree anyway on the ball domains used for calibration.
    Both envelopes are 1 at d = 0 and decrease in d.
    """
    pe = as_p_exponent(p)
    _check_np(N, pe)
    if not (d >= 0.0):
        raise ConfigurationError("distance d must be nonnegative")
    if not (eps > 0.0):
        raise ConfigurationError("eps must be positive")
    if not (r_i > 0.0 and r_e > 0.0):
        raise ConfigurationError("ball radii r_i, r_e must be positive")
    root = math.sqrt(pe.p_conj)
    sigma = root * d / eps
    tau_i = root * r_i / eps
    tau_e = root * r_e / eps
    if pe.is_inf:
        log_lower = -sigma
        # the cosh ratio already carries the e^-sigma decay
        if sigma < tau_i:
            log_upper = _log_cosh(tau_i - sigma) - _log_cosh(tau_i)
        else:
            log_upper = -_log_cosh(sigma)
    else:
        beta = density_exponent(pe, N)
        log_lower = -sigma + log_asym_f(beta, sigma + tau_e, quad) - log_asym_f(
            beta, tau_e, quad
        )
        if sigma < tau_i:
            log_upper = -sigma + log_asym_g(beta, tau_i - sigma, quad) - log_asym_g(
                beta, tau_i, quad
            )
        else:
            log_upper = -sigma + log_asym_g(beta, 0.0, quad) - log_asym_g(
                beta, sigma, quad
            )
    # both envelopes cap at 1; shave quadrature rounding above the cap
    return min(log_lower, 0.0), min(log_upper, 0.0)


def barriers_c2(
    N, p, d: float, eps: float, r_i: float, r_e: float,
    quad: QuadratureSpec = DEFAULT_QUADRATURE,
):
    lo, up = log_barriers_c2(N, p, d, eps, r_i, r_e, quad)
    return math.exp(lo), math.exp(up)


_BARRIER_KINDS = ("E_minus", "E_plus", "e_pz", "E_p_eps", "U_eps", "V_eps")
_LOWER_KINDS = frozenset({"E_minus", "e_pz", "U_eps"})


@dataclass(frozen=True)
class BarrierSet:
    """One barrier bound together with the parameters that freeze it.

    kind selects the family; params carries whichever of t, eps, d_z, r_i,
    r_e the family needs. evaluate(d) returns the barrier at distance d
    (for E_minus, d plays the role of the source depth d_z). side reports
    whether the barrier bounds from below or above, which is what the
    pointwise sandwich checks compare.
    """

    kind: str
    N: int
    p: object
    params: Mapping[str, float]
    quad: QuadratureSpec = DEFAULT_QUADRATURE

    def __post_init__(self):
        if self.kind not in _BARRIER_KINDS:
            raise ConfigurationError(
                "barrier kind must be one of %s" % (_BARRIER_KINDS,)
            )
        object.__setattr__(self, "p", as_p_exponent(self.p))
        object.__setattr__(self, "params", dict(self.params))

    @property
    def side(self) -> str:
        return "lower" if self.kind in _LOWER_KINDS else "upper"

    def _need(self, name: str) -> float:
        try:
            return float(self.params[name])
        except KeyError:
            raise ConfigurationError(
                "barrier kind %s requires parameter %r" % (self.kind, name)
            ) from None

    def log_evaluate(self, d: float) -> float:
        if self.kind == "E_minus":
            return log_barrier_E_minus(self.N, self.p, d, self._need("t"))
        if self.kind == "E_plus":
            return log_barrier_E_plus(self.N, self.p, d, self._need("t"), self.quad)
        if self.kind == "e_pz":
            d_z = self._need("d_z")
            return log_barrier_e_pz(
                self.N, self.p, max(d, d_z), d_z, self._need("eps"), self.quad
            )
        if self.kind == "E_p_eps":
            return log_barrier_E_p_eps(
                self.N, self.p, d, self._need("eps"), self.quad
            )
        lo, up = log_barriers_c2(
            self.N,
            self.p,
            d,
            self._need("eps"),
            self._need("r_i"),
            self._need("r_e"),
            self.quad,
        )
        return lo if self.kind == "U_eps" else up

    def evaluate(self, d: float) -> float:
        return math.exp(self.log_evaluate(d))


# --------------------------------------------------------------------------
# Varadhan residuals with assertable two-sided bounds


def varadhan_parabolic_residual(
    u_eval, dom, x, p, t: float, log_values: bool = False
) -> float:
    """Residual 4t log u(x, t) + p' d(x)^2 of the heat concentration law.

    u_eval(x, t) returns the profile value, or its log when log_values is
    set; the log route is the reliable one at small t, where the value
    itself underflows.
    """
    pe = as_p_exponent(p)
    if not (t > 0.0):
        raise ConfigurationError("time t must be positive")
    d = distance_to_boundary(dom, x)
    raw = float(u_eval(x, t))
    if log_values:
        log_u = raw
    else:
        if not (raw > 0.0):
            raise NumericalFailure(
                "profile value %.3e is not positive; pass a log evaluator" % raw,
                operation="varadhan_parabolic_residual",
            )
        log_u = math.log(raw)
    return 4.0 * t * log_u + pe.p_conj * d * d


def parabolic_residual_bounds(
    N, p, d: float, t: float, exterior_reach: float = math.inf,
    quad: QuadratureSpec = DEFAULT_QUADRATURE,
):
    """Assertable sandwich for the parabolic residual at distance d.

    Upper bound: 4t log E+(d, t). Lower bound: the best exterior source
    within reach, max over depth delta of

        p' (d^2 - (d + delta)^2) + 4t log E-(delta, t),

    whose unconstrained maximizer delta* solves delta^2 + d delta = 4tk/p'
    with k the E- exponent; the returned bound clamps delta* to the
    available exterior reach (for a ball of radius rho seen from inside,
    reach = rho works because the exterior of the complement ball grows).
    """
    pe = as_p_exponent(p)
    _check_np(N, pe)
    if not (d >= 0.0):
        raise ConfigurationError("distance d must be nonnegative")
    if not (t > 0.0):
        raise ConfigurationError("time t must be positive")
    if not (exterior_reach > 0.0):
        raise ConfigurationError("exterior_reach must be positive")
    k = 0.5 if pe.is_inf else (N + pe.p - 2.0) / (2.0 * (pe.p - 1.0))
    disc = d * d + 16.0 * t * k / pe.p_conj
    delta = 0.5 * (-d + math.sqrt(disc))
    if math.isfinite(exterior_reach):
        delta = min(delta, exterior_reach)
    lower = (
        pe.p_conj * (d * d - (d + delta) ** 2)
        + 4.0 * t * log_barrier_E_minus(N, pe, delta, t)
    )
    upper = 4.0 * t * log_barrier_E_plus(N, pe, d, t, quad)
    return lower, upper


def varadhan_elliptic_residual(
    u_eval, dom, x, p, eps: float, log_values: bool = False
) -> float:
    """Residual eps log u(x) + sqrt(p') d(x) of the resolvent law."""
    pe = as_p_exponent(p)
    if not (eps > 0.0):
        raise ConfigurationError("eps must be positive")
    d = distance_to_boundary(dom, x)
    raw = float(u_eval(x, eps))
    if log_values:
        log_u = raw
    else:
        if not (raw > 0.0):
            raise NumericalFailure(
                "profile value %.3e is not positive; pass a log evaluator" % raw,
                operation="varadhan_elliptic_residual",
            )
        log_u = math.log(raw)
    return eps * log_u + math.sqrt(pe.p_conj) * d


def elliptic_residual_bounds(
    N, p, d: float, eps: float, exterior_reach: float,
    quad: QuadratureSpec = DEFAULT_QUADRATURE,
):
    """Assertable sandwich for the elliptic residual at distance d.

    The exterior-source chain collapses to eps log e(d + delta, delta)
    once the sqrt(p') terms cancel, and the factor improves as the source
    deepens, so delta is taken at the full exterior reach. The upper bound
    is eps log E_p^eps(d).
    """
    pe = as_p_exponent(p)
    _check_np(N, pe)
    if not (d >= 0.0):
        raise ConfigurationError("distance d must be nonnegative")
    if not (eps > 0.0):
        raise ConfigurationError("eps must be positive")
    if not (exterior_reach > 0.0 and math.isfinite(exterior_reach)):
        raise ConfigurationError("exterior_reach must be positive and finite")
    delta = exterior_reach
    lower = eps * log_barrier_e_pz(N, pe, d + delta, delta, eps, quad)
    upper = eps * log_barrier_E_p_eps(N, pe, d, eps, quad)
    return lower, upper


# --------------------------------------------------------------------------
# enhanced distance profile


def enhanced_v(u_eval, x, t: float, p) -> float:
    """Distance-like profile v with Erfc(sqrt(p') v / (2 sqrt(t))) = u.

    v = (2 sqrt(t) / sqrt(p')) InvErfc(u); it reproduces the boundary
    distance exactly on half-space profiles and deviates by O(sqrt(t) log t)
    times sqrt(t) on smooth domains. u must lie strictly inside (0, 1).
    """
    pe = as_p_exponent(p)
    if not (t > 0.0):
        raise ConfigurationError("time t must be positive")
    u = float(u_eval(x, t))
    if not (0.0 < u < 1.0):
        raise ConfigurationError(
            "enhanced profile needs a value strictly inside (0, 1), got %.3e" % u
        )
    return 2.0 * math.sqrt(t) * inv_erfc(u) / math.sqrt(pe.p_conj)


def enhanced_v_values(u_values, t: float, p) -> np.ndarray:
    """Vectorized enhanced_v on an array of profile values."""
    pe = as_p_exponent(p)
    if not (t > 0.0):
        raise ConfigurationError("time t must be positive")
    u = np.asarray(u_values, dtype=float)
    if np.any(u <= 0.0) or np.any(u >= 1.0):
        raise ConfigurationError(
            "enhanced profile needs values strictly inside (0, 1)"
        )
    return 2.0 * math.sqrt(t) * inv_erfc(u) / math.sqrt(pe.p_conj)


# --------------------------------------------------------------------------
# rate models and fitting


RATE_MODELS = (
    "t*log(1/t)",
    "t",
    "eps",
    "eps*log(1/eps)",
    "eps*log(1/psi)",
    "eps*log|log psi|",
)

_PSI_MODELS = frozenset({"eps*log(1/psi)", "eps*log|log psi|"})


def _model_value(model: str, param: float, modulus: Optional[ModulusSpec]) -> float:
    if model in ("t", "eps"):
        return param
    if model in ("t*log(1/t)", "eps*log(1/eps)"):
        return param * math.log(1.0 / param)
    if model in _PSI_MODELS:
        if modulus is None:
            raise ConfigurationError("model %r needs a ModulusSpec" % model)
        psi = psi_omega(modulus, param)
        if model == "eps*log(1/psi)":
            return param * math.log(1.0 / psi) if psi > 0.0 else math.inf
        return param * math.log(abs(math.log(psi))) if 0.0 < psi != 1.0 else math.inf
    raise ConfigurationError("unknown rate model %r" % model)


def select_rate_model(N: int, p, setting: str, modulus: Optional[ModulusSpec] = None) -> str:
    """Pick the decay model the theory predicts for (N, p) and the setting.

    Heat residuals decay like t at p = inf and like t log(1/t) otherwise.
    Resolvent residuals follow the position of p relative to N: above N
    the eps log(1/eps) rate, exactly at N the doubly logarithmic modulus
    rate, below N the modulus rate itself; p = inf decays like plain eps.
    The modulus-driven choices fall back to their smooth-domain analogs
    when no modulus is supplied.
    """
    pe = as_p_exponent(p)
    _check_np(N, pe)
    if setting == "parabolic":
        return "t" if pe.is_inf else "t*log(1/t)"
    if setting != "elliptic":
        raise ConfigurationError("setting must be 'parabolic' or 'elliptic'")
    if pe.is_inf:
        return "eps"
    if pe.p > N:
        return "eps*log(1/eps)"
    if modulus is None:
        return "eps*log(1/eps)"
    return "eps*log|log psi|" if pe.p == N else "eps*log(1/psi)"


def rate_fit(
    ladder, model: str, modulus: Optional[ModulusSpec] = None
):
    """Least-squares decay fit of a residual ladder against a model curve.

    ladder is a sequence of (param, residual) pairs, at least four of them
    with nonzero residuals. The fit regresses log|residual| on
    log(model(param)); the slope is the exponent (close to 1 when the
    model matches), exp of the intercept is the prefactor, and r_squared
    reports fit quality. A ladder whose model values do not vary raises a
    degenerate-fit error.
    """
    pairs = [(float(a), float(b)) for a, b in ladder]
    if len(pairs) < 4:
        raise ConfigurationError("rate_fit needs at least 4 ladder points")
    params = np.array([a for a, _ in pairs])
    residuals = np.array([b for _, b in pairs])
    if np.any(params <= 0.0):
        raise ConfigurationError("ladder parameters must be positive")
    if np.any(residuals == 0.0) or not np.all(np.isfinite(residuals)):
        raise ConfigurationError("residuals must be finite and nonzero")
    mvals = np.array([_model_value(model, a, modulus) for a in params])
    if np.any(~np.isfinite(mvals)) or np.any(mvals <= 0.0):
        raise ConfigurationError(
            "model %r is nonpositive on this ladder; out of asymptotic range" % model
        )
    x = np.log(mvals)
    y = np.log(np.abs(residuals))
    xbar = float(np.mean(x))
    sxx = float(np.sum((x - xbar) ** 2))
    if sxx < 1e-24:
        raise NumericalFailure(
            "degenerate fit: model values have zero variance",
            operation="rate_fit",
        )
    ybar = float(np.mean(y))
    slope = float(np.sum((x - xbar) * (y - ybar)) / sxx)
    intercept = ybar - slope * xbar
    fitted = slope * x + intercept
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - ybar) ** 2))
    r_squared = 1.0 if ss_tot <= 1e-28 else 1.0 - ss_res / ss_tot
    return slope, math.exp(intercept), r_squared


@dataclass
class AsymptoticsReport:
    """Ladder study: residuals, the fitted decay model and its quality.

    The optional scaled-observable fields carry q-mean limit studies,
    where the ladder tracks a scaled quantity converging to a predicted
    constant rather than a vanishing residual.
    """

    ladder: np.ndarray
    residuals: np.ndarray
    model: str
    exponent: float
    prefactor: float
    r_squared: float
    max_residual_location: float
    scaled_values: Optional[np.ndarray] = None
    prediction: Optional[float] = None
    relative_gap: Optional[float] = None
    extra: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        self.ladder = np.asarray(self.ladder, dtype=float)
        self.residuals = np.asarray(self.residuals, dtype=float)
        if self.ladder.shape != self.residuals.shape:
            raise ConfigurationError("ladder and residuals must align")
        if np.any(np.diff(self.ladder) >= 0.0):
            raise ConfigurationError("ladder must be strictly decreasing")
        if not np.all(np.isfinite(self.residuals)):
            raise ConfigurationError("residuals must be finite")
        if self.scaled_values is not None:
            self.scaled_values = np.asarray(self.scaled_values, dtype=float)

    def model_values(self, modulus: Optional[ModulusSpec] = None) -> np.ndarray:
        return np.array(
            [_model_value(self.model, float(a), modulus) for a in self.ladder]
        )

    def to_json_dict(self) -> dict:
        out = {
            "ladder": [repr(v) for v in self.ladder.tolist()],
            "residuals": [repr(v) for v in self.residuals.tolist()],
            "model": self.model,
            "exponent": self.exponent,
            "prefactor": self.prefactor,
            "r_squared": self.r_squared,
            "max_residual_location": self.max_residual_location,
        }
        if self.scaled_values is not None:
            out["scaled_values"] = [repr(v) for v in self.scaled_values.tolist()]
        if self.prediction is not None:
            out["prediction"] = repr(self.prediction)
        if self.relative_gap is not None:
            out["relative_gap"] = self.relative_gap
        if self.extra:
            out["extra"] = self.extra
        return out

    def to_csv(self, path, modulus: Optional[ModulusSpec] = None) -> None:
        mvals = self.model_values(modulus)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("param,residual,model_value,ratio\n")
            for a, r, m in zip(self.ladder, self.residuals, mvals):
                ratio = r / m if m != 0.0 else math.nan
                fh.write(
                    "%s,%s,%s,%s\n"
                    % ("%.17g" % a, "%.17g" % r, "%.17g" % m, "%.17g" % ratio)
                )


def asymptotics_report(
    params: Sequence[float],
    residuals: Sequence[float],
    model: str,
    modulus: Optional[ModulusSpec] = None,
    scaled_values=None,
    prediction: Optional[float] = None,
    extra: Optional[dict] = None,
) -> AsymptoticsReport:
    """Assemble a report: run the rate fit and locate the worst residual."""
    params = np.asarray(params, dtype=float)
    residuals = np.asarray(residuals, dtype=float)
    exponent, prefactor, r2 = rate_fit(
        list(zip(params.tolist(), residuals.tolist())), model, modulus
    )
    worst = float(params[int(np.argmax(np.abs(residuals)))])
    gap = None
    if prediction is not None and scaled_values is not None:
        finest = np.asarray(scaled_values, dtype=float)[-1]
        gap = abs(float(finest) / prediction - 1.0)
    return AsymptoticsReport(
        ladder=params,
        residuals=residuals,
        model=model,
        exponent=exponent,
        prefactor=prefactor,
        r_squared=r2,
        max_residual_location=worst,
        scaled_values=None if scaled_values is None else np.asarray(scaled_values),
        prediction=prediction,
        relative_gap=gap,
        extra=extra or {},
    )


# --------------------------------------------------------------------------
# exploratory probe: does the heat rate feel the position of p vs N?
#
# The resolvent rates switch regime at p = N. Whether the heat residual
# does anything similar is unsettled; this probe only produces fitted
# exponents for inspection and never asserts a threshold.


def parabolic_threshold_probe(
    N: int, p_values, d: float = 0.5, ladder=None
) -> dict:
    """Fit half-space heat residual rates across p; data only, no verdict.

    For each p the residual 4t log Erfc(sqrt(p'/4t) d) + p' d^2 is fitted
    against both candidate models. Returns the per-p exponents and
    prefactors; interpreting them is left to the caller.
    """
    if not (d > 0.0):
        raise ConfigurationError("distance d must be positive")
    if ladder is None:
        ladder = np.geomspace(1e-2, 1e-6, 9)
    ladder = np.asarray(ladder, dtype=float)
    rows = []
    for p in p_values:
        pe = as_p_exponent(p)
        res = []
        for t in ladder:
            log_u = erfc_ln(math.sqrt(pe.p_conj / (4.0 * t)) * d)
            res.append(4.0 * t * log_u + pe.p_conj * d * d)
        row = {"p": math.inf if pe.is_inf else pe.p}
        for model in ("t*log(1/t)", "t"):
            exponent, prefactor, r2 = rate_fit(
                list(zip(ladder.tolist(), res)), model
            )
            tag = "tlogt" if model == "t*log(1/t)" else "t"
            row["exponent_" + tag] = exponent
            row["prefactor_" + tag] = prefactor
            row["r_squared_" + tag] = r2
        rows.append(row)
    return {
        "kind": "exploratory",
        "note": "fitted exponents only; no threshold assertion",
        "distance": d,
        "ladder": ladder.tolist(),
        "rows": rows,
    }
