"""Computable forms of the recovery analysis: the Rayleigh-normal closed form,
the measurement-cut probability lower bound, cone and region membership, the
exclusion certificate, and VC-type sample-complexity arithmetic."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .measurements import MeasurementEnsemble
from .numerics import RngStream, as_signal, real_inner

__all__ = [
    "GeometryContext",
    "CertificateReport",
    "rayleigh_normal_cdf",
    "pmin_lower_bound",
    "in_R_delta",
    "in_C_delta",
    "in_Cprime_delta",
    "check_certificate",
    "measurement_cut_probability",
    "empirical_pmin",
    "sauer_bound",
    "sauer_bound_loose",
    "vc_deviation_bound",
    "sample_complexity",
]

_MAX_EXP = 709.0  # largest x with exp(x) finite in float64


@dataclass(frozen=True)
class GeometryContext:
    """Ground truth and constants for the geometric predicates.

    xstar is normalized to unit l2 norm on construction. delta is the anchor
    correlation constant, t the error-radius multiplier, and eta_inv the noise
    upper bound (0 means noiseless).
    """

    xstar: np.ndarray
    delta: float
    t: float
    eta_inv: float = 0.0

    def __post_init__(self):
        xs = as_signal(self.xstar, "xstar")
        norm = np.linalg.norm(xs)
        if norm == 0:
            raise ValueError("xstar must be nonzero")
        object.__setattr__(self, "xstar", xs / norm)
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")
        if self.t <= 0:
            raise ValueError("t must be > 0")
        if self.eta_inv < 0:
            raise ValueError("eta_inv must be >= 0")


@dataclass(frozen=True)
class CertificateReport:
    """Outcome of testing one candidate error direction h against the
    exclusion inequalities."""

    h: np.ndarray
    in_R_delta: bool
    anchor_inequality_holds: bool
    first_violated_constraint: Optional[int]
    certified_excluded: bool


def rayleigh_normal_cdf(alpha: float, beta: float) -> float:
    """P(alpha*v + beta/v > g) for independent v ~ Rayleigh(1), g ~ Normal(0,1).

    Two-branch closed form. With s = sqrt(alpha^2 + 1):

        beta >= 0:  1 - (s - alpha)/(2s) * exp(-beta*(alpha + s))
        beta <  0:  (s + alpha)/(2s) * exp(beta/(alpha + s))

    (s - alpha) and (s + alpha) are reciprocal, which is used to avoid
    cancellation for large |alpha|; the branches agree at beta = 0.
    """
    alpha = float(alpha)
    beta = float(beta)
    if not (math.isfinite(alpha) and math.isfinite(beta)):
        raise ValueError("alpha and beta must be finite")
    s = math.hypot(alpha, 1.0)
    sum_pos = s + alpha if alpha >= 0 else 1.0 / (s - alpha)  # alpha + s > 0
    diff_pos = s - alpha if alpha <= 0 else 1.0 / (s + alpha)  # s - alpha > 0
    if beta >= 0:
        exponent = -beta * sum_pos
        value = 1.0 - diff_pos / (2.0 * s) * (math.exp(exponent) if exponent > -_MAX_EXP else 0.0)
    else:
        exponent = beta / sum_pos
        value = sum_pos / (2.0 * s) * (math.exp(exponent) if exponent > -_MAX_EXP else 0.0)
    return min(max(value, 0.0), 1.0)


def pmin_lower_bound(delta: float, t: float) -> float:
    """Lower bound on the measurement-cut probability for complex Gaussian
    measurements: (1/2 - sqrt(1 - delta^2)/2) * exp(-2*sqrt(2) * t / delta^2).

    Valid for unit anchors with correlation constant delta in (0, 1] and any
    t > 0; the value lies in [0, 1/2] and underflows to 0 for large t/delta^2.
    """
    if not 0.0 < delta <= 1.0:
        raise ValueError("delta must lie in (0, 1]")
    if t <= 0:
        raise ValueError("t must be > 0")
    root = math.sqrt(max(1.0 - delta * delta, 0.0))
    prefactor = delta * delta / (2.0 * (1.0 + root))  # == (1 - root)/2, stable for small delta
    exponent = -2.0 * math.sqrt(2.0) * t / (delta * delta)
    if exponent < -_MAX_EXP:
        return 0.0
    return prefactor * math.exp(exponent)


def in_R_delta(h, ctx: GeometryContext) -> bool:
    """Membership in the region ||h - (x^H h) x||_2 >= delta * |Im(x^H h)|."""
    hv = as_signal(h, "h")
    x = ctx.xstar
    if hv.shape != x.shape:
        raise ValueError("h must match the length of ctx.xstar")
    overlap = np.vdot(x, hv)
    perp = hv - overlap * x
    return bool(np.linalg.norm(perp) >= ctx.delta * abs(overlap.imag))


def in_C_delta(y, ctx: GeometryContext) -> bool:
    """Membership in the cone Re(x^H y) >= delta * ||y||_2."""
    yv = as_signal(y, "y")
    x = ctx.xstar
    if yv.shape != x.shape:
        raise ValueError("y must match the length of ctx.xstar")
    return bool(np.vdot(x, yv).real >= ctx.delta * np.linalg.norm(yv))


def in_Cprime_delta(z, ctx: GeometryContext) -> bool:
    """Membership in the closure of the complement of the polar cone:
    delta * <x, z> >= -sqrt(1 - delta^2) * sqrt(||z||^2 - |x^H z|^2)."""
    zv = as_signal(z, "z")
    x = ctx.xstar
    if zv.shape != x.shape:
        raise ValueError("z must match the length of ctx.xstar")
    overlap = np.vdot(x, zv)
    residual_sq = max(float(np.linalg.norm(zv) ** 2 - abs(overlap) ** 2), 0.0)
    lhs = ctx.delta * overlap.real
    rhs = -math.sqrt(max(1.0 - ctx.delta**2, 0.0)) * math.sqrt(residual_sq)
    return bool(lhs >= rhs)


def check_certificate(
    h, a0, ens: MeasurementEnsemble, ctx: GeometryContext
) -> CertificateReport:
    """Test whether the direction h violates the optimality inequalities
    <a0, h> >= 0 and <a_i a_i^H xstar, h> <= eta_inv / 2.

    The per-measurement values are computed as Re(conj(a_i^H xstar) * a_i^H h);
    h is certified excluded when the anchor inequality fails or some
    measurement inequality is violated.
    """
    hv = as_signal(h, "h")
    a0v = as_signal(a0, "a0")
    if hv.shape[0] != ens.n or a0v.shape[0] != ens.n:
        raise ValueError("h and a0 must match the ensemble dimension")
    anchor_ok = real_inner(a0v, hv) >= 0.0
    vals = (np.conj(ens.forward(ctx.xstar)) * ens.forward(hv)).real
    threshold = 0.5 * ctx.eta_inv
    violated = np.nonzero(vals > threshold)[0]
    first = int(violated[0]) if violated.size else None
    return CertificateReport(
        h=hv,
        in_R_delta=in_R_delta(hv, ctx),
        anchor_inequality_holds=anchor_ok,
        first_violated_constraint=first,
        certified_excluded=(not anchor_ok) or first is not None,
    )


def measurement_cut_probability(ctx: GeometryContext, h, num_a: int, rng: RngStream) -> float:
    """Monte Carlo estimate of P(<a a^H xstar, h> > eta_inv / 2) over fresh
    complex Gaussian measurement draws a."""
    if num_a < 1:
        raise ValueError("num_a must be >= 1")
    hv = as_signal(h, "h")
    x = ctx.xstar
    if hv.shape != x.shape:
        raise ValueError("h must match the length of ctx.xstar")
    n = x.shape[0]
    threshold = 0.5 * ctx.eta_inv
    g = rng.generator
    scale = np.sqrt(0.5)
    hits = 0
    remaining = int(num_a)
    chunk = max(1, int(5_000_000 // max(n, 1)))
    while remaining > 0:
        k = min(chunk, remaining)
        a = scale * (g.standard_normal((k, n)) + 1j * g.standard_normal((k, n)))
        u = a.conj() @ x  # a^H xstar per draw
        w = a.conj() @ hv
        hits += int(np.count_nonzero((np.conj(u) * w).real > threshold))
        remaining -= k
    return hits / num_a


def empirical_pmin(ctx: GeometryContext, num_h: int, num_a: int, rng: RngStream) -> float:
    """Smallest Monte Carlo cut probability over sampled adversarial directions.

    Directions h are complex Gaussian draws rescaled to sit just above the
    norm threshold eta_inv / t where the infimum is approached, and are kept
    only if they land in C'_delta intersect R_delta (rejection sampling).
    Requires eta_inv > 0, otherwise the threshold degenerates to 0.
    """
    if num_h < 1 or num_a < 1:
        raise ValueError("num_h and num_a must be >= 1")
    if ctx.eta_inv <= 0:
        raise ValueError("empirical_pmin requires eta_inv > 0")
    target_norm = (1.0 + 1e-6) * ctx.eta_inv / ctx.t
    n = ctx.xstar.shape[0]
    g = rng.generator
    scale = np.sqrt(0.5)
    accepted = []
    attempts = 0
    max_attempts = 1000 * num_h
    while len(accepted) < num_h and attempts < max_attempts:
        attempts += 1
        h = scale * (g.standard_normal(n) + 1j * g.standard_normal(n))
        norm = np.linalg.norm(h)
        if norm == 0:
            continue
        h = h * (target_norm / norm)
        if in_Cprime_delta(h, ctx) and in_R_delta(h, ctx):
            accepted.append(h)
    if len(accepted) < num_h:
        raise RuntimeError(
            f"rejection sampling accepted only {len(accepted)}/{num_h} directions "
            f"after {max_attempts} attempts"
        )
    return min(measurement_cut_probability(ctx, h, num_a, rng) for h in accepted)


def sauer_bound(n: int, d: int) -> int:
    """Sharp shatter-coefficient bound min(sum_{i=0}^{d} C(n,i), 2^n) for a
    binary class of VC dimension d on n points."""
    if n < 1 or d < 1:
        raise ValueError("n and d must be >= 1")
    total = sum(math.comb(n, i) for i in range(min(d, n) + 1))
    return min(total, 2**n)


def sauer_bound_loose(n: int, d: int) -> float:
    """The (e*n/d)^d relaxation of the shatter-coefficient bound; dominates
    sauer_bound whenever n > d."""
    if n < 1 or d < 1:
        raise ValueError("n and d must be >= 1")
    exponent = d * (1.0 + math.log(n) - math.log(d))
    if exponent > _MAX_EXP:
        return math.inf
    return math.exp(exponent)


def vc_deviation_bound(n: int, shatter: float, t: float) -> float:
    """Uniform-deviation tail bound 8 * shatter * exp(-n t^2 / 8) for empirical
    frequencies over a class with the given shatter coefficient.

    The bound may exceed 1 (valid but vacuous). Evaluated through the log
    domain so that astronomically large shatter coefficients still combine
    with tiny exponential factors without overflow.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if t < 0:
        raise ValueError("t must be >= 0")
    if shatter < 1:
        raise ValueError("shatter must be >= 1")
    if math.isinf(shatter):
        return math.inf
    log_val = math.log(8.0) + math.log(shatter) - n * t * t / 8.0
    if log_val > _MAX_EXP:
        return math.inf
    if log_val < -_MAX_EXP:
        return 0.0
    return math.exp(log_val)


def sample_complexity(p_min: float, n_dim: int, failure_prob: float) -> int:
    """Measurement count sufficient for the exclusion argument to hold with
    probability >= 1 - failure_prob:

        M = ceil( (8 / p_min^2) * (c * 2N + 2 * log(8 / failure_prob)) ),
        c = 2 * log(8e / p_min^2).

    At this M the deviation inequality
    (16N log(eM/2N) + 8 log(8/failure_prob)) / M < p_min^2 is satisfied.
    """
    if not 0.0 < p_min < 1.0:
        raise ValueError("p_min must lie in (0, 1)")
    if n_dim < 1:
        raise ValueError("n_dim must be >= 1")
    if not 0.0 < failure_prob < 1.0:
        raise ValueError("failure_prob must lie in (0, 1)")
    c = 2.0 * (math.log(8.0) + 1.0 - 2.0 * math.log(p_min))
    m_real = (8.0 / (p_min * p_min)) * (c * 2.0 * n_dim + 2.0 * math.log(8.0 / failure_prob))
    return int(math.ceil(m_real))
