"""Desk-scale experiment harness: Gaussian phase-transition sweeps, the coded
diffraction image demo, and the theory-verification suites."""

from __future__ import annotations

import csv
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .anchor import anchor_correlation, spectral_anchor
from .measurements import CodedDiffractionEnsemble, DenseEnsemble, NoiseModel, observe
from .numerics import RngStream, phase_align_error, sample_complex_gaussian
from .pgm import read_pgm, write_f64_sidecar, write_pgm
from .solver import SolverConfig, solve_phasemax
from . import theory

__all__ = [
    "SweepNoise",
    "SweepConfig",
    "TrialRecord",
    "CSV_HEADER",
    "run_sweep",
    "ratio_summary",
    "CdpReport",
    "DEFAULT_CDP_CONFIG",
    "run_cdp_demo",
    "CheckResult",
    "VerifyReport",
    "run_verify",
]

CSV_HEADER = [
    "n", "m", "ratio", "trial", "seed", "noise_kind", "noise_param",
    "snr_db", "anchor_corr", "rel_error", "iters", "converged", "runtime_ms",
]


@dataclass(frozen=True)
class SweepNoise:
    """Sweep-level noise request. For kind "uniform" param is the support
    bound eta_inv; for kind "gaussian" param is the target input SNR in dB and
    the per-trial sigma is derived from the drawn signal's energy."""

    kind: str = "none"
    param: float = 0.0

    def __post_init__(self):
        if self.kind not in ("none", "uniform", "gaussian"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.kind == "uniform" and self.param < 0:
            raise ValueError("uniform noise requires eta_inv >= 0")


@dataclass(frozen=True)
class SweepConfig:
    """Configuration for a Gaussian measurement sweep across sampling ratios."""

    n: int
    ratios: tuple
    trials: int
    noise: SweepNoise = SweepNoise()
    anchor_iters: int = 50
    solver: SolverConfig = field(default_factory=SolverConfig)
    seed: int = 0
    out_path: Optional[str] = None
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "ratios", tuple(float(r) for r in self.ratios))
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not self.ratios or any(r < 1 for r in self.ratios):
            raise ValueError("ratios must be a nonempty list of values >= 1")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.anchor_iters < 1:
            raise ValueError("anchor_iters must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass(frozen=True)
class TrialRecord:
    """One sweep trial outcome; field names match the CSV columns."""

    n: int
    m: int
    ratio: float
    trial: int
    seed: int
    noise_kind: str
    noise_param: float
    snr_db: Optional[float]
    anchor_corr: float
    rel_error: float
    iters: int
    converged: bool
    runtime_ms: float


def _trial_noise_model(noise: SweepNoise, signal_energy: float) -> NoiseModel:
    if noise.kind == "none":
        return NoiseModel.none()
    if noise.kind == "uniform":
        return NoiseModel.uniform(noise.param)
    sigma = signal_energy * 10.0 ** (-noise.param / 20.0)
    return NoiseModel.gaussian(sigma)


def _run_trial(task) -> TrialRecord:
    (n, ratio, stream_id, trial, base_seed, noise, anchor_iters, solver_cfg) = task
    stream = RngStream(base_seed, stream_id)
    m = int(round(ratio * n))
    xstar = sample_complex_gaussian(n, stream)
    ens = DenseEnsemble.gaussian(n, m, stream)
    noise_model = _trial_noise_model(noise, float(np.sum(np.abs(xstar) ** 2)))
    obs = observe(ens, xstar, noise_model, stream)
    t0 = time.perf_counter()
    report = spectral_anchor(ens, obs, anchor_iters, stream)
    sol = solve_phasemax(ens, obs, report.a0, solver_cfg)
    runtime_ms = (time.perf_counter() - t0) * 1e3
    if noise_model.kind == "uniform":
        noise_param = noise_model.eta_inv
    elif noise_model.kind == "gaussian":
        noise_param = noise_model.sigma
    else:
        noise_param = 0.0
    return TrialRecord(
        n=n,
        m=m,
        ratio=ratio,
        trial=trial,
        seed=base_seed,
        noise_kind=noise_model.kind,
        noise_param=noise_param,
        snr_db=obs.snr_db,
        anchor_corr=anchor_correlation(report.a0, xstar),
        rel_error=phase_align_error(sol.xhat, xstar),
        iters=sol.iters_used,
        converged=sol.converged,
        runtime_ms=runtime_ms,
    )


def run_sweep(cfg: SweepConfig) -> list:
    """Run trials x ratios recovery experiments on dense Gaussian ensembles.

    Each (ratio, trial) pair owns RngStream(seed, stream_id) with a distinct
    stream_id, so results are reproducible and independent of worker count or
    scheduling. Records are returned in (ratio, trial) order and written as
    CSV when cfg.out_path is set.
    """
    tasks = [
        (cfg.n, ratio, ri * cfg.trials + trial, trial, cfg.seed, cfg.noise,
         cfg.anchor_iters, cfg.solver)
        for ri, ratio in enumerate(cfg.ratios)
        for trial in range(cfg.trials)
    ]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            records = list(pool.map(_run_trial, tasks))
    else:
        records = [_run_trial(t) for t in tasks]
    if cfg.out_path is not None:
        write_records_csv(cfg.out_path, records)
    return records


def write_records_csv(path, records) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for r in records:
            writer.writerow([
                r.n, r.m, r.ratio, r.trial, r.seed, r.noise_kind, r.noise_param,
                "" if r.snr_db is None else r.snr_db,
                r.anchor_corr, r.rel_error, r.iters, r.converged, r.runtime_ms,
            ])


def ratio_summary(records) -> list:
    """Per-ratio (ratio, median, 0.9-quantile) of the relative error."""
    by_ratio = {}
    for r in records:
        by_ratio.setdefault(r.ratio, []).append(r.rel_error)
    out = []
    for ratio in sorted(by_ratio):
        errs = np.asarray(by_ratio[ratio])
        out.append((ratio, float(np.median(errs)), float(np.quantile(errs, 0.9))))
    return out


DEFAULT_CDP_CONFIG = SolverConfig(max_iters=250)


@dataclass(frozen=True)
class CdpReport:
    """Outcome of the coded-diffraction image recovery demo."""

    n: int
    m: int
    num_masks: int
    rel_error: float
    iters_used: int
    converged: bool
    runtime_ms: float
    recovered_pgm: str
    recovered_f64: str
    report_path: str


def run_cdp_demo(
    image_path,
    num_masks: int,
    cfg: Optional[SolverConfig] = None,
    seed: int = 0,
    out_prefix: str = "cdp",
    anchor_iters: int = 50,
) -> CdpReport:
    """Recover a grayscale PGM image from noiseless coded diffraction patterns.

    The image is flattened to a real non-negative signal and normalized to
    unit energy before measuring (solutions of the relaxation scale linearly
    with the data, and a unit-scale signal keeps the fixed-step solver's
    transient short); the recovered estimate is phase-aligned, rescaled, and
    its real part written both as a clamped 8-bit PGM and as a raw float64
    sidecar for bit-exact error computation. The written files depend only on
    the inputs and seed; wall time is reported on the return value only.
    """
    if num_masks < 1:
        raise ValueError("num_masks must be >= 1")
    if cfg is None:
        cfg = DEFAULT_CDP_CONFIG
    image = read_pgm(image_path).astype(np.float64)
    height, width = image.shape
    flat = image.ravel()
    scale = float(np.linalg.norm(flat))
    if scale == 0:
        raise ValueError("image is identically zero; nothing to recover")
    xstar = (flat / scale).astype(np.complex128)
    n = xstar.shape[0]

    stream = RngStream(seed)
    ens = CodedDiffractionEnsemble.rademacher(n, num_masks, stream)
    obs = observe(ens, xstar, NoiseModel.none(), stream)
    t0 = time.perf_counter()
    anchor = spectral_anchor(ens, obs, anchor_iters, stream)
    sol = solve_phasemax(ens, obs, anchor.a0, cfg)
    runtime_ms = (time.perf_counter() - t0) * 1e3
    rel_error = phase_align_error(sol.xhat, xstar)

    overlap = np.vdot(sol.xhat, xstar)
    phase = np.exp(1j * np.angle(overlap)) if overlap != 0 else 1.0
    recovered = (phase * sol.xhat).real * scale

    prefix = str(out_prefix)
    pgm_path = prefix + "_recovered.pgm"
    f64_path = prefix + "_recovered.f64"
    report_path = prefix + "_report.txt"
    write_pgm(pgm_path, recovered.reshape(height, width))
    write_f64_sidecar(f64_path, recovered)
    lines = [
        f"n={n}",
        f"m={ens.m}",
        f"num_masks={num_masks}",
        f"seed={seed}",
        f"rel_error={rel_error!r}",
        f"iters_used={sol.iters_used}",
        f"converged={sol.converged}",
        f"objective={sol.objective!r}",
    ]
    Path(report_path).write_text("\n".join(lines) + "\n")
    return CdpReport(
        n=n,
        m=ens.m,
        num_masks=num_masks,
        rel_error=rel_error,
        iters_used=sol.iters_used,
        converged=sol.converged,
        runtime_ms=runtime_ms,
        recovered_pgm=pgm_path,
        recovered_f64=f64_path,
        report_path=report_path,
    )


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    observed: str
    required: str

    def render(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: observed {self.observed}, required {self.required}"


@dataclass(frozen=True)
class VerifyReport:
    suite: str
    seed: int
    checks: tuple

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def render(self) -> str:
        lines = [f"verify suite={self.suite} seed={self.seed}"]
        lines.extend(c.render() for c in self.checks)
        status = "OK" if self.passed else "FAILED"
        lines.append(f"{len(self.checks)} checks, {sum(c.passed for c in self.checks)} passed: {status}")
        return "\n".join(lines)


def _closed_form_checks(seed: int, mc_draws: int) -> list:
    checks = []
    g = RngStream(seed, 1).generator
    v = g.rayleigh(1.0, mc_draws)
    gauss = g.standard_normal(mc_draws)

    alphas = (-2.0, -0.5, 0.0, 0.5, 2.0)
    betas = (-1.0, -0.1, 0.0, 0.1, 1.0)
    worst = 0.0
    for a in alphas:
        for bt in betas:
            closed = theory.rayleigh_normal_cdf(a, bt)
            emp = float(np.mean(a * v + bt / v > gauss))
            se = math.sqrt(max(closed * (1.0 - closed), 1e-12) / mc_draws)
            worst = max(worst, abs(closed - emp) / se)
    checks.append(CheckResult(
        name="rayleigh_normal_cdf Monte Carlo grid",
        passed=worst <= 4.0,
        observed=f"max deviation {worst:.3f} standard errors",
        required="<= 4 standard errors in every cell",
    ))

    grid = np.linspace(-10.0, 10.0, 201)
    gap = max(abs(theory.rayleigh_normal_cdf(a, 0.0) - theory.rayleigh_normal_cdf(a, -1e-300))
              for a in grid)
    checks.append(CheckResult(
        name="branch continuity at beta=0",
        passed=gap <= 1e-12,
        observed=f"max branch gap {gap:.2e}",
        required="<= 1e-12 for alpha in [-10, 10]",
    ))

    worst0 = 0.0
    for a in alphas:
        s = math.hypot(a, 1.0)
        f0 = (s + a) / (2.0 * s)
        emp = float(np.mean(a * v > gauss))
        se = math.sqrt(max(f0 * (1.0 - f0), 1e-12) / mc_draws)
        worst0 = max(worst0, abs(f0 - emp) / se)
    checks.append(CheckResult(
        name="F(0) identity vs Monte Carlo",
        passed=worst0 <= 4.0,
        observed=f"max deviation {worst0:.3f} standard errors",
        required="<= 4 standard errors",
    ))

    dense_a = np.linspace(-6.0, 6.0, 41)
    dense_b = np.linspace(-3.0, 3.0, 41)
    vals = np.array([[theory.rayleigh_normal_cdf(a, bt) for bt in dense_b] for a in dense_a])
    in_range = bool(np.all(vals >= 0.0) and np.all(vals <= 1.0))
    mono_a = bool(np.all(np.diff(vals, axis=0) >= -1e-12))
    mono_b = bool(np.all(np.diff(vals, axis=1) >= -1e-12))
    checks.append(CheckResult(
        name="rayleigh_normal_cdf range and monotonicity",
        passed=in_range and mono_a and mono_b,
        observed=f"in [0,1]: {in_range}, nondecreasing in alpha: {mono_a}, in beta: {mono_b}",
        required="all true on a 41x41 grid",
    ))
    return checks


def _geometry_checks(seed: int, num_h: int, num_a: int) -> list:
    checks = []
    stream = RngStream(seed, 2)
    g = stream.generator
    n = 8

    ok = True
    for delta in (0.1, 0.5, 0.9):
        xs = sample_complex_gaussian(n, stream)
        ctx = theory.GeometryContext(xstar=xs, delta=delta, t=1.0)
        for _ in range(200):
            y = sample_complex_gaussian(n, stream)
            if theory.in_C_delta(y, ctx) and not theory.in_Cprime_delta(y, ctx):
                ok = False
    checks.append(CheckResult(
        name="C_delta contained in Cprime_delta",
        passed=ok,
        observed="implication held on all samples" if ok else "counterexample found",
        required="no counterexample over 600 random vectors",
    ))

    xs = sample_complex_gaussian(n, stream)
    xs = xs / np.linalg.norm(xs)
    ctx = theory.GeometryContext(xstar=xs, delta=0.6, t=1.0)
    projector = np.eye(n) - np.outer(xs, xs.conj())
    ok_r = True
    ok_c = True
    for _ in range(500):
        h = sample_complex_gaussian(n, stream) * g.uniform(0.01, 3.0)
        overlap = np.vdot(xs, h)
        lhs = np.linalg.norm(projector @ h)
        if theory.in_R_delta(h, ctx) != (lhs >= ctx.delta * abs(overlap.imag)):
            ok_r = False
        resid = projector @ h
        rhs = -math.sqrt(1.0 - ctx.delta**2) * np.linalg.norm(resid)
        if theory.in_Cprime_delta(h, ctx) != (ctx.delta * overlap.real >= rhs):
            ok_c = False
    checks.append(CheckResult(
        name="R_delta and Cprime_delta vs explicit projector",
        passed=ok_r and ok_c,
        observed=f"R_delta agreement: {ok_r}, Cprime agreement: {ok_c}",
        required="exact agreement on 500 random directions",
    ))

    delta, t, eta_inv = 0.9, 10.0, 1e-3
    xs = sample_complex_gaussian(n, stream)
    ctx = theory.GeometryContext(xstar=xs, delta=delta, t=t, eta_inv=eta_inv)
    pmin_emp = theory.empirical_pmin(ctx, num_h=num_h, num_a=num_a, rng=stream)
    bound = theory.pmin_lower_bound(delta, t)
    se = math.sqrt(max(pmin_emp * (1.0 - pmin_emp), 1.0 / num_a) / num_a)
    ok_pmin = pmin_emp >= bound - 4.0 * se
    checks.append(CheckResult(
        name="empirical pmin dominates closed-form lower bound",
        passed=ok_pmin,
        observed=f"min estimate {pmin_emp:.3e} vs bound {bound:.3e} (se {se:.1e})",
        required=f"min over {num_h} directions >= bound - 4 standard errors",
    ))
    return checks


def _vc_checks() -> list:
    checks = []
    ok = theory.sauer_bound(4, 2) == 11
    worst_pair = None
    for n in range(4, 65, 4):
        for d in range(2, 9):
            if n <= d:
                continue
            if theory.sauer_bound(n, d) > theory.sauer_bound_loose(n, d):
                ok = False
                worst_pair = (n, d)
    for n in (1, 2, 3):
        if theory.sauer_bound(n, 4) != 2**n:
            ok = False
    checks.append(CheckResult(
        name="shatter-coefficient bounds (binomial sum vs relaxation)",
        passed=ok,
        observed="relaxation dominated the sharp bound on the whole grid" if ok
        else f"violated at {worst_pair}",
        required="sauer_bound(n,d) <= (en/d)^d for n > d; 2^n when n <= d; spot value 11 at (4,2)",
    ))

    ok_dev = abs(theory.vc_deviation_bound(100, 7.5, 0.0) - 60.0) <= 1e-12
    b1 = theory.vc_deviation_bound(500, 123.0, 0.2)
    b2 = theory.vc_deviation_bound(1000, 123.0, 0.2)
    ratio = b2 / b1
    expect = math.exp(-500 * 0.04 / 8.0)
    ok_dev = ok_dev and abs(ratio - expect) <= 1e-12 * expect
    checks.append(CheckResult(
        name="deviation bound structure (t=0 value, doubling law)",
        passed=ok_dev,
        observed=f"t=0 gives 8*shatter; doubling ratio {ratio:.6e} vs {expect:.6e}",
        required="exact within 1e-12 relative",
    ))

    ok_sc = True
    worst_margin = math.inf
    for p in (0.01, 0.05, 0.3):
        for n_dim in (10, 500):
            for eps in (0.1, 0.01):
                m = theory.sample_complexity(p, n_dim, eps)
                lhs = (16 * n_dim * math.log(math.e * m / (2 * n_dim))
                       + 8 * math.log(8 / eps)) / m
                worst_margin = min(worst_margin, p * p - lhs)
                if lhs >= p * p:
                    ok_sc = False
    checks.append(CheckResult(
        name="sample-complexity proof inequality",
        passed=ok_sc,
        observed=f"worst margin p^2 - lhs = {worst_margin:.3e}",
        required="(16N log(eM/2N) + 8 log(8/eps))/M < p^2 at every grid point",
    ))
    return checks


def run_verify(
    suite: str = "all",
    seed: int = 0,
    mc_draws: int = 1_000_000,
    num_h: int = 200,
    num_a: int = 100_000,
) -> VerifyReport:
    """Run the selected verification suite and report per-check status.

    Failures are reported in the result, never raised. The report text is
    deterministic for a fixed (suite, seed, scale) so repeated runs can be
    compared verbatim.
    """
    if suite not in ("closed-forms", "geometry", "vc", "all"):
        raise ValueError(f"unknown suite {suite!r}")
    checks = []
    if suite in ("closed-forms", "all"):
        checks.extend(_closed_form_checks(seed, mc_draws))
    if suite in ("geometry", "all"):
        checks.extend(_geometry_checks(seed, num_h, num_a))
    if suite in ("vc", "all"):
        checks.extend(_vc_checks())
    return VerifyReport(suite=suite, seed=seed, checks=tuple(checks))
