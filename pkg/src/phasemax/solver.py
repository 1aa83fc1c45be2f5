"""First-order solver for the anchored relaxation: maximize <a0, x> subject to
|a_i^H x|^2 <= b_i, by primal-dual proximal splitting with disk projections."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product

import numpy as np

from .measurements import MeasurementEnsemble, Observations, operator_norm
from .numerics import RngStream, as_signal, real_inner

__all__ = [
    "SolverConfig",
    "Solution",
    "disk_project",
    "solve_phasemax",
    "feasibility_residual",
    "oracle_solve_small",
]

# Fixed stream for the internal operator-norm estimate so that identical
# inputs and config always produce identical Solutions.
_NORM_EST_SEED = 0x5EED


@dataclass(frozen=True)
class SolverConfig:
    """Iteration controls for the primal-dual splitting.

    step_scale is the fraction of the step-size stability bound: both steps are
    set to step_scale / ||A||, so tau * sigma * ||A||^2 = step_scale^2 < 1.
    """

    max_iters: int = 2000
    tol_rel_change: float = 1e-9
    tol_feas: float = 1e-9
    step_scale: float = 0.95
    norm_est_iters: int = 30

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.tol_rel_change <= 0 or self.tol_feas <= 0:
            raise ValueError("tolerances must be > 0")
        if not 0.0 < self.step_scale < 1.0:
            raise ValueError("step_scale must lie in (0, 1)")
        if self.norm_est_iters < 1:
            raise ValueError("norm_est_iters must be >= 1")


@dataclass(frozen=True)
class Solution:
    """Recovered estimate with residual diagnostics.

    objective is <a0, xhat> (real inner product); feas_residual is the largest
    constraint violation max_i (|a_i^H xhat|^2 - b_i)_+.
    """

    xhat: np.ndarray
    iters_used: int
    objective: float
    feas_residual: float
    converged: bool


def disk_project(z: complex, r: float) -> complex:
    """Project the complex scalar z onto the disk {w : |w| <= r}.

    Radial shrinkage: the phase of z is preserved and only the modulus is
    clipped; r = 0 maps everything to 0.
    """
    if r < 0:
        raise ValueError("radius must be >= 0")
    mag = abs(z)
    if mag <= r:
        return z
    if r == 0.0:
        return 0.0 + 0.0j
    return z * (r / mag)


def _disk_project_vector(z: np.ndarray, radii: np.ndarray) -> np.ndarray:
    """Entrywise disk projection for a complex vector."""
    mag = np.abs(z)
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(mag > radii, radii / np.where(mag > 0, mag, 1.0), 1.0)
    return z * scale


def feasibility_residual(ens: MeasurementEnsemble, obs: Observations, x) -> float:
    """Largest slab violation max_i (|a_i^H x|^2 - b_i)_+ ; zero when x is feasible."""
    b = obs.b
    if b.shape[0] != ens.m:
        raise ValueError(f"observations have length {b.shape[0]}, expected {ens.m}")
    viol = np.abs(ens.forward(x)) ** 2 - b
    return float(max(np.max(viol, initial=0.0), 0.0))


def solve_phasemax(
    ens: MeasurementEnsemble, obs: Observations, a0, cfg: SolverConfig = SolverConfig()
) -> Solution:
    """Solve max <a0, x> s.t. |a_i^H x|^2 <= b_i by primal-dual splitting.

    The slab constraints are reformulated once as disk constraints
    |(Ax)_i| <= sqrt(b_i). With tau = sigma = step_scale / ||A|| the iteration
    from x = y = xbar = 0 is

        y    <- y + sigma * A xbar
        y    <- y - sigma * disk_project(y / sigma, radii)
        x_new <- x + tau * a0 - tau * A^H y
        xbar <- 2 x_new - x

    Stops when the relative primal change drops below tol_rel_change and the
    feasibility residual below tol_feas, or at max_iters. Zero-radius disks
    (b_i = 0, e.g. after gaussian-noise clipping) are kept as constraints
    forcing (Ax)_i toward 0.
    """
    a0 = as_signal(a0, "a0")
    if a0.shape[0] != ens.n:
        raise ValueError(f"a0 has length {a0.shape[0]}, expected {ens.n}")
    if np.linalg.norm(a0) == 0:
        raise ValueError("a0 must be nonzero")
    b = obs.b
    if b.shape[0] != ens.m:
        raise ValueError(f"observations have length {b.shape[0]}, expected {ens.m}")
    if ens.m < 1:
        raise ValueError("at least one constraint is required (program is unbounded)")

    radii = np.sqrt(b)
    op_norm = operator_norm(ens, cfg.norm_est_iters, RngStream(_NORM_EST_SEED))
    if op_norm == 0:
        raise ValueError("measurement operator is identically zero")
    tau = sigma = cfg.step_scale / op_norm

    x = np.zeros(ens.n, dtype=np.complex128)
    y = np.zeros(ens.m, dtype=np.complex128)
    xbar = np.zeros(ens.n, dtype=np.complex128)

    iters_used = cfg.max_iters
    converged = False
    feas = None
    for k in range(cfg.max_iters):
        y = y + sigma * ens.forward(xbar)
        y = y - sigma * _disk_project_vector(y / sigma, radii)
        x_new = x + tau * a0 - tau * ens.adjoint(y)
        step = np.linalg.norm(x_new - x)
        norm_new = np.linalg.norm(x_new)
        rel_change = step / norm_new if norm_new > 0 else step
        xbar = 2.0 * x_new - x
        x = x_new
        if rel_change <= cfg.tol_rel_change:
            feas = feasibility_residual(ens, obs, x)
            if feas <= cfg.tol_feas:
                iters_used = k + 1
                converged = True
                break
    if feas is None or not converged:
        feas = feasibility_residual(ens, obs, x)
    return Solution(
        xhat=x,
        iters_used=iters_used,
        objective=real_inner(a0, x),
        feas_residual=feas,
        converged=converged,
    )


def oracle_solve_small(rows, b, a0, grid_points: int = 501, method: str = "auto") -> np.ndarray:
    """Independent brute-force solver for the real case in dimension n <= 3.

    Maximizes a0 . x over the polytope {x : |rows_i . x| <= sqrt(b_i)} by
    enumerating all vertices formed by n active constraint hyperplanes
    rows_i . x = +/- sqrt(b_i). method="grid" instead searches a dense grid
    with grid_points per axis over a box guaranteed to contain the polytope;
    method="auto" falls back to the grid when enumeration finds no vertex.

    Real-valued data only; used as a test oracle, not in the solve path.
    """
    rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))
    b = np.asarray(b, dtype=np.float64)
    a0 = np.asarray(a0, dtype=np.float64)
    m, n = rows.shape
    if n > 3:
        raise ValueError("oracle supports n <= 3 only")
    if b.shape != (m,) or np.any(b < 0):
        raise ValueError("b must be a non-negative vector with one entry per row")
    if a0.shape != (n,):
        raise ValueError("a0 must have one entry per coordinate")
    if method not in ("auto", "vertex", "grid"):
        raise ValueError(f"unknown method {method!r}")
    if np.linalg.matrix_rank(rows) < n:
        raise ValueError("constraint rows do not span the space; program is unbounded")

    s = np.sqrt(b)
    scale = max(float(np.max(s)), 1.0)
    feas_tol = 1e-9 * scale

    def is_feasible(x):
        return np.all(np.abs(rows @ x) <= s + feas_tol)

    best_x = np.zeros(n)  # the origin is always feasible
    best_val = float(a0 @ best_x)

    if method in ("auto", "vertex"):
        found_vertex = False
        for idx in combinations(range(m), n):
            sub = rows[list(idx)]
            if abs(np.linalg.det(sub)) < 1e-12 * scale:
                continue
            for signs in product((1.0, -1.0), repeat=n):
                rhs = np.asarray(signs) * s[list(idx)]
                x = np.linalg.solve(sub, rhs)
                if is_feasible(x):
                    found_vertex = True
                    val = float(a0 @ x)
                    if val > best_val:
                        best_val, best_x = val, x
        if method == "vertex" or found_vertex:
            return best_x

    if grid_points < 2:
        raise ValueError("grid_points must be >= 2")
    # The polytope is star-shaped around the (always feasible) origin, so each
    # grid point can be scaled radially onto the boundary: the grid then
    # samples exactly feasible points and never overshoots the optimum.
    box = _polytope_box(rows, s)
    axes = [np.linspace(-r, r, grid_points) for r in box]
    for first in axes[0]:
        rest = np.meshgrid(*axes[1:], indexing="ij") if n > 1 else []
        block = np.empty((axes[1].size ** (n - 1) if n > 1 else 1, n))
        block[:, 0] = first
        for j, mg in enumerate(rest):
            block[:, j + 1] = mg.ravel()
        proj = np.abs(block @ rows.T)
        with np.errstate(divide="ignore"):
            ratios = np.where(proj > 0, s[None, :] / np.where(proj > 0, proj, 1.0), np.inf)
        t = np.minimum(ratios.min(axis=1), 1.0)
        snapped = block * t[:, None]
        vals = snapped @ a0
        gi = int(np.argmax(vals))
        if vals[gi] > best_val:
            best_val, best_x = float(vals[gi]), snapped[gi]
    return best_x


def _polytope_box(rows: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Per-coordinate bound on {x : |rows @ x| <= s} via the best-conditioned
    invertible subsystem: |x_j| <= sum_i |inv(A_S)[j, i]| * s_S[i]."""
    m, n = rows.shape
    best_det = 0.0
    best_idx = None
    for idx in combinations(range(m), n):
        det = abs(np.linalg.det(rows[list(idx)]))
        if det > best_det:
            best_det, best_idx = det, idx
    inv = np.linalg.inv(rows[list(best_idx)])
    return np.abs(inv) @ s[list(best_idx)]
