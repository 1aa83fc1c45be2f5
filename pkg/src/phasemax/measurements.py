"""Measurement ensembles (dense rows and coded diffraction patterns), the noisy
squared-magnitude observation process, and operator-norm estimation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .numerics import RngStream, as_signal, sample_complex_gaussian, sample_rademacher

__all__ = [
    "MeasurementEnsemble",
    "DenseEnsemble",
    "CodedDiffractionEnsemble",
    "NoiseModel",
    "Observations",
    "observe",
    "operator_norm",
]


class MeasurementEnsemble:
    """Linear map A: C^n -> C^m with entries (Ax)_i = a_i^H x.

    Subclasses provide matching forward/adjoint pairs; both are pure and an
    ensemble is immutable after construction, so one instance may be shared
    across concurrent solves.
    """

    kind: str
    n: int
    m: int

    def forward(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def adjoint(self, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _check_forward_arg(self, x) -> np.ndarray:
        arr = as_signal(x, "x")
        if arr.shape[0] != self.n:
            raise ValueError(f"expected length {self.n}, got {arr.shape[0]}")
        return arr

    def _check_adjoint_arg(self, z) -> np.ndarray:
        arr = as_signal(z, "z")
        if arr.shape[0] != self.m:
            raise ValueError(f"expected length {self.m}, got {arr.shape[0]}")
        return arr


class DenseEnsemble(MeasurementEnsemble):
    """Explicitly stored measurement vectors a_i (one per row)."""

    kind = "dense-gaussian"

    def __init__(self, rows):
        rows = np.atleast_2d(np.asarray(rows, dtype=np.complex128))
        if rows.ndim != 2 or rows.shape[0] < 1:
            raise ValueError("rows must be a nonempty (m, n) array")
        if not np.all(np.isfinite(rows.real)) or not np.all(np.isfinite(rows.imag)):
            raise ValueError("rows contain non-finite entries")
        self.rows = rows
        self.m, self.n = rows.shape
        self._rows_conj = rows.conj()

    @classmethod
    def gaussian(cls, n: int, m: int, rng: RngStream) -> "DenseEnsemble":
        """Sample m i.i.d. rows with Normal(0, 1/2) + i Normal(0, 1/2) entries."""
        if n < 1 or m < 1:
            raise ValueError("n and m must be >= 1")
        g = rng.generator
        scale = np.sqrt(0.5)
        rows = scale * (g.standard_normal((m, n)) + 1j * g.standard_normal((m, n)))
        return cls(rows)

    def forward(self, x) -> np.ndarray:
        x = self._check_forward_arg(x)
        return self._rows_conj @ x

    def adjoint(self, z) -> np.ndarray:
        z = self._check_adjoint_arg(z)
        return self.rows.T @ z


class CodedDiffractionEnsemble(MeasurementEnsemble):
    """Masked-Fourier measurements a_i = f_k o phi_l for mask vectors phi_l.

    Block l of the forward map is the unitary DFT of phi_l o x; blocks are
    concatenated mask-major, so m = L*n exactly. Only the masks are stored and
    each application costs L FFTs.
    """

    kind = "coded-diffraction"

    def __init__(self, masks):
        masks = np.atleast_2d(np.asarray(masks, dtype=np.complex128))
        if masks.ndim != 2 or masks.shape[0] < 1:
            raise ValueError("masks must be a nonempty (L, n) array")
        if not np.all(np.isfinite(masks.real)) or not np.all(np.isfinite(masks.imag)):
            raise ValueError("masks contain non-finite entries")
        self.masks = masks
        self.num_masks, self.n = masks.shape
        self.m = self.num_masks * self.n

    @classmethod
    def rademacher(cls, n: int, num_masks: int, rng: RngStream) -> "CodedDiffractionEnsemble":
        """Sample num_masks independent +/-1 modulation patterns of length n."""
        if n < 1 or num_masks < 1:
            raise ValueError("n and num_masks must be >= 1")
        masks = np.stack([sample_rademacher(n, rng) for _ in range(num_masks)])
        return cls(masks)

    def forward(self, x) -> np.ndarray:
        x = self._check_forward_arg(x)
        blocks = np.fft.fft(self.masks * x[None, :], axis=1, norm="ortho")
        return blocks.ravel()

    def adjoint(self, z) -> np.ndarray:
        z = self._check_adjoint_arg(z)
        blocks = z.reshape(self.num_masks, self.n)
        return (self.masks.conj() * np.fft.ifft(blocks, axis=1, norm="ortho")).sum(axis=0)


@dataclass(frozen=True)
class NoiseModel:
    """Additive noise on the squared-magnitude measurements.

    kind "none": no noise. kind "uniform": i.i.d. Uniform([0, eta_inv]), which
    is non-negative by construction. kind "gaussian": i.i.d. Normal(0, sigma^2)
    with any resulting negative measurement clipped to zero.
    """

    kind: str
    eta_inv: float = 0.0
    sigma: float = 0.0

    def __post_init__(self):
        if self.kind not in ("none", "uniform", "gaussian"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.kind == "uniform" and self.eta_inv < 0:
            raise ValueError("uniform noise requires eta_inv >= 0")
        if self.kind == "gaussian" and self.sigma <= 0:
            raise ValueError("gaussian noise requires sigma > 0")

    @classmethod
    def none(cls) -> "NoiseModel":
        return cls("none")

    @classmethod
    def uniform(cls, eta_inv: float) -> "NoiseModel":
        return cls("uniform", eta_inv=float(eta_inv))

    @classmethod
    def gaussian(cls, sigma: float) -> "NoiseModel":
        return cls("gaussian", sigma=float(sigma))


@dataclass(frozen=True)
class Observations:
    """Vector b of m non-negative squared-magnitude measurements plus noise metadata."""

    b: np.ndarray
    noise: NoiseModel
    snr_db: Optional[float] = None

    def __post_init__(self):
        b = np.asarray(self.b, dtype=np.float64)
        if b.ndim != 1 or b.size < 1:
            raise ValueError("b must be a nonempty 1-D real vector")
        if not np.all(np.isfinite(b)):
            raise ValueError("b contains non-finite entries")
        if np.any(b < 0):
            raise ValueError("b must be entrywise non-negative")
        object.__setattr__(self, "b", b)

    def __len__(self):
        return self.b.shape[0]


def observe(ens: MeasurementEnsemble, xstar, noise: NoiseModel, rng: RngStream) -> Observations:
    """Measure b_i = |a_i^H xstar|^2 + xi_i with xi drawn from the noise model.

    Gaussian noise can produce negative values; those are clipped to zero at
    observation time. For gaussian noise the input SNR
    10*log10(||xstar||^4 / sigma^2) is recorded on the result.
    """
    xs = as_signal(xstar, "xstar")
    clean = np.abs(ens.forward(xs)) ** 2
    snr_db = None
    if noise.kind == "none":
        b = clean
    elif noise.kind == "uniform":
        b = clean + rng.generator.uniform(0.0, noise.eta_inv, size=ens.m)
    else:
        b = clean + noise.sigma * rng.generator.standard_normal(ens.m)
        np.maximum(b, 0.0, out=b)
        energy = float(np.sum(np.abs(xs) ** 2))
        if energy > 0:
            snr_db = 10.0 * np.log10(energy**2 / noise.sigma**2)
    return Observations(b=b, noise=noise, snr_db=snr_db)


def operator_norm(ens: MeasurementEnsemble, iters: int, rng: RngStream) -> float:
    """Estimate ||A|| (largest singular value) by power iteration on A^H A.

    Runs `iters` iterations from a random complex start and reports
    ||A v|| for the final unit iterate v.
    """
    if iters < 1:
        raise ValueError("iters must be >= 1")
    v = sample_complex_gaussian(ens.n, rng)
    nv = np.linalg.norm(v)
    if nv == 0:
        v = np.ones(ens.n, dtype=np.complex128)
        nv = np.linalg.norm(v)
    v = v / nv
    for _ in range(iters):
        w = ens.adjoint(ens.forward(v))
        nw = np.linalg.norm(w)
        if nw == 0:
            return 0.0
        v = w / nw
    return float(np.linalg.norm(ens.forward(v)))
