"""Gaussian random-matrix baseline for the smoothed number variance.

Eigenvalues are unfolded with the semicircle CDF to unit mean spacing and
fed into the statistic ``sum_i psi(2 pi (x_i - c) / W)``. Its Fourier
transform is ``W psi_hat(W k)``, supported in ``|k| <= 1/W``, so for
``W >= 1`` the sine-kernel (GUE) variance equals
``integral |u| psi_hat(u)^2 du`` exactly; the 2 pi is the frozen scaling.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import interpolate, linalg, signal

from .rng import stream
from .spectral import TestFunction

BULK_LIMIT = 0.5


@dataclass(frozen=True)
class EnsembleConfig:
    kind: str = "GUE"          # GOE or GUE
    N: int = 800
    M: int = 200
    u0: float = 0.0            # centre in semicircle coordinates (-1, 1)
    W: float = 10.0
    seed: int = 0
    n_centers: int = 7         # statistic evaluated at several bulk centres per draw
    center_spread: float = 0.3 # centres span u0 +- spread
    method: str = "tridiagonal"

    def __post_init__(self):
        if self.kind.upper() not in ("GOE", "GUE"):
            raise ValueError("kind must be GOE or GUE")
        if self.N < 100:
            raise ValueError("N >= 100 required")
        if self.M < 50:
            raise ValueError("M >= 50 required")
        if abs(self.u0) > BULK_LIMIT:
            raise ValueError("|u0| <= 0.5 required (bulk only)")
        if self.W < 1:
            raise ValueError("W >= 1 required")
        if self.method not in ("tridiagonal", "dense"):
            raise ValueError("method must be tridiagonal or dense")

    @property
    def beta(self) -> int:
        return 1 if self.kind.upper() == "GOE" else 2

    @property
    def centers(self) -> np.ndarray:
        if self.n_centers == 1:
            return np.array([self.u0])
        return self.u0 + np.linspace(-self.center_spread, self.center_spread, self.n_centers)


def sample_spectrum(cfg: EnsembleConfig, rng: np.random.Generator) -> np.ndarray:
    """Sorted eigenvalues of one GOE/GUE draw, spectrum filling about [-2 sqrt N, 2 sqrt N].

    GOE: symmetric, off-diagonal variance 1, diagonal variance 2.
    GUE: Hermitian, E|h_ij|^2 = 1, diagonal variance 1.
    The tridiagonal method uses the Dumitriu-Edelman beta-Hermite model,
    which has the same eigenvalue law at O(N^2) cost.
    """
    N = cfg.N
    if cfg.method == "dense":
        if cfg.beta == 1:
            A = rng.standard_normal((N, N))
            H = (A + A.T) / math.sqrt(2)
        else:
            A = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
            H = (A + A.conj().T) / 2
        return np.linalg.eigvalsh(H)
    beta = cfg.beta
    diag = rng.standard_normal(N) * math.sqrt(2)
    off = np.sqrt(rng.chisquare(beta * np.arange(N - 1, 0, -1)))
    ev = linalg.eigvalsh_tridiagonal(diag, off)
    # beta-Hermite with density exp(-sum x^2 / 2) after the 1/sqrt 2; GOE
    # above has exp(-sum x^2 / 4), so only the beta = 2 case is rescaled
    return ev / math.sqrt(2) if beta == 2 else ev


def semicircle_cdf(t) -> np.ndarray:
    t = np.clip(np.asarray(t, dtype=float), -1.0, 1.0)
    return 0.5 + (t * np.sqrt(1.0 - t * t) + np.arcsin(t)) / math.pi


def unfold(eigenvalues: np.ndarray, N: int) -> np.ndarray:
    """x_i = N F_sc(lambda_i / (2 sqrt N))."""
    return N * semicircle_cdf(np.asarray(eigenvalues) / (2.0 * math.sqrt(N)))


def _psi_table(tf: TestFunction, step: float = 0.01):
    """Cubic spline of the even function psi on [0, decay radius], zero beyond."""
    R = max(tf.decay_radius, 1.0)
    r = np.arange(0.0, R + step, step)
    spline = interpolate.CubicSpline(r, tf.psi(r))

    def f(t):
        a = np.abs(t)
        return np.where(a <= R, spline(np.minimum(a, R)), 0.0)
    return f


def _statistic(psi, x: np.ndarray, c: float, W: float) -> float:
    return float(np.sum(psi(2.0 * math.pi * (x - c) / W)))


def _check_window(cfg: EnsembleConfig, tf: TestFunction):
    """Statistic weight at the bulk boundary must be negligible."""
    peak = abs(float(tf.psi(0.0)))
    if peak == 0:
        return
    for u in cfg.centers:
        if abs(u) > BULK_LIMIT:
            raise ValueError("statistic centre outside the bulk")
        c = cfg.N * semicircle_cdf(u)
        gap = min(c - cfg.N * semicircle_cdf(-0.9), cfg.N * semicircle_cdf(0.9) - c)
        r = 2.0 * math.pi * np.arange(gap, gap + 50.0) / cfg.W
        if np.abs(tf.psi(r)).max() > 1e-6 * peak:
            raise ValueError("smoothing window reaches the spectral edge; lower W or raise N")


def smoothed_count_variance(cfg: EnsembleConfig, tf: TestFunction) -> tuple[float, float]:
    """(variance, SE) of the smoothed count over M draws.

    Each centre gets its own mean; the variance estimate pools the centres
    and the SE comes from the per-draw averages, so within-draw correlation
    between centres is accounted for.
    """
    _check_window(cfg, tf)
    centers = cfg.N * semicircle_cdf(cfg.centers)
    psi = _psi_table(tf)
    vals = np.empty((cfg.M, len(centers)))
    for m in range(cfg.M):
        x = unfold(sample_spectrum(cfg, stream(cfg.seed, m)), cfg.N)
        for j, c in enumerate(centers):
            vals[m, j] = _statistic(psi, x, c, cfg.W)
    dev2 = (vals - vals.mean(axis=0)) ** 2 * cfg.M / (cfg.M - 1)
    per_draw = dev2.mean(axis=1)
    return float(per_draw.mean()), float(per_draw.std(ddof=1) / math.sqrt(cfg.M))


def sine_kernel_variance(tf: TestFunction, W: float = 10.0, h: float = 0.02) -> float:
    """GUE limit variance of sum f(x_i), f(x) = psi(2 pi x / W), in real space.

    Var = integral f^2 - integral R(s) (sin(pi s) / (pi s))^2 ds with
    R(s) = integral f(x) f(x + s) dx, evaluated on a uniform grid.
    """
    X = tf.decay_radius * W / (2.0 * math.pi)
    if X == 0:
        return 0.0
    x = np.arange(-X, X + h, h)
    f = tf.psi(2.0 * math.pi * x / W)
    R = signal.fftconvolve(f, f[::-1]) * h
    s = (np.arange(len(R)) - (len(x) - 1)) * h
    K2 = np.sinc(s) ** 2
    return float(np.sum(f * f) * h - np.sum(R * K2) * h)


__all__ = ["EnsembleConfig", "sample_spectrum", "semicircle_cdf", "unfold",
           "smoothed_count_variance", "sine_kernel_variance"]
