"""Smooth spectral counting via the twisted trace formula, and its limit variance.

Fourier convention: psi_hat(u) = (1/2pi) * integral psi(x) e^(-ixu) dx and
psi(r) = integral psi_hat(u) e^(iru) du (no 2pi on the inverse). With
h(r) = psi(L(r - alpha)) + psi(L(r + alpha)) this gives
h_hat(u) = 2 cos(alpha u) psi_hat(u / L) / L, which every formula below
assumes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np
from scipy import integrate

from .covers import HomSample, divisor_count, vcov_limit
from .fuchsian import GeodesicTable, encode
from .kernels import impl as _k

# -- test functions ----------------------------------------------------------

# composite Gauss-Legendre rule on [0, 1] used for vectorised psi
_GL_PANELS = 64
_GL_ORDER = 32


def _bump(u, s=1.0):
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    m = np.abs(u) < 1.0
    out[m] = np.exp(-s / (1.0 - u[m] ** 2))
    return out


@dataclass(frozen=True, eq=False)
class TestFunction:
    """Even, nonnegative psi_hat supported in [-1, 1], with psi its inverse transform."""
    psi_hat: Callable[[np.ndarray], np.ndarray]
    name: str = "bump"

    __test__ = False        # keep pytest from collecting this class

    def __call__(self, u):
        return self.psi_hat(u)

    @cached_property
    def _gl(self):
        x, w = np.polynomial.legendre.leggauss(_GL_ORDER)
        edges = np.linspace(0.0, 1.0, _GL_PANELS + 1)
        a, b = edges[:-1, None], edges[1:, None]
        nodes = (0.5 * (b - a) * x + 0.5 * (a + b)).ravel()
        weights = (0.5 * (b - a) * w).ravel()
        return nodes, weights * self.psi_hat(nodes)

    @property
    def is_zero(self) -> bool:
        return not np.any(self._gl[1])

    def psi(self, r) -> np.ndarray:
        """Vectorised psi(r) = 2 * integral_0^1 psi_hat(u) cos(ru) du."""
        nodes, wts = self._gl
        r = np.asarray(r, dtype=float)
        flat = r.ravel()
        out = np.empty_like(flat)
        for s in range(0, len(flat), 4096):
            out[s:s + 4096] = 2.0 * np.cos(np.outer(flat[s:s + 4096], nodes)) @ wts
        return out.reshape(r.shape)

    @cached_property
    def decay_radius(self) -> float:
        """|r| beyond which |psi| stays below 1e-14 * psi(0).

        Scans forward in blocks of width 50 and stops at the first block
        whose maximum is under the threshold (further out the vectorised
        rule only returns rounding noise).
        """
        peak = abs(float(self.psi(0.0)))
        if peak == 0:
            return 0.0
        for start in np.arange(0.0, 4000.0, 50.0):
            block = np.abs(self.psi(np.arange(start, start + 50.0, 0.1)))
            if block.max() < 1e-14 * peak:
                return float(start)
        return 4000.0


def bump(s: float = 1.0) -> TestFunction:
    """psi_hat(u) = exp(-s / (1 - u^2)) on (-1, 1), zero outside."""
    if s <= 0:
        raise ValueError("bump sharpness must be positive")
    return TestFunction(lambda u: _bump(u, s), name=f"bump:{s:g}")


def zero_function() -> TestFunction:
    return TestFunction(lambda u: np.zeros_like(np.asarray(u, dtype=float)), name="zero")


def parse_test_function(text: str) -> TestFunction:
    """``bump`` (default), ``bump:s`` or ``zero``."""
    kind, _, arg = text.partition(":")
    if kind == "bump":
        return bump(float(arg) if arg else 1.0)
    if kind == "zero":
        return zero_function()
    raise ValueError(f"unknown test function {text!r}")


DEFAULT_TF = bump()


@dataclass(frozen=True)
class Window:
    alpha: float
    L: float

    def __post_init__(self):
        if self.alpha < 0 or self.L <= 0:
            raise ValueError("need alpha >= 0 and L > 0")


def psi_value(tf: TestFunction, r: float) -> float:
    """psi(r) by adaptive cosine-weighted quadrature (absolute tolerance 1e-10 or better)."""
    r = abs(float(r))
    f = lambda u: float(tf.psi_hat(np.array(u)))
    if r == 0.0:
        val, _ = integrate.quad(f, 0.0, 1.0, epsabs=1e-13, epsrel=1e-13, limit=200)
    else:
        val, _ = integrate.quad(f, 0.0, 1.0, weight="cos", wvar=r, epsabs=1e-13, epsrel=1e-13, limit=200)
    return 2.0 * val


def psi_value_trapezoid(tf: TestFunction, r: float, points: int = 200_001) -> float:
    """Independent check: trapezoid sum of psi_hat(u) e^(iru) on a uniform grid over [-1, 1]."""
    u = np.linspace(-1.0, 1.0, points)
    vals = tf.psi_hat(u) * np.exp(1j * r * u)
    return float(integrate.trapezoid(vals, u).real)


# -- Weyl term ---------------------------------------------------------------

def _weyl_integral(tf: TestFunction, alpha: float, L: float) -> float:
    """integral over R of h(r) r tanh(pi r) dr, h(r) = psi(L(r-alpha)) + psi(L(r+alpha))."""
    S = tf.decay_radius
    if S == 0:
        return 0.0

    def g(s):
        r = alpha + s / L
        return float(tf.psi(s)) * r * math.tanh(math.pi * r)

    edges = np.arange(-S, S + 5.0, 5.0)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        v, _ = integrate.quad(g, a, b, epsabs=1e-13, epsrel=1e-12, limit=100)
        total += v
    # h is even and r tanh(pi r) is even, so both shifts contribute equally
    return 2.0 * total / L


def weyl_term(tf: TestFunction, window: Window, genus: int = 2, n: int = 1, dimV: int = 1) -> float:
    """(g-1) n dimV integral h(r) r tanh(pi r) dr."""
    return (genus - 1) * n * dimV * _weyl_integral(tf, window.alpha, window.L)


def weyl_term_bruteforce(tf: TestFunction, window: Window, genus: int = 2, n: int = 1, dimV: int = 1,
                         nu: int = 2001, dr: float = 0.004) -> float:
    """Independent check: tensor trapezoid over (r, u) of psi_hat(u) cos(L(r-alpha)u) r tanh(pi r)."""
    alpha, L = window.alpha, window.L
    S = tf.decay_radius / L
    u = np.linspace(-1.0, 1.0, nu)
    wu = np.full(nu, u[1] - u[0])
    wu[[0, -1]] *= 0.5
    ph = tf.psi_hat(u) * wu
    total = 0.0
    r_all = np.arange(alpha - S, alpha + S + dr, dr)
    for s in range(0, len(r_all), 2000):
        r = r_all[s:s + 2000]
        psi = np.cos(np.outer(L * (r - alpha), u)) @ ph
        total += float(np.sum(psi * r * np.tanh(math.pi * r))) * dr
    return (genus - 1) * n * dimV * 2.0 * total


# -- geometric side ----------------------------------------------------------

def _class_traces(table: GeodesicTable, char, kmax: int, upto: float) -> np.ndarray:
    """``char`` is anything with ``trace(word, k)`` and ``dim`` (reps.CharacterSpec).

    Returns chi(gamma^k) for classes with length <= upto, k = 1..kmax."""
    m = int(np.searchsorted(table.lengths, upto, side="right"))
    out = np.empty((m, kmax), dtype=complex)
    for i in range(m):
        w = table.classes[i].canonical_word
        for k in range(1, kmax + 1):
            out[i, k - 1] = char.trace(w, k)
    return out


def _check_cutoff(table: GeodesicTable, L: float):
    if table.cutoff < L - 1e-12:
        raise ValueError(f"table cutoff {table.cutoff} < L={L}")


def geometric_sum(table: GeodesicTable, char, hom: HomSample | str, window: Window,
                  tf: TestFunction = DEFAULT_TF, *, return_imag: bool = False):
    """(2/L) sum_P sum_k chi(g^k) F(g^k) l psi_hat(kl/L) cos(alpha k l) / (2 sinh(kl/2)).

    ``hom="limit"`` replaces F(g^k) by its large-n mean d(k).
    """
    L, alpha = window.L, window.alpha
    _check_cutoff(table, L)
    lengths = table.lengths
    m = int(np.searchsorted(lengths, L, side="right"))
    if m == 0:
        return (0.0, 0.0) if return_imag else 0.0
    kmax = int(math.floor(L / lengths[0] + 1e-12))
    chi = _class_traces(table, char, kmax, L)
    ell = lengths[:m]
    k = np.arange(1, kmax + 1)
    kl = np.outer(ell, k)
    weight = ell[:, None] * tf.psi_hat(kl / L) * np.cos(alpha * kl) / (2.0 * np.sinh(kl / 2.0))
    if isinstance(hom, str):
        if hom != "limit":
            raise ValueError("hom must be a HomSample or 'limit'")
        F = np.array([divisor_count(int(j)) for j in k], dtype=float)[None, :]
    else:
        words = [encode(table.classes[i].canonical_word) for i in range(m)]
        F = _k.fixed_point_counts(hom.letter_images[None], words, kmax)[0].astype(float)
    terms = chi * F * weight
    total = math.fsum(terms.real.ravel()), math.fsum(terms.imag.ravel())
    val = (2.0 / L) * total[0]
    if return_imag:
        return val, (2.0 / L) * total[1]
    return val


def geometric_sums_batch(table: GeodesicTable, char, perms: np.ndarray, window: Window,
                         tf: TestFunction = DEFAULT_TF) -> np.ndarray:
    """geometric_sum for many covers at once; ``perms`` is (M, 4g, n) letter images."""
    L, alpha = window.L, window.alpha
    _check_cutoff(table, L)
    lengths = table.lengths
    m = int(np.searchsorted(lengths, L, side="right"))
    if m == 0:
        return np.zeros(len(perms))
    kmax = int(math.floor(L / lengths[0] + 1e-12))
    chi = _class_traces(table, char, kmax, L)
    ell = lengths[:m]
    kl = np.outer(ell, np.arange(1, kmax + 1))
    weight = ell[:, None] * tf.psi_hat(kl / L) * np.cos(alpha * kl) / (2.0 * np.sinh(kl / 2.0))
    words = [encode(table.classes[i].canonical_word) for i in range(m)]
    F = _k.fixed_point_counts(perms, words, kmax).astype(float)
    return (2.0 / L) * np.einsum("mik,ik->m", F, (chi * weight).real)


def smooth_count(table: GeodesicTable, char, hom: HomSample | str, window: Window,
                 tf: TestFunction = DEFAULT_TF, *, genus: int = 2, n: int | None = None) -> float:
    """Weyl term plus geometric sum for the degree-n cover twisted by ``char``."""
    if n is None:
        if isinstance(hom, str):
            raise ValueError("n required in limit mode")
        n = hom.n
    return weyl_term(tf, window, genus, n, char.dim) + geometric_sum(table, char, hom, window, tf)


# -- variance ----------------------------------------------------------------

def _g_table(table: GeodesicTable, char, window: Window, tf: TestFunction, kmax: int) -> np.ndarray:
    """G_k(gamma) over P0 representatives with length <= L, k = 1..kmax."""
    L, alpha = window.L, window.alpha
    m = int(np.searchsorted(table.lengths, L, side="right"))
    idx = np.flatnonzero(table.p0_mask[:m])
    ell = table.lengths[idx]
    chi = np.empty((len(idx), kmax), dtype=complex)
    for j, i in enumerate(idx):
        w = table.classes[i].canonical_word
        for k in range(1, kmax + 1):
            chi[j, k - 1] = char.trace(w, k)
    kl = np.outer(ell, np.arange(1, kmax + 1))
    return ((chi + chi.conj()) * np.cos(alpha * kl) * ell[:, None]
            * tf.psi_hat(kl / L) / (2.0 * np.sinh(kl / 2.0)))


def pair_sum(table: GeodesicTable, char, k1: int, k2: int, window: Window,
             tf: TestFunction = DEFAULT_TF) -> float:
    """S_{k1,k2}(L) = sum over P0 of G_k1 conj(G_k2)."""
    _check_cutoff(table, window.L)
    G = _g_table(table, char, window, tf, max(k1, k2))
    if G.size == 0:
        return 0.0
    return float(math.fsum((G[:, k1 - 1] * G[:, k2 - 1].conj()).real))


@dataclass(frozen=True)
class VarianceTerms:
    L: float
    alpha: float
    kmax: int
    cutoff: float
    S_table: np.ndarray          # S_{k1,k2}, 1-indexed as [k1-1, k2-1]
    S: float                     # (4/L^2) sum V(k1,k2) S_{k1,k2}
    S11: float
    S_NP: float                  # sum over (k1,k2) != (1,1) of V(k1,k2) S_{k1,k2}

    @property
    def np_ratio(self) -> float:
        return self.S_NP / self.S11 if self.S11 else float("nan")


def limit_variance(table: GeodesicTable, char, window: Window,
                   tf: TestFunction = DEFAULT_TF, kmax: int | None = None) -> VarianceTerms:
    """Large-n variance of the geometric sum, with K_max = floor(L / systole)."""
    L = window.L
    if window.alpha <= 0:
        raise ValueError("variance pipeline requires alpha > 0")
    _check_cutoff(table, L)
    if len(table) == 0 or table.lengths[0] > L:
        return VarianceTerms(L, window.alpha, 0, table.cutoff, np.zeros((0, 0)), 0.0, 0.0, 0.0)
    if kmax is None:
        kmax = int(math.floor(L / table.lengths[0] + 1e-12))
    G = _g_table(table, char, window, tf, kmax)
    St = (G.T @ G.conj()).real
    V = np.array([[vcov_limit(i, j) for j in range(1, kmax + 1)] for i in range(1, kmax + 1)])
    total = float(math.fsum((V * St).ravel()))
    S11 = float(St[0, 0])
    S_NP = total - S11
    return VarianceTerms(L, window.alpha, kmax, table.cutoff, St, 4.0 / L**2 * total, S11, S_NP)


def goe_sigma2(tf: TestFunction = DEFAULT_TF) -> float:
    """2 * integral |x| psi_hat(x)^2 dx = 4 * integral_0^1 u psi_hat(u)^2 du."""
    val, _ = integrate.quad(lambda u: u * float(tf.psi_hat(np.array(u))) ** 2, 0.0, 1.0,
                            epsabs=1e-14, epsrel=1e-13, limit=200)
    return 4.0 * val


def gue_sigma2(tf: TestFunction = DEFAULT_TF) -> float:
    return 0.5 * goe_sigma2(tf)


def goe_sigma2_simpson(tf: TestFunction = DEFAULT_TF, points: int = 200_001) -> float:
    """Independent check: composite Simpson rule on [-1, 1]."""
    x = np.linspace(-1.0, 1.0, points)
    return 2.0 * float(integrate.simpson(np.abs(x) * tf.psi_hat(x) ** 2, x=x))


# -- equidistribution --------------------------------------------------------

@dataclass(frozen=True)
class Equi1Result:
    S_T: float
    predicted: float
    ratio: float
    defined: bool


def equi1_prediction(tf: TestFunction, T: float, kappa: float, alpha: float) -> float:
    """(kappa T^2 / 2) integral_0^inf u psi_hat(u)^2 du, doubled when alpha = 0."""
    val, _ = integrate.quad(lambda u: u * float(tf.psi_hat(np.array(u))) ** 2, 0.0, 1.0,
                            epsabs=1e-14, epsrel=1e-13, limit=200)
    base = 0.5 * kappa * T * T * val
    return 2.0 * base if alpha == 0 else base


def equi1_check(table: GeodesicTable, char, alpha: float, tf: TestFunction, T: float,
                kappa: float | None = None) -> Equi1Result:
    """Weighted sum over P0 of (chi + conj chi)^2 cos^2(alpha l) g(l) psi_hat(l/T)^2.

    g(x) = x^2 / (4 sinh^2(x/2)); kappa defaults to 2 for orientation-symmetric
    characters and 1 otherwise.
    """
    _check_cutoff(table, T)
    if kappa is None:
        kappa = 2.0 if char.orientation_symmetric else 1.0
    m = int(np.searchsorted(table.lengths, T, side="right"))
    idx = np.flatnonzero(table.p0_mask[:m])
    ell = table.lengths[idx]
    chi = np.array([char.trace(table.classes[i].canonical_word, 1) for i in idx], dtype=complex)
    a = ((chi + chi.conj()) ** 2).real
    g = ell**2 / (4.0 * np.sinh(ell / 2.0) ** 2)
    terms = a * np.cos(alpha * ell) ** 2 * g * tf.psi_hat(ell / T) ** 2
    S = math.fsum(terms)
    pred = equi1_prediction(tf, T, kappa, alpha)
    if pred == 0:
        return Equi1Result(S, pred, float("nan"), False)
    return Equi1Result(S, pred, S / pred, True)


__all__ = [
    "TestFunction", "Window", "bump", "zero_function", "parse_test_function", "DEFAULT_TF",
    "psi_value", "psi_value_trapezoid", "weyl_term", "weyl_term_bruteforce", "geometric_sum",
    "geometric_sums_batch", "smooth_count", "pair_sum", "limit_variance", "VarianceTerms",
    "goe_sigma2", "gue_sigma2", "goe_sigma2_simpson", "equi1_check", "equi1_prediction",
    "Equi1Result",
]
