import math

import numpy as np
import pytest
from scipy import integrate

from speclab import rmt, spectral as sp
from speclab.rng import stream

TF = sp.DEFAULT_TF


def test_config_guards():
    with pytest.raises(ValueError):
        rmt.EnsembleConfig(N=50)
    with pytest.raises(ValueError):
        rmt.EnsembleConfig(u0=0.7)
    with pytest.raises(ValueError):
        rmt.EnsembleConfig(M=10)
    with pytest.raises(ValueError):
        rmt.EnsembleConfig(kind="CUE")


@pytest.mark.parametrize("kind", ["GOE", "GUE"])
@pytest.mark.parametrize("method", ["dense", "tridiagonal"])
def test_spectrum_basic(kind, method):
    cfg = rmt.EnsembleConfig(kind=kind, N=200, M=50, method=method)
    ev = rmt.sample_spectrum(cfg, stream(1, 0))
    assert len(ev) == 200 and np.all(np.diff(ev) >= 0)
    assert abs(ev.max() - 2 * math.sqrt(200)) < 0.1 * 2 * math.sqrt(200)


@pytest.mark.parametrize("kind", ["GOE", "GUE"])
def test_dense_and_tridiagonal_same_law(kind):
    # second moment of the spectrum: E tr H^2 / N = N (beta=2) or N + 1 (beta=1)
    for method in ("dense", "tridiagonal"):
        cfg = rmt.EnsembleConfig(kind=kind, N=150, M=50, method=method)
        m2 = np.mean([np.mean(rmt.sample_spectrum(cfg, stream(2, i)) ** 2) for i in range(60)])
        expect = 150 + (1 if kind == "GOE" else 0)
        assert m2 == pytest.approx(expect, rel=0.02)


def test_spectrum_symmetric_in_distribution():
    cfg = rmt.EnsembleConfig(kind="GOE", N=200, M=50)
    means = np.array([rmt.sample_spectrum(cfg, stream(3, i)).mean() for i in range(200)])
    assert abs(means.mean()) <= 3 * means.std(ddof=1) / math.sqrt(len(means))
    frac = np.array([(rmt.sample_spectrum(cfg, stream(4, i)) < 0).mean() for i in range(200)])
    assert abs(frac.mean() - 0.5) <= 3 * frac.std(ddof=1) / math.sqrt(len(frac))


def test_semicircle_cdf():
    assert rmt.semicircle_cdf(0.0) == pytest.approx(0.5)
    assert rmt.semicircle_cdf(-1.0) == 0 and rmt.semicircle_cdf(1.0) == 1
    dens = lambda t: 2 / math.pi * math.sqrt(1 - t * t)
    val, _ = integrate.quad(dens, -1, 0.3)
    assert rmt.semicircle_cdf(0.3) == pytest.approx(val, abs=1e-12)


def test_unfold_spacing():
    N = 800
    cfg = rmt.EnsembleConfig(kind="GUE", N=N, M=50)
    sp_all = []
    for i in range(10):
        x = rmt.unfold(rmt.sample_spectrum(cfg, stream(5, i)), N)
        assert np.all(np.diff(x) >= 0)
        assert x[0] == pytest.approx(0, abs=3) and x[-1] == pytest.approx(N, abs=3)
        bulk = x[(x > 0.3 * N) & (x < 0.7 * N)]
        sp_all.append(np.diff(bulk))
    assert np.concatenate(sp_all).mean() == pytest.approx(1.0, rel=0.05)


def test_sine_kernel_oracle_matches_fourier():
    # for W >= 1 the sine-kernel variance is exactly integral |u| psi_hat(u)^2
    for W in (4.0, 10.0):
        assert rmt.sine_kernel_variance(TF, W) == pytest.approx(sp.gue_sigma2(TF), rel=1e-4)


def test_zero_test_function_variance():
    cfg = rmt.EnsembleConfig(kind="GUE", N=200, M=50, n_centers=1)
    v, se = rmt.smoothed_count_variance(cfg, sp.zero_function())
    assert v == 0 and se == 0


def test_window_reaching_edge_raises():
    cfg = rmt.EnsembleConfig(kind="GUE", N=400, M=50, W=10.0)
    with pytest.raises(ValueError):
        rmt.smoothed_count_variance(cfg, TF)


def test_se_scales_with_M():
    a = rmt.EnsembleConfig(kind="GUE", N=300, M=100, W=2.0, seed=1)
    b = rmt.EnsembleConfig(kind="GUE", N=300, M=400, W=2.0, seed=1)
    va, sa = rmt.smoothed_count_variance(a, TF)
    vb, sb = rmt.smoothed_count_variance(b, TF)
    assert va >= 0 and vb >= 0
    assert sa / sb == pytest.approx(2.0, rel=0.35)
