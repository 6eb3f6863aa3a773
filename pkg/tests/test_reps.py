import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from speclab import covers as cv, fuchsian as fu, reps
from speclab.rng import stream

GENERIC = "abelian:0.31,0.07,0.53,0.19"


def test_abelian_relator_trivial(group):
    assert np.all(reps.abelianization(group, group.relator) == 0)
    chi = reps.AbelianCharacter((0.31, 0.07, 0.53, 0.19))
    assert reps.char_value(chi, group.relator) == pytest.approx(1.0)


def test_abelian_values():
    chi = reps.AbelianCharacter((0.25, 0.0, 0.5, 0.0))
    assert reps.char_value(chi, "a") == pytest.approx(1j)
    assert reps.char_value(chi, "a", 2) == pytest.approx(-1)
    assert reps.char_value(chi, "A") == pytest.approx(-1j)
    with pytest.raises(ValueError):
        reps.AbelianCharacter((1.2, 0, 0, 0))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 7), min_size=1, max_size=10), st.integers(1, 4))
def test_abelian_conjugation_and_inverse(group, ws, k):
    chi = reps.AbelianCharacter((0.31, 0.07, 0.53, 0.19))
    w = fu.decode(bytes(ws))
    v = reps.char_value(chi, w, k)
    assert reps.char_value(chi, "b" + w + "B", k) == pytest.approx(v)
    assert reps.char_value(chi, fu.inverse(w), k) == pytest.approx(np.conj(v))


def test_involutive_flag(group):
    assert reps.parse_character("abelian:0.5,0,0.5,0", group).orientation_symmetric
    assert reps.parse_character("trivial", group).orientation_symmetric
    assert not reps.parse_character(GENERIC, group).orientation_symmetric


@pytest.mark.parametrize("kind,N", [("U", 3), ("SU", 3), ("SO", 3), ("O", 4), ("SP", 2)])
def test_haar_membership(kind, N):
    g = reps.haar_sample(kind, N, stream(1, 0), size=20)
    d = g.shape[-1]
    eye = np.eye(d)
    assert np.allclose(g @ np.conj(np.swapaxes(g, 1, 2)), eye, atol=1e-12)
    det = np.linalg.det(g)
    if kind in ("SU", "SO", "SP"):
        assert np.allclose(det, 1.0, atol=1e-10)
    if kind in ("SO", "O"):
        assert np.abs(g.imag).max() == 0 if np.iscomplexobj(g) else True
    if kind == "SP":
        J = reps._j_matrix(N)
        assert np.allclose(np.swapaxes(g, 1, 2) @ J @ g, J, atol=1e-12)


@pytest.mark.parametrize("kind,N,abs2,sq", [("U", 3, 1, 0), ("SU", 3, 1, 0), ("SU", 2, 1, 1),
                                            ("SO", 3, 1, 1), ("SO", 4, 1, 1), ("SP", 2, 1, 1)])
def test_haar_moments(kind, N, abs2, sq):
    m = reps.haar_trace_moments(kind, N, 40000, stream(2, 0))
    assert abs(m.abs2 - abs2) <= 4 * m.abs2_se
    assert abs(m.sq.real - sq) <= 4 * m.sq_se
    assert abs(m.sq.imag) <= 4 * m.sq_se + 1e-12
    assert m.f_mean == pytest.approx(m.f_from_moments, rel=1e-9)


def test_haar_moments_rejects_small_M():
    with pytest.raises(ValueError):
        reps.haar_trace_moments("SU", 3, 10)


@pytest.mark.parametrize("N", [2, 3, 5])
def test_commutator_solution(N):
    rng = stream(3, N)
    t = reps.haar_sample("SU", N, rng)
    Z, W = reps.commutator_solution(t, rng)
    assert np.allclose(Z @ W @ Z.conj().T @ W.conj().T, t, atol=1e-10)
    for g in (Z, W):
        assert np.allclose(g @ g.conj().T, np.eye(N), atol=1e-12)
        assert abs(np.linalg.det(g) - 1) < 1e-10


def test_su_rep(group):
    rep = reps.sample_su_rep(group, 3, stream(4, 0))
    assert rep.relator_defect <= 1e-8
    tr = reps.rep_trace(rep, "ab")
    assert reps.rep_trace(rep, "BA") == pytest.approx(np.conj(tr))


def test_so_rep(group):
    rep = reps.sample_so_rep(group, 3, stream(5, 0))
    assert rep.relator_defect <= 1e-6
    assert abs(reps.rep_trace(rep, "abC").imag) < 1e-12


def test_induced_trace_abelian_and_su(group):
    rng = stream(6, 0)
    chars = [reps.parse_character(GENERIC, group), reps.parse_character("su:2:1", group)]
    for i in range(20):
        hom = cv.sample_hom(group, 4, stream(6, i))
        w = fu.decode(bytes(rng.integers(0, 8, 6)))
        for ch in chars:
            lhs, rhs = reps.induced_trace_oracle(ch, hom, w)
            assert abs(lhs - rhs) < 1e-9


def test_parse_character_errors(group):
    for bad in ("abelian:0.1,0.2", "foo", "su:1:0"):
        with pytest.raises(ValueError):
            reps.parse_character(bad, group)


def test_log_integral():
    from scipy.special import expi
    for y in (10.0, math.exp(10)):
        assert reps.log_integral(y) == pytest.approx(expi(math.log(y)) - expi(math.log(2)), rel=1e-10)
    assert reps.log_integral(2.0) == 0.0


def test_trace_poly_parse():
    assert reps.parse_trace_poly("abs2") == {(1, 1): 1.0}
    assert reps.parse_trace_poly("2,0:1;1,1:2") == {(2, 0): 1.0, (1, 1): 2.0}


def test_chebotarev_trivial_counts(group, table8):
    ch = reps.parse_character("trivial", group)
    total, _ = reps.chebotarev_sum(table8, ch, "1", 8.0)
    assert total.real == fu.count(table8, 8.0)[0]
    with pytest.raises(ValueError):
        reps.chebotarev_sum(table8, ch, "1", 9.0)
