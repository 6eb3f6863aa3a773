import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from speclab import fuchsian as fu

OCTAGON_SYSTOLE = 2 * math.acosh(1 + math.sqrt(2))


def test_group_invariants(group):
    group.check()
    for g in group.generators:
        assert abs(np.linalg.det(g) - 1) < 1e-12
    rel = fu.word_matrix(group, group.relator)
    assert min(np.abs(rel - np.eye(2)).max(), np.abs(rel + np.eye(2)).max()) < 1e-9


def test_systole_closed_form(group):
    assert group.systole == pytest.approx(OCTAGON_SYSTOLE, abs=1e-10)
    assert fu.translation_length(group.generators[0]) == pytest.approx(OCTAGON_SYSTOLE, abs=1e-10)


def test_translation_length_rejects_elliptic():
    rot = np.array([[math.cos(0.3), -math.sin(0.3)], [math.sin(0.3), math.cos(0.3)]])
    with pytest.raises(ValueError):
        fu.translation_length(rot)


def test_translation_length_identity_raises():
    with pytest.raises(ValueError):
        fu.translation_length(np.eye(2))


def test_canonical_rotation_invariant(group):
    assert fu.cyclic_canonical(group, "ab") == fu.cyclic_canonical(group, "ba")


def test_canonical_of_relator_raises(group):
    with pytest.raises(ValueError):
        fu.cyclic_canonical(group, group.relator)
    assert fu.reduce(group, "aA") == ""


def test_half_relator_substitution(group):
    # abcd = dcba in the group; substitute it inside a longer word
    assert fu.cyclic_canonical(group, "abcdb") == fu.cyclic_canonical(group, "dcbab")


def test_one_cell_annulus(group):
    # abc = d cba D: conjugate words that differ by a relator cell
    assert fu.cyclic_canonical(group, "abc") == fu.cyclic_canonical(group, "dcbaD")


def test_primitivity(group):
    assert fu.is_primitive(group, fu.cyclic_canonical(group, "ab"))
    assert not fu.is_primitive(group, fu.cyclic_canonical(group, "abab"))
    assert not fu.is_primitive(group, fu.cyclic_canonical(group, "aaa"))


def _random_word(draw_letters):
    return "".join(fu.LETTERS[i] if i < 4 else fu.LETTERS[i - 4].upper() for i in draw_letters)


words = st.lists(st.integers(0, 7), min_size=1, max_size=12)


@settings(max_examples=150, deadline=None)
@given(words, st.lists(st.integers(0, 7), min_size=1, max_size=3))
def test_canonical_conjugation_invariant(group, ws, us):
    w = fu.decode(bytes(ws))
    u = fu.decode(bytes(us))
    if fu.reduce(group, w) == "":
        return
    assert fu.cyclic_canonical(group, u + w + fu.inverse(u)) == fu.cyclic_canonical(group, w)


@settings(max_examples=150, deadline=None)
@given(words)
def test_canonical_preserves_trace(group, ws):
    w = fu.decode(bytes(ws))
    if fu.reduce(group, w) == "":
        return
    c = fu.cyclic_canonical(group, w)
    t1 = abs(np.trace(fu.word_matrix(group, w)))
    t2 = abs(np.trace(fu.word_matrix(group, c)))
    assert t1 == pytest.approx(t2, rel=1e-7)
    assert len(c) <= len(fu.reduce(group, w))


def test_systole_classes(table10):
    first = table10.restrict(OCTAGON_SYSTOLE + 1e-9)
    # 12 unoriented systoles on the Bolza surface
    assert len(first) == 24
    assert np.allclose(first.lengths, OCTAGON_SYSTOLE)


def test_table_invariants(group, table10):
    L = table10.lengths
    assert np.all(np.diff(L) >= -1e-9)
    pairs = table10.pairs
    idx = np.arange(len(table10))
    assert np.all(pairs[pairs] == idx) and np.all(pairs != idx)
    assert table10.p0_mask.sum() * 2 == len(table10)
    assert len(set(table10.words)) == len(table10)
    for c in table10.classes[::97]:
        assert fu.translation_length(fu.word_matrix(group, c.canonical_word)) == pytest.approx(c.length, abs=1e-9)
        assert table10.classes[c.inverse_pair].length == pytest.approx(c.length, abs=1e-9)


def test_counts_match_oracle_T6(group):
    tab = fu.enumerate_primitives(group, 6.0, verify_radius=4)
    cmp = fu.compare_with_oracle(group, tab, 6.0)
    assert cmp["agree"] and cmp["N0"] == 96


def test_restrict_equals_direct(group, table10):
    direct = fu.enumerate_primitives(group, 8.0)
    assert direct.words == table10.restrict(8.0).words
    assert fu.count(direct, 8.0) == fu.count(table10, 8.0)


def test_below_systole_empty(group):
    tab = fu.enumerate_primitives(group, 1.0)
    assert len(tab) == 0 and tab.cutoff == 1.0


def test_restrict_beyond_cutoff(table8):
    with pytest.raises(ValueError):
        table8.restrict(9.0)


@pytest.mark.slow
def test_stage2_agrees_T8(group):
    # runs the conjugation oracle on every class
    fu.enumerate_primitives(group, 8.0, verify_radius=4)
