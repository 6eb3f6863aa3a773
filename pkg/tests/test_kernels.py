import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from speclab import fuchsian as fu, kernels
from speclab import _pykernels as py



@pytest.fixture(scope="module")
def cy():
    if not kernels.compiled_available():
        pytest.skip("compiled extension not built")
    return kernels.backend("cython")


words = st.lists(st.integers(0, 7), min_size=0, max_size=30).map(bytes)


@settings(max_examples=300, deadline=None)
@given(words)
def test_word_kernels_agree(group, cy, w):
    sf, sb = group.succ_f, group.succ_b
    assert cy.free_reduce(w, 4) == py.free_reduce(w, 4)
    assert cy.inverse_word(w, 4) == py.inverse_word(w, 4)
    assert cy.dehn_reduce(w, sf, sb, 4) == py.dehn_reduce(w, sf, sb, 4)
    assert cy.cyclic_canonical(w, sf, sb, 4) == py.cyclic_canonical(w, sf, sb, 4)
    assert cy.is_periodic(w) == py.is_periodic(w)


def test_permutation_kernels_agree(cy):
    rng = np.random.default_rng(5)
    perms = np.array([[rng.permutation(7) for _ in range(8)] for _ in range(50)], dtype=np.int64)
    ws = [fu.encode(w) for w in ("a", "ab", "abC", "dcbA")]
    assert np.array_equal(cy.fixed_point_counts(perms, ws, 3), py.fixed_point_counts(perms, ws, 3))
    assert np.array_equal(cy.cycle_counts(perms, ws, 3), py.cycle_counts(perms, ws, 3))
    rel = fu.encode("abcdABCD")
    assert np.array_equal(cy.relator_holds(perms, rel), py.relator_holds(perms, rel))


def test_enumerate_ball_agrees(group, cy):
    import math
    T, R = 5.0, group.circumradius
    gens = np.ascontiguousarray(group.letter_matrices, dtype=float)
    args = (gens, group.succ_f, group.succ_b, 4, 2 * math.cosh(T / 2),
            math.cosh(T + 2 * R), 10**8, bytes(range(8)))
    a = cy.enumerate_ball(*args)[0]
    b = py.enumerate_ball(*args)[0]
    assert a == b and len(a) > 0


def test_pure_fallback_selected():
    import os
    import subprocess
    import sys
    env = dict(os.environ, SPECLAB_PURE="1")
    out = subprocess.run([sys.executable, "-c", "import speclab; print(speclab.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
