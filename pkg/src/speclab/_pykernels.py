"""Pure-Python reference kernels.

Mirrors ``_ckernels.pyx`` function for function; :mod:`speclab.kernels`
picks whichever is importable. Words are ``bytes`` of letter codes: for a
group with ``g2`` generators, code ``x < g2`` is a generator and ``x + g2``
its inverse. ``succ_f`` / ``succ_b`` give the letter following ``x`` in the
cyclic relator and in its inverse (every letter occurs once in each).
"""
from __future__ import annotations

import math

import numpy as np

MAX_RELATOR = 8


def _inv(x: int, g2: int) -> int:
    return (x + g2) % (2 * g2)


def inverse_word(w: bytes, g2: int) -> bytes:
    return bytes(_inv(x, g2) for x in reversed(w))


def free_reduce(w: bytes, g2: int) -> bytes:
    out: list[int] = []
    for x in w:
        if out and out[-1] == _inv(x, g2):
            out.pop()
        else:
            out.append(x)
    return bytes(out)


def _cyc_free(w: list[int], g2: int) -> list[int]:
    i, j = 0, len(w) - 1
    while j > i and w[i] == _inv(w[j], g2):
        i += 1
        j -= 1
    return w[i:j + 1]


def _replacement(x: int, k: int, succ: bytes, g2: int) -> list[int]:
    """Shorter side of the relator for a run of length k starting at x."""
    y = x
    for _ in range(k):
        y = succ[y]
    comp = []
    for _ in range(MAX_RELATOR - k):
        comp.append(y)
        y = succ[y]
    return [_inv(z, g2) for z in reversed(comp)]


def _linear_run(w: list[int], i: int, succ: bytes) -> int:
    k = 1
    m = len(w)
    while i + k < m and succ[w[i + k - 1]] == w[i + k]:
        k += 1
    return k


def _dehn_linear(w: list[int], succ_f: bytes, succ_b: bytes, g2: int) -> list[int]:
    w = list(free_reduce(bytes(w), g2))
    changed = True
    while changed:
        changed = False
        for i in range(len(w)):
            for succ in (succ_f, succ_b):
                k = _linear_run(w, i, succ)
                if k > MAX_RELATOR // 2:
                    k = min(k, MAX_RELATOR)
                    rep = _replacement(w[i], k, succ, g2)
                    w = list(free_reduce(bytes(w[:i] + rep + w[i + k:]), g2))
                    changed = True
                    break
            if changed:
                break
    return w


def _half_swaps_linear(w: list[int], succ_f: bytes, succ_b: bytes, g2: int):
    half = MAX_RELATOR // 2
    for i in range(len(w) - half + 1):
        for succ in (succ_f, succ_b):
            if _linear_run(w, i, succ) >= half:
                rep = _replacement(w[i], half, succ, g2)
                yield w[:i] + rep + w[i + half:]


def _linear_closure(w: list[int], succ_f: bytes, succ_b: bytes, g2: int):
    """Words reachable from ``w`` by half swaps and Dehn reduction.

    Returns (shorter, seen): the first strictly shorter word found (or
    None) and the set of equal-length words visited.
    """
    m = len(w)
    seen = {bytes(w)}
    frontier = [w]
    while frontier:
        nxt = []
        for u in frontier:
            for v in _half_swaps_linear(u, succ_f, succ_b, g2):
                r = _dehn_linear(v, succ_f, succ_b, g2)
                if len(r) < m:
                    return r, seen
                key = bytes(r)
                if key not in seen:
                    seen.add(key)
                    nxt.append(r)
        frontier = nxt
    return None, seen


def dehn_reduce(w: bytes, succ_f: bytes, succ_b: bytes, g2: int) -> bytes:
    """Dehn reduction followed by a search over half-relator swaps.

    The swap search catches words with no long relator piece that still
    shorten after a length-preserving rewrite.
    """
    cur = _dehn_linear(list(w), succ_f, succ_b, g2)
    while True:
        shorter, _ = _linear_closure(cur, succ_f, succ_b, g2)
        if shorter is None:
            return bytes(cur)
        cur = shorter


def _cyclic_run(w: list[int], i: int, succ: bytes) -> int:
    m = len(w)
    k = 1
    while k < m and succ[w[(i + k - 1) % m]] == w[(i + k) % m]:
        k += 1
    return k


def cyclic_dehn(w: bytes, succ_f: bytes, succ_b: bytes, g2: int) -> list[int]:
    cur = _cyc_free(list(free_reduce(w, g2)), g2)
    changed = True
    while changed and cur:
        changed = False
        m = len(cur)
        for succ in (succ_f, succ_b):
            for i in range(m):
                k = _cyclic_run(cur, i, succ)
                if k > MAX_RELATOR // 2:
                    k = min(k, MAX_RELATOR, m)
                    rep = _replacement(cur[i], k, succ, g2)
                    rest = [cur[(i + k + j) % m] for j in range(m - k)]
                    cur = _cyc_free(list(free_reduce(bytes(rep + rest), g2)), g2)
                    changed = True
                    break
            if changed:
                break
    return cur


def min_rotation(w: list[int]) -> bytes:
    m = len(w)
    best = None
    for i in range(m):
        r = bytes(w[i:] + w[:i])
        if best is None or r < best:
            best = r
    return best if best is not None else b""


def _cyclic_moves(u: list[int], succ_f: bytes, succ_b: bytes, g2: int):
    """Cyclic words one move away from ``u``.

    Moves are a half swap at any cyclic position, and conjugation by a
    single letter followed by linear rewriting (this catches annuli made
    of a single relator cell glued to itself).
    """
    half = MAX_RELATOR // 2
    m = len(u)
    for succ in (succ_f, succ_b):
        for i in range(m):
            if _cyclic_run(u, i, succ) < half:
                continue
            rep = _replacement(u[i], half, succ, g2)
            rest = [u[(i + half + j) % m] for j in range(m - half)]
            yield cyclic_dehn(bytes(rep + rest), succ_f, succ_b, g2)
    for i in range(m):
        rot = u[i:] + u[:i]
        for x in range(2 * g2):
            if x == _inv(rot[0], g2) or x == rot[-1]:
                continue
            v = [x] + rot + [_inv(x, g2)]
            shorter, seen = _linear_closure(_dehn_linear(v, succ_f, succ_b, g2), succ_f, succ_b, g2)
            if shorter is not None:
                yield cyclic_dehn(bytes(shorter), succ_f, succ_b, g2)
                continue
            for r in seen:
                yield cyclic_dehn(r, succ_f, succ_b, g2)


def cyclic_orbit(w: bytes, succ_f: bytes, succ_b: bytes, g2: int) -> set:
    """Minimal-length cyclic words reachable by :func:`_cyclic_moves`.

    Each member is returned in its least rotation. Empty set for the
    identity.
    """
    cur = cyclic_dehn(w, succ_f, succ_b, g2)
    while True:
        if not cur:
            return set()
        m = len(cur)
        start = min_rotation(cur)
        seen = {start}
        frontier = [list(start)]
        shorter = None
        while frontier and shorter is None:
            nxt = []
            for u in frontier:
                for v in _cyclic_moves(u, succ_f, succ_b, g2):
                    if len(v) < m:
                        shorter = v
                        break
                    if len(v) > m:
                        continue
                    key = min_rotation(v)
                    if key not in seen:
                        seen.add(key)
                        nxt.append(list(key))
                if shorter is not None:
                    break
            frontier = nxt
        if shorter is None:
            return seen
        cur = shorter


def cyclic_canonical(w: bytes, succ_f: bytes, succ_b: bytes, g2: int) -> bytes:
    """Least word of the rotation / half-swap orbit; ``b""`` for the identity."""
    orbit = cyclic_orbit(w, succ_f, succ_b, g2)
    return min(orbit) if orbit else b""


def is_periodic(w: bytes) -> int:
    """Smallest k > 1 with ``w`` a k-fold repetition, or 1."""
    m = len(w)
    for d in range(1, m // 2 + 1):
        if m % d == 0 and w[:d] * (m // d) == w:
            return m // d
    return 1


def enumerate_ball(gens: np.ndarray, succ_f: bytes, succ_b: bytes, g2: int,
                   trace_max: float, cosh_dmax: float, max_nodes: int,
                   roots: bytes) -> tuple[set, int]:
    """Depth-first search over Dehn-reduced words with bounded displacement.

    A prefix is pruned once ``cosh d(i, g i) = |g|_F^2 / 2`` exceeds
    ``cosh_dmax``. Every cyclically reduced node with ``2 < |tr| <= trace_max``
    is canonicalized (orbits are memoized). Returns (set of canonical words, nodes visited).
    """
    half = MAX_RELATOR // 2
    nl = 2 * g2
    G = [tuple(float(v) for v in gens[x].ravel()) for x in range(nl)]
    found: set = set()
    memo: dict = {}
    nodes = 0
    # stack entries: (word list, matrix tuple, run_f, run_b)
    stack = []
    for x in reversed(roots):
        stack.append(([x], G[x], 1, 1))
    while stack:
        w, M, rf, rb = stack.pop()
        nodes += 1
        if nodes > max_nodes:
            raise RuntimeError("enumeration node ceiling exceeded")
        tr = abs(M[0] + M[3])
        if 2.0 < tr <= trace_max and w[0] != _inv(w[-1], g2):
            key = min_rotation(cyclic_dehn(bytes(w), succ_f, succ_b, g2))
            c = memo.get(key)
            if c is None:
                orbit = cyclic_orbit(key, succ_f, succ_b, g2)
                c = min(orbit) if orbit else b""
                for o in orbit:
                    memo[o] = c
                memo[key] = c
            found.add(c)
        last = w[-1]
        for x in range(nl - 1, -1, -1):
            if x == _inv(last, g2):
                continue
            nrf = rf + 1 if succ_f[last] == x else 1
            nrb = rb + 1 if succ_b[last] == x else 1
            if nrf > half or nrb > half:
                continue
            a, b, c, d = M
            p, q, r, s = G[x]
            N = (a * p + b * r, a * q + b * s, c * p + d * r, c * q + d * s)
            if 0.5 * (N[0] ** 2 + N[1] ** 2 + N[2] ** 2 + N[3] ** 2) > cosh_dmax:
                continue
            stack.append((w + [x], N, nrf, nrb))
    found.discard(b"")
    return found, nodes


def word_permutations(perms: np.ndarray, words: list[bytes]) -> np.ndarray:
    """Images of ``words`` under each sampled homomorphism.

    ``perms`` has shape (M, 2*g2, n) holding letter images (inverses
    included). Composition is left action: the image of ``uv`` is
    ``P_u[P_v]``. Returns int array (M, len(words), n).
    """
    M, _, n = perms.shape
    out = np.empty((M, len(words), n), dtype=np.int64)
    ident = np.broadcast_to(np.arange(n), (M, n))
    rows = np.arange(M)[:, None]
    for j, w in enumerate(words):
        cur = ident.copy()
        for x in reversed(w):
            cur = perms[rows, x, cur]
        out[:, j, :] = cur
    return out


def fixed_point_counts(perms: np.ndarray, words: list[bytes], kmax: int) -> np.ndarray:
    """F[m, j, k-1] = number of fixed points of phi_m(words[j])^k."""
    W = word_permutations(perms, words)
    M, nw, n = W.shape
    out = np.zeros((M, nw, kmax), dtype=np.int64)
    cur = np.broadcast_to(np.arange(n), (M, nw, n)).copy()
    idx_m = np.arange(M)[:, None, None]
    idx_w = np.arange(nw)[None, :, None]
    for k in range(kmax):
        cur = W[idx_m, idx_w, cur]
        out[:, :, k] = (cur == np.arange(n)).sum(axis=2)
    return out


def cycle_counts(perms: np.ndarray, words: list[bytes], dmax: int) -> np.ndarray:
    """C[m, j, d-1] = number of d-cycles of phi_m(words[j]) for d <= dmax."""
    W = word_permutations(perms, words)
    M, nw, n = W.shape
    out = np.zeros((M, nw, dmax), dtype=np.int64)
    for m in range(M):
        for j in range(nw):
            p = W[m, j]
            seen = np.zeros(n, dtype=bool)
            for s in range(n):
                if seen[s]:
                    continue
                L = 0
                t = s
                while not seen[t]:
                    seen[t] = True
                    t = p[t]
                    L += 1
                if L <= dmax:
                    out[m, j, L - 1] += 1
    return out


def relator_holds(perms: np.ndarray, relator: bytes) -> np.ndarray:
    """Boolean mask of samples whose relator image is the identity."""
    W = word_permutations(perms, [relator])
    n = perms.shape[2]
    return (W[:, 0, :] == np.arange(n)).all(axis=1)


def translation_length_from_trace(tr: float) -> float:
    return 2.0 * math.acosh(abs(tr) / 2.0)
