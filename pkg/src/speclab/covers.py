"""Random degree-n covers: uniform homomorphisms into S_n and their statistics.

Permutations are integer arrays ``p`` with ``p[i]`` the image of ``i``.
Words act on the left, so the permutation of ``uv`` is ``P_u[P_v]``.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .fuchsian import LETTERS, SurfaceGroup, encode
from .kernels import impl as _k
from .rng import as_generator, stream

Permutation = np.ndarray


# -- permutations ------------------------------------------------------------

def invert(p: np.ndarray) -> np.ndarray:
    """Inverse permutation(s) along the last axis."""
    out = np.empty_like(p)
    np.put_along_axis(out, p, np.broadcast_to(np.arange(p.shape[-1]), p.shape), axis=-1)
    return out


def compose(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """``p`` after ``q`` (batched along leading axes)."""
    return np.take_along_axis(p, q, axis=-1)


def random_permutations(rng: np.random.Generator, shape: tuple, n: int) -> np.ndarray:
    return np.argsort(rng.random((*shape, n)), axis=-1)


def cycle_lengths(p: np.ndarray) -> np.ndarray:
    """Length of the cycle through each point (batched)."""
    n = p.shape[-1]
    ident = np.arange(n)
    out = np.zeros(p.shape, dtype=np.int64)
    cur = p.copy()
    for k in range(1, n + 1):
        hit = (cur == ident) & (out == 0)
        out[hit] = k
        cur = np.take_along_axis(p, cur, axis=-1)
    return out


def cycle_type(p: np.ndarray) -> tuple[int, ...]:
    lengths = cycle_lengths(p)
    parts = []
    seen = np.zeros(len(p), dtype=bool)
    for i in range(len(p)):
        if not seen[i]:
            j = i
            while not seen[j]:
                seen[j] = True
                j = p[j]
            parts.append(int(lengths[i]))
    return tuple(sorted(parts, reverse=True))


def cycles(p: np.ndarray) -> list[list[int]]:
    seen = np.zeros(len(p), dtype=bool)
    out = []
    for i in range(len(p)):
        if seen[i]:
            continue
        cyc = []
        j = i
        while not seen[j]:
            seen[j] = True
            cyc.append(j)
            j = int(p[j])
        out.append(cyc)
    return out


@lru_cache(maxsize=None)
def partitions(n: int) -> tuple[tuple[int, ...], ...]:
    """All partitions of n, parts in decreasing order."""
    def gen(m, cap):
        if m == 0:
            yield ()
            return
        for k in range(min(m, cap), 0, -1):
            for rest in gen(m - k, k):
                yield (k,) + rest
    return tuple(gen(n, n))


def hook_dimension(shape: tuple[int, ...]) -> int:
    """Dimension of the S_n irreducible with Young diagram ``shape``."""
    n = sum(shape)
    conj = [sum(1 for r in shape if r > j) for j in range(shape[0])] if shape else []
    hooks = 1
    for i, r in enumerate(shape):
        for j in range(r):
            hooks *= (r - j - 1) + (conj[j] - i - 1) + 1
    return math.factorial(n) // hooks


def hom_count_formula(n: int, genus: int = 2) -> int:
    """|Hom(surface group of genus g, S_n)| = n!^(2g-1) sum_lambda f_lambda^(2-2g)."""
    from fractions import Fraction
    nf = math.factorial(n)
    total = sum(Fraction(1, hook_dimension(lam) ** (2 * genus - 2)) for lam in partitions(n))
    val = nf ** (2 * genus - 1) * total
    assert val.denominator == 1
    return int(val)


# -- homomorphisms -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class HomSample:
    """Images of the generator letters (one row per generator, inverses excluded)."""
    n: int
    images: np.ndarray     # (2g, n)

    @property
    def letter_images(self) -> np.ndarray:
        """(4g, n) array: generators then their inverses, in letter-code order."""
        return np.concatenate([self.images, invert(self.images)])


def identity_hom(group: SurfaceGroup, n: int) -> HomSample:
    return HomSample(n, np.tile(np.arange(n), (group.ngen, 1)))


def _relator_holds_batch(group: SurfaceGroup, gens: np.ndarray) -> np.ndarray:
    """gens: (B, 2g, n) generator images; True where the relator maps to id."""
    n = gens.shape[-1]
    letters = np.concatenate([gens, invert(gens)], axis=1)
    cur = np.broadcast_to(np.arange(n), (gens.shape[0], n)).copy()
    for x in reversed(encode(group.relator)):
        cur = np.take_along_axis(letters[:, x, :], cur, axis=-1)
    return (cur == np.arange(n)).all(axis=1)


def _eval_basis_word(expr: str, imgs: dict[str, np.ndarray]) -> np.ndarray:
    n = len(next(iter(imgs.values())))
    cur = np.arange(n)
    for ch in reversed(expr):
        p = imgs[ch] if ch.islower() else invert(imgs[ch.lower()])
        cur = p[cur]
    return cur


@lru_cache(maxsize=None)
def _class_templates(n: int) -> tuple[np.ndarray, ...]:
    """For each partition: position -> next position within its cycle block."""
    out = []
    for lam in partitions(n):
        nxt = np.empty(n, dtype=np.int64)
        pos = 0
        for part in lam:
            for j in range(part):
                nxt[pos + j] = pos + (j + 1) % part
            pos += part
        out.append(nxt)
    return tuple(out)


def _conjugator(src: np.ndarray, dst: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Uniform ``w`` with ``w src w^-1 = dst`` (same cycle type assumed)."""
    n = len(src)
    by_len_s: dict[int, list] = {}
    by_len_d: dict[int, list] = {}
    for c in cycles(src):
        by_len_s.setdefault(len(c), []).append(c)
    for c in cycles(dst):
        by_len_d.setdefault(len(c), []).append(c)
    w = np.empty(n, dtype=np.int64)
    for L, cs in by_len_s.items():
        ds = by_len_d[L]
        order = rng.permutation(len(ds))
        for c, j in zip(cs, order):
            d = ds[j]
            off = int(rng.integers(L))
            for i, x in enumerate(c):
                w[x] = d[(i + off) % L]
    return w


def _sample_rejection(group, n, rng, max_trials, batch=64):
    tried = 0
    while tried < max_trials:
        gens = random_permutations(rng, (batch, group.ngen), n)
        ok = np.flatnonzero(_relator_holds_batch(group, gens))
        tried += batch
        if len(ok):
            return HomSample(n, gens[ok[0]])
    raise RuntimeError(f"rejection sampler exceeded {max_trials} trials at n={n}")


def _sample_class_proposal(group, n, rng, max_trials, batch=64):
    """Exact uniform sampler on Hom(G, S_n) through the commutator basis.

    Draw x, y uniform and set t = [x, y]^-1. Draw z by picking a partition
    uniformly and then an element of that conjugacy class uniformly.
    A w with [z, w] = t exists iff z^-1 t is conjugate to z^-1, in which
    case w is drawn uniformly among the |C(z)| solutions. Each
    quadruple is then produced with probability 1/(n!^3 p(n)) per trial.
    """
    if group.genus != 2 or not group.commutator_basis:
        raise ValueError("class-proposal sampler needs a genus-2 commutator basis")
    templates = _class_templates(n)
    P = len(templates)
    tmpl = np.stack(templates)
    tried = 0
    while tried < max_trials:
        xy = random_permutations(rng, (batch, 2), n)
        x, y = xy[:, 0], xy[:, 1]
        comm = compose(compose(x, y), compose(invert(x), invert(y)))
        t = invert(comm)
        lam = rng.integers(P, size=batch)
        order = random_permutations(rng, (batch,), n)
        z = np.empty_like(order)
        rows = np.arange(batch)[:, None]
        z[rows, order] = order[rows, tmpl[lam]]
        zi = invert(z)
        s = compose(zi, t)
        ok = (np.sort(cycle_lengths(zi), axis=1) == np.sort(cycle_lengths(s), axis=1)).all(axis=1)
        tried += batch
        hits = np.flatnonzero(ok)
        if len(hits):
            i = hits[0]
            w = _conjugator(zi[i], s[i], rng)
            imgs = {"x": x[i], "y": y[i], "z": z[i], "w": w}
            gens = np.stack([_eval_basis_word(e, imgs) for e in group.basis_inverse])
            return HomSample(n, gens)
    raise RuntimeError(f"class-proposal sampler exceeded {max_trials} trials at n={n}")


def sample_hom(group: SurfaceGroup, n: int, rng=None, *, method: str = "auto",
               max_trials: int = 10_000_000) -> HomSample:
    """Uniform random element of Hom(G, S_n).

    ``method`` is "rejection" (independent uniform generators, accept iff
    the relator holds), "class" (see :func:`_sample_class_proposal`) or
    "auto" (rejection for n <= 5, class proposal above).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = as_generator(rng)
    if n == 1:
        return identity_hom(group, 1)
    if method == "auto":
        method = "rejection" if n <= 5 else "class"
    if method == "rejection":
        return _sample_rejection(group, n, rng, max_trials)
    if method == "class":
        return _sample_class_proposal(group, n, rng, max_trials)
    raise ValueError(f"unknown method {method!r}")


def rejection_acceptance(group: SurfaceGroup, n: int, trials: int, rng=None) -> tuple[int, int]:
    """(accepted, trials) for independent uniform generator tuples."""
    rng = as_generator(rng)
    acc = 0
    done = 0
    while done < trials:
        b = min(65536, trials - done)
        acc += int(_relator_holds_batch(group, random_permutations(rng, (b, group.ngen), n)).sum())
        done += b
    return acc, trials


def count_homs_exhaustive(group: SurfaceGroup, n: int) -> int:
    """Exact |Hom(G, S_n)| by checking every generator tuple (n <= 3)."""
    if n > 3:
        raise ValueError("exhaustive count limited to n <= 3")
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
    idx = np.array(list(itertools.product(range(len(perms)), repeat=group.ngen)))
    gens = perms[idx]
    return int(_relator_holds_batch(group, gens).sum())


def sample_homs(group: SurfaceGroup, n: int, M: int, seed: int, *, method: str = "auto",
                start: int = 0) -> np.ndarray:
    """(M, 4g, n) letter images; sample i uses stream (seed, start + i)."""
    out = np.empty((M, 2 * group.ngen, n), dtype=np.int64)
    for i in range(M):
        out[i] = sample_hom(group, n, stream(seed, start + i), method=method).letter_images
    return out


# -- statistics of one cover -------------------------------------------------

def permutation_of_word(hom: HomSample, w: str) -> np.ndarray:
    return _k.word_permutations(hom.letter_images[None], [encode(w)])[0, 0]


def fixed_points(hom: HomSample, w: str, k: int = 1) -> int:
    if k < 1:
        raise ValueError("k must be >= 1")
    return int(_k.fixed_point_counts(hom.letter_images[None], [encode(w)], k)[0, 0, k - 1])


def cycle_count(hom: HomSample, w: str, d: int) -> int:
    if d < 1:
        raise ValueError("d must be >= 1")
    return int(_k.cycle_counts(hom.letter_images[None], [encode(w)], d)[0, 0, d - 1])


def is_connected(hom: HomSample) -> bool:
    """True iff the generator images act transitively on the sheets."""
    n = hom.n
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    stack = [0]
    imgs = hom.letter_images
    while stack:
        i = stack.pop()
        for j in imgs[:, i]:
            if not seen[j]:
                seen[j] = True
                stack.append(int(j))
    return bool(seen.all())


def divisor_count(k: int) -> int:
    if k < 1:
        raise ValueError("k must be >= 1")
    return sum(1 for d in range(1, k + 1) if k % d == 0)


def vcov_limit(k1: int, k2: int) -> int:
    """Sum of the common divisors of k1 and k2."""
    if k1 < 1 or k2 < 1:
        raise ValueError("arguments must be >= 1")
    g = math.gcd(k1, k2)
    return sum(d for d in range(1, g + 1) if g % d == 0)


# -- Monte Carlo -------------------------------------------------------------

@dataclass(frozen=True)
class FixStats:
    """Moments of F_n(w^k) and cycle counts over M sampled covers.

    Variables are indexed by (word index, power index) flattened row-major.
    """
    n: int
    M: int
    words: tuple[str, ...]
    powers: tuple[int, ...]
    cycle_ds: tuple[int, ...]
    mean: np.ndarray        # (nw, nk)
    mean_se: np.ndarray
    cov: np.ndarray         # (nw*nk, nw*nk)
    cov_se: np.ndarray
    cycle_mean: np.ndarray  # (nw, nd)
    cycle_mean_se: np.ndarray
    cycle_var: np.ndarray
    cycle_var_se: np.ndarray
    cycle_pmf: np.ndarray   # (nw, nd, n+1)

    def var_index(self, word: int, power: int) -> int:
        return word * len(self.powers) + self.powers.index(power)

    def covariance(self, w1: int, k1: int, w2: int, k2: int) -> tuple[float, float]:
        i, j = self.var_index(w1, k1), self.var_index(w2, k2)
        return float(self.cov[i, j]), float(self.cov_se[i, j])


def _moment_block(args):
    group, words, n, start, count, seed, kmax, dmax, method = args
    perms = sample_homs(group, n, count, seed, method=method, start=start)
    codes = [encode(w) for w in words]
    F = _k.fixed_point_counts(perms, codes, kmax)
    C = _k.cycle_counts(perms, codes, dmax)
    return F, C


def _cov_with_se(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    M = X.shape[0]
    Xc = X - X.mean(axis=0)
    prod = Xc[:, :, None] * Xc[:, None, :]
    cov = prod.sum(axis=0) / (M - 1)
    se = prod.std(axis=0, ddof=1) / math.sqrt(M)
    return cov, se


def fix_moment_experiment(group: SurfaceGroup, words: list[str], powers: list[int], n: int,
                          M: int, seed: int, *, cycle_ds=(1, 2, 3), workers: int = 1,
                          method: str = "auto", block: int = 1000) -> FixStats:
    if M < 100:
        raise ValueError("M < 100 gives meaningless error bars")
    powers = tuple(int(k) for k in powers)
    cycle_ds = tuple(int(d) for d in cycle_ds)
    kmax = max(powers)
    dmax = max(cycle_ds)
    jobs = [(group, list(words), n, s, min(block, M - s), seed, kmax, dmax, method)
            for s in range(0, M, block)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_moment_block, jobs))
    else:
        parts = [_moment_block(j) for j in jobs]
    F = np.concatenate([p[0] for p in parts]).astype(float)
    C = np.concatenate([p[1] for p in parts])
    kidx = [k - 1 for k in powers]
    didx = [d - 1 for d in cycle_ds]
    Fsel = F[:, :, kidx]
    Csel = C[:, :, didx].astype(float)
    mean = Fsel.mean(axis=0)
    mean_se = Fsel.std(axis=0, ddof=1) / math.sqrt(M)
    cov, cov_se = _cov_with_se(Fsel.reshape(M, -1))
    cm = Csel.mean(axis=0)
    cm_se = Csel.std(axis=0, ddof=1) / math.sqrt(M)
    cv = Csel.var(axis=0, ddof=1)
    cv_se = ((Csel - cm) ** 2).std(axis=0, ddof=1) / math.sqrt(M)
    pmf = np.zeros((len(words), len(cycle_ds), n + 1))
    for j in range(len(words)):
        for t in range(len(cycle_ds)):
            pmf[j, t] = np.bincount(C[:, j, didx[t]], minlength=n + 1)[: n + 1] / M
    return FixStats(n, M, tuple(words), powers, cycle_ds, mean, mean_se, cov, cov_se,
                    cm, cm_se, cv, cv_se, pmf)


def connectivity_fraction(group: SurfaceGroup, n: int, M: int, seed: int, *,
                          method: str = "auto") -> tuple[float, float]:
    """(fraction of connected covers, binomial SE)."""
    hits = 0
    for i in range(M):
        hits += is_connected(sample_hom(group, n, stream(seed, i), method=method))
    p = hits / M
    return p, math.sqrt(max(p * (1 - p), 1e-300) / M)


__all__ = [
    "HomSample", "FixStats", "LETTERS", "sample_hom", "sample_homs", "count_homs_exhaustive",
    "hom_count_formula", "rejection_acceptance", "permutation_of_word", "fixed_points",
    "cycle_count", "is_connected", "divisor_count", "vcov_limit", "fix_moment_experiment",
    "connectivity_fraction", "identity_hom",
]
