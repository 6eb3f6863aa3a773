"""Genus-2 Fuchsian group, word problem, and primitive geodesic enumeration.

The preset surface is the regular-octagon (Bolza) surface. Its four
generators are hyperbolic translations of length ``2 arccosh(1 + sqrt 2)``
along axes through the centre of the octagon at angles ``k pi / 4``;
letters ``a, b, c, d`` are those translations (``b`` and ``d`` taken with
reversed orientation) and ``A, B, C, D`` their inverses. In this alphabet
the surface relator reads ``abcdABCD``.

Matrices live in SL(2, R) acting on the upper half-plane; the octagon is
centred at ``i``.
"""
from __future__ import annotations

import math
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .kernels import impl as _k

LETTERS = "abcdABCD"
_CODE = {ch: i for i, ch in enumerate(LETTERS)}

TABLE_FORMAT_VERSION = 1
LENGTH_TIE_DECIMALS = 9


def encode(word: str) -> bytes:
    try:
        return bytes(_CODE[ch] for ch in word)
    except KeyError as exc:
        raise ValueError(f"letter {exc.args[0]!r} not in alphabet {LETTERS}") from None


def decode(codes: bytes) -> str:
    return "".join(LETTERS[x] for x in codes)


def word_order_key(word: str) -> tuple[int, bytes]:
    """Total order on words: length first, then lexicographic in a<b<c<d<A<B<C<D."""
    return (len(word), encode(word))


def inverse(word: str) -> str:
    return word[::-1].swapcase()


# -- Möbius matrices ---------------------------------------------------------

def _rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, s], [-s, c]])


def _translation(length: float) -> np.ndarray:
    return np.diag([math.exp(length / 2), math.exp(-length / 2)])


def _sl2_inverse(m: np.ndarray) -> np.ndarray:
    return np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]])


def translation_length(m: np.ndarray) -> float:
    """Hyperbolic translation length ``2 arccosh(|tr| / 2)``.

    Raises ValueError for non-hyperbolic input (|tr| <= 2).
    """
    tr = abs(float(m[0, 0] + m[1, 1]))
    if tr <= 2.0:
        raise ValueError(f"|trace| = {tr!r} <= 2: element is not hyperbolic")
    return 2.0 * math.acosh(tr / 2.0)


def displacement(m: np.ndarray) -> float:
    """Hyperbolic distance between ``i`` and ``m(i)``."""
    return math.acosh(max(1.0, 0.5 * float((m * m).sum())))


# -- the group ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SurfaceGroup:
    genus: int
    generators: np.ndarray          # (2g, 2, 2)
    relator: str
    preset: str = "octagon"
    letters: str = LETTERS
    # words (x1, y1, x2, y2) in the generators with [x1,y1][x2,y2] = relator
    # after free reduction, and the generators written back in terms of
    # them (letters x,y,z,w and inverses X,Y,Z,W).
    commutator_basis: tuple[str, ...] = ()
    basis_inverse: tuple[str, ...] = ()

    @cached_property
    def letter_matrices(self) -> np.ndarray:
        inv = np.array([_sl2_inverse(g) for g in self.generators])
        return np.concatenate([self.generators, inv])

    @property
    def ngen(self) -> int:
        return 2 * self.genus

    @cached_property
    def _succ(self) -> tuple[bytes, bytes]:
        r = encode(self.relator)
        rinv = encode(inverse(self.relator))
        nl = 2 * self.ngen
        f = [0] * nl
        b = [0] * nl
        for i, x in enumerate(r):
            f[x] = r[(i + 1) % len(r)]
        for i, x in enumerate(rinv):
            b[x] = rinv[(i + 1) % len(rinv)]
        return bytes(f), bytes(b)

    @property
    def succ_f(self) -> bytes:
        return self._succ[0]

    @property
    def succ_b(self) -> bytes:
        return self._succ[1]

    @cached_property
    def circumradius(self) -> float:
        """Distance from the centre ``i`` to the octagon's vertices."""
        return math.acosh(1.0 / math.tan(math.pi / (4 * self.genus)) ** 2)

    @cached_property
    def systole(self) -> float:
        """Minimum translation length over words of length <= 4."""
        best = math.inf
        for w in _words_up_to(4, self.ngen):
            m = self.matrix_codes(w)
            tr = abs(m[0, 0] + m[1, 1])
            if tr > 2.0 + 1e-9:
                best = min(best, 2.0 * math.acosh(tr / 2.0))
        return best

    def matrix_codes(self, codes: bytes) -> np.ndarray:
        m = np.eye(2)
        G = self.letter_matrices
        for x in codes:
            m = m @ G[x]  # plain products; dividing by sqrt(det) loses digits
        return m

    def check(self) -> None:
        """Assert the structural invariants; raise RuntimeError on failure."""
        for i, g in enumerate(self.generators):
            det = g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
            if abs(det - 1.0) > 1e-12:
                raise RuntimeError(f"generator {LETTERS[i]} has det {det}")
            if abs(g[0, 0] + g[1, 1]) <= 2.0:
                raise RuntimeError(f"generator {LETTERS[i]} is not hyperbolic")
        m = self.matrix_codes(encode(self.relator))
        if min(np.linalg.norm(m - np.eye(2)), np.linalg.norm(m + np.eye(2))) > 1e-9:
            raise RuntimeError("relator does not evaluate to +-identity")
        if self.commutator_basis:
            x, y, z, w = self.commutator_basis
            prod = x + y + inverse(x) + inverse(y) + z + w + inverse(z) + inverse(w)
            if decode(_k.free_reduce(encode(prod), self.ngen)) != self.relator:
                raise RuntimeError("commutator basis does not reproduce the relator")
            sub = dict(zip("xyzw", self.commutator_basis))
            for gen, expr in zip(LETTERS, self.basis_inverse):
                word = "".join(sub[ch] if ch.islower() else inverse(sub[ch.lower()]) for ch in expr)
                if decode(_k.free_reduce(encode(word), self.ngen)) != gen:
                    raise RuntimeError(f"basis inverse for {gen} is wrong")


def _words_up_to(length: int, g2: int):
    nl = 2 * g2
    frontier = [b""]
    for _ in range(length):
        nxt = []
        for w in frontier:
            for x in range(nl):
                if w and x == (w[-1] + g2) % nl:
                    continue
                nxt.append(w + bytes([x]))
        yield from nxt
        frontier = nxt


def build_genus2_octagon() -> SurfaceGroup:
    """The regular-octagon genus-2 group with relator ``abcdABCD``."""
    length = 2.0 * math.acosh(1.0 + math.sqrt(2.0))
    T = _translation(length)
    g = [_rotation(k * math.pi / 4) @ T @ _rotation(-k * math.pi / 4) for k in range(4)]
    gens = np.array([g[0], _sl2_inverse(g[1]), g[2], _sl2_inverse(g[3])])
    group = SurfaceGroup(genus=2, generators=gens, relator="abcdABCD",
                         commutator_basis=("ab", "cdb", "c", "d"),
                         basis_inverse=("xYzw", "WZy", "z", "w"))
    group.check()
    return group


# -- words -------------------------------------------------------------------

def reduce(group: SurfaceGroup, w: str) -> str:
    """Freely reduced geodesic word for the element ``w``; empty iff identity."""
    return decode(_k.dehn_reduce(encode(w), group.succ_f, group.succ_b, group.ngen))


def cyclic_canonical(group: SurfaceGroup, w: str) -> str:
    """Canonical representative of the conjugacy class of ``w``.

    Free and cyclic reduction plus cyclic Dehn reduction, then the least
    word (length, then letter order) over rotations and length-preserving
    half-relator substitutions.
    """
    out = _k.cyclic_canonical(encode(w), group.succ_f, group.succ_b, group.ngen)
    if not out:
        raise ValueError("identity has no conjugacy-class representative")
    return decode(out)


def canonical_by_conjugation(group: SurfaceGroup, w: str, radius: int = 4) -> str:
    """Slow check of :func:`cyclic_canonical`: minimum over all conjugates ``u w u^-1``, ``|u| <= radius``."""
    codes = encode(w)
    sf, sb, g2 = group.succ_f, group.succ_b, group.ngen
    best = _k.cyclic_canonical(codes, sf, sb, g2)
    if not best:
        raise ValueError("identity has no conjugacy-class representative")
    for u in _words_up_to(radius, g2):
        uinv = _k.inverse_word(u, g2)
        c = _k.cyclic_canonical(_k.dehn_reduce(u + codes + uinv, sf, sb, g2), sf, sb, g2)
        if (len(c), c) < (len(best), best):
            best = c
    return decode(best)


def word_matrix(group: SurfaceGroup, w: str) -> np.ndarray:
    return group.matrix_codes(encode(w))


def is_primitive(group: SurfaceGroup, canonical_cyclic: str) -> bool:
    """False iff the class is a proper power.

    Looks for a periodic word anywhere in the class's minimal cyclic orbit.
    """
    orbit = _k.cyclic_orbit(encode(canonical_cyclic), group.succ_f, group.succ_b, group.ngen)
    if not orbit:
        raise ValueError("identity is not a primitive class")
    return all(_k.is_periodic(v) == 1 for v in orbit)


# -- tables ------------------------------------------------------------------

@dataclass(frozen=True)
class PrimitiveClass:
    canonical_word: str
    length: float
    primitive: bool
    inverse_pair: int
    p0_representative: bool


@dataclass(frozen=True)
class GeodesicTable:
    cutoff: float
    classes: tuple[PrimitiveClass, ...]
    preset: str = "octagon"
    genus: int = 2
    version: int = TABLE_FORMAT_VERSION

    def __len__(self) -> int:
        return len(self.classes)

    @cached_property
    def lengths(self) -> np.ndarray:
        return np.array([c.length for c in self.classes], dtype=float)

    @cached_property
    def words(self) -> list[str]:
        return [c.canonical_word for c in self.classes]

    @cached_property
    def pairs(self) -> np.ndarray:
        return np.array([c.inverse_pair for c in self.classes], dtype=np.int64)

    @cached_property
    def p0_mask(self) -> np.ndarray:
        return np.array([c.p0_representative for c in self.classes], dtype=bool)

    def restrict(self, T: float) -> "GeodesicTable":
        """Sub-table of classes with length <= T (pairs re-indexed)."""
        if T > self.cutoff + 1e-12:
            raise ValueError(f"T={T} exceeds table cutoff {self.cutoff}")
        keep = [i for i, c in enumerate(self.classes) if c.length <= T]
        new_index = {i: j for j, i in enumerate(keep)}
        classes = tuple(PrimitiveClass(c.canonical_word, c.length, c.primitive,
                                       new_index[c.inverse_pair], c.p0_representative)
                        for c in (self.classes[i] for i in keep))
        return GeodesicTable(cutoff=T, classes=classes, preset=self.preset, genus=self.genus)


def _sort_key(word: str, length: float):
    return (round(length, LENGTH_TIE_DECIMALS), word_order_key(word))


def _with_pairs(items: list[tuple[str, float]], inverse_of: dict[str, str]) -> tuple[PrimitiveClass, ...]:
    items = sorted(items, key=lambda wl: _sort_key(*wl))
    index = {w: i for i, (w, _) in enumerate(items)}
    out = []
    for i, (w, l) in enumerate(items):
        j = index.get(inverse_of[w])
        if j is None:
            raise RuntimeError(f"inverse class of {w} missing from table")
        if j == i:
            raise RuntimeError(f"class {w} is its own inverse")
        out.append(PrimitiveClass(w, l, True, j, i < j))
    return tuple(out)


def projected_class_count(T: float) -> float:
    return math.exp(T) / T if T > 0 else 0.0


def _ball_job(args):
    gens, sf, sb, g2, trace_max, cosh_dmax, max_nodes, roots = args
    found, nodes = _k.enumerate_ball(gens, sf, sb, g2, trace_max, cosh_dmax, max_nodes, roots)
    return found, nodes


def enumerate_all_classes(group: SurfaceGroup, T: float, *, workers: int = 1,
                          max_nodes: int = 400_000_000) -> dict[str, float]:
    """Every conjugacy class (primitive or not) with length <= T, word-ball search.

    Each class has a conjugate whose axis meets the fundamental octagon.
    The tile path along one period of that axis spells a Dehn-reduced word
    whose prefixes stay within ``T + 2R`` of the centre (R the octagon's
    circumradius), so the pruned search reaches it.
    """
    if T <= 0:
        return {}
    R = group.circumradius
    cosh_dmax = math.cosh(T + 2 * R) * (1 + 1e-9)
    trace_max = 2 * math.cosh(T / 2) * (1 + 1e-12)
    g2 = group.ngen
    gens = np.ascontiguousarray(group.letter_matrices, dtype=float)
    roots = list(range(2 * g2))
    jobs = [(gens, group.succ_f, group.succ_b, g2, trace_max, cosh_dmax, max_nodes, bytes([x]))
            for x in roots]
    found: set = set()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            for f, _ in ex.map(_ball_job, jobs):
                found |= f
    else:
        for job in jobs:
            f, _ = _ball_job(job)
            found |= f
    out = {}
    for codes in found:
        L = translation_length(group.matrix_codes(codes))
        if L <= T:
            out[decode(codes)] = L
    return out


def _power_canon(group: SurfaceGroup, w: str, k: int) -> str:
    return cyclic_canonical(group, w * k)


def enumerate_primitives(group: SurfaceGroup, T: float, *, verify_radius: int | None = None,
                         max_classes: float = 2.5e5, workers: int = 1) -> GeodesicTable:
    """Complete, sorted table of primitive classes with length <= T.

    ``verify_radius`` runs :func:`canonical_by_conjugation` on every class and
    raises if it disagrees with the fast canonical form; by default radius 4
    is used for ``T <= 8`` and the check is skipped beyond.
    """
    if T > 0 and projected_class_count(T) > max_classes:
        raise MemoryError(f"projected ~{projected_class_count(T):.0f} classes exceeds ceiling {max_classes:.0f}")
    if T < group.systole:
        return GeodesicTable(cutoff=T, classes=(), preset=group.preset, genus=group.genus)
    classes = enumerate_all_classes(group, T, workers=workers)
    nonprim = set()
    for w, L in classes.items():
        k = 2
        while k * L <= T + 1e-9:
            pw = _power_canon(group, w, k)
            if pw in classes:
                nonprim.add(pw)
            k += 1
    prim = {w: L for w, L in classes.items() if w not in nonprim}
    for w in prim:
        if not is_primitive(group, w):
            raise RuntimeError(f"orbit check finds {w} periodic but no root was found")
    if verify_radius is None:
        verify_radius = 4 if T <= 8 else 0
    if verify_radius > 0:
        for w in prim:
            if canonical_by_conjugation(group, w, verify_radius) != w:
                raise RuntimeError(f"canonical form of {w} not stable under conjugation")
    inverse_of = {w: cyclic_canonical(group, inverse(w)) for w in prim}
    for w, L in prim.items():
        if abs(translation_length(word_matrix(group, w)) - L) > 1e-9:
            raise RuntimeError("stored length disagrees with word matrix")
    return GeodesicTable(cutoff=T, classes=_with_pairs(list(prim.items()), inverse_of),
                         preset=group.preset, genus=group.genus)


def count(table: GeodesicTable, T: float) -> tuple[int, int]:
    """(N0(T), N(T)) with N(T) = sum over k >= 1 of N0(T / k)."""
    if T > table.cutoff + 1e-12:
        raise ValueError(f"T={T} exceeds table cutoff {table.cutoff}")
    L = table.lengths
    n0 = int(np.count_nonzero(L <= T))
    total = 0
    k = 1
    while len(L) and T / k >= L.min():
        total += int(np.count_nonzero(L <= T / k))
        k += 1
    return n0, total


# -- matrix-ball oracle ------------------------------------------------------

def _to_disk(z: complex) -> complex:
    return (z - 1j) / (z + 1j)


def _axis_endpoints(m: np.ndarray) -> tuple[complex, complex]:
    a, b, c, d = (float(v) for v in m.ravel())
    if a + d < 0:
        a, b, c, d = -a, -b, -c, -d
    tr = a + d
    if abs(c) < 1e-14:
        return 1.0 + 0j, _to_disk(complex(b / (d - a)))
    s = math.sqrt(tr * tr - 4.0)
    return _to_disk(complex(((a - d) + s) / (2 * c))), _to_disk(complex(((a - d) - s) / (2 * c)))


@dataclass
class _Octagon:
    vertices: list[complex]     # Klein-model vertices

    @classmethod
    def of(cls, group: SurfaceGroup) -> "_Octagon":
        angles = []
        for x in range(2 * group.ngen):
            g = group.letter_matrices[x]
            z = (g[0, 0] * 1j + g[0, 1]) / (g[1, 0] * 1j + g[1, 1])
            w = _to_disk(z)
            angles.append(math.atan2(w.imag, w.real))
        angles.sort()
        n = len(angles)
        kr = math.tanh(group.circumradius)
        verts = []
        for i in range(n):
            a0, a1 = angles[i], angles[(i + 1) % n] + (2 * math.pi if i == n - 1 else 0.0)
            t = 0.5 * (a0 + a1)
            verts.append(kr * complex(math.cos(t), math.sin(t)))
        return cls(verts)

    def axis_meets(self, m: np.ndarray, tol: float = 1e-9) -> bool:
        p, q = _axis_endpoints(m)
        d = q - p
        nd = abs(d)
        s = [((d.conjugate()) * (v - p)).imag / nd for v in self.vertices]
        return min(s) <= tol and max(s) >= -tol


def _pkey(m: np.ndarray) -> tuple:
    v = m.ravel()
    s = 1.0 if (v[0] > 1e-9 or (abs(v[0]) <= 1e-9 and v[1] > 0)) else -1.0
    return tuple(np.round(s * v, 6) + 0.0)


@dataclass
class OracleClass:
    length: float
    primitive: bool
    member_words: list[str] = field(default_factory=list)


def enumerate_matrix_ball(group: SurfaceGroup, T: float) -> list[OracleClass]:
    """Independent enumeration: conjugacy classes found geometrically.

    Breadth-first search over group elements keyed by matrix, kept within
    ``rho + R`` of the centre where ``sinh(rho/2) = cosh(R) sinh(T/2)``
    bounds the displacement of any element of length <= T whose axis meets
    the octagon. Those elements are grouped into classes by union-find over
    single-letter conjugation; a class is non-primitive when it contains a
    proper power of another such element.
    """
    if T < group.systole:
        return []
    R = group.circumradius
    rho = 2 * math.asinh(math.cosh(R) * math.sinh(T / 2))
    cosh_lim = math.cosh(rho + R) * (1 + 1e-9)
    trace_max = 2 * math.cosh(T / 2) * (1 + 1e-12)
    G = group.letter_matrices
    nl = len(G)
    ident = np.eye(2)
    elems: dict[tuple, tuple[np.ndarray, str]] = {_pkey(ident): (ident, "")}
    frontier = [(ident, "")]
    while frontier:
        nxt = []
        for m, w in frontier:
            for x in range(nl):
                y = m @ G[x]
                if 0.5 * float((y * y).sum()) > cosh_lim:
                    continue
                k = _pkey(y)
                if k in elems:
                    continue
                wy = w + LETTERS[x]
                elems[k] = (y, wy)
                nxt.append((y, wy))
        frontier = nxt
    octagon = _Octagon.of(group)
    S: dict[tuple, tuple[np.ndarray, str]] = {}
    for k, (m, w) in elems.items():
        tr = abs(m[0, 0] + m[1, 1])
        if 2.0 + 1e-9 < tr <= trace_max and octagon.axis_meets(m):
            S[k] = (m, w)
    parent = {k: k for k in S}

    def find(k):
        while parent[k] != k:
            parent[k] = parent[parent[k]]
            k = parent[k]
        return k

    Ginv = [_sl2_inverse(g) for g in G]
    for k, (m, _) in S.items():
        for x in range(nl):
            kc = _pkey(Ginv[x] @ m @ G[x])
            if kc in S:
                ra, rb = find(k), find(kc)
                if ra != rb:
                    parent[ra] = rb
    nonprim = set()
    for k, (m, _) in S.items():
        p = m @ m
        while abs(p[0, 0] + p[1, 1]) <= trace_max:
            kp = _pkey(p)
            if kp in S:
                nonprim.add(find(kp))
            p = p @ m
    comps: dict[tuple, OracleClass] = {}
    members = defaultdict(list)
    for k, (m, w) in S.items():
        members[find(k)].append(w)
    for root, words in members.items():
        m = S[root][0]
        comps[root] = OracleClass(length=translation_length(m), primitive=root not in nonprim,
                                  member_words=sorted(words, key=word_order_key))
    return sorted(comps.values(), key=lambda c: (round(c.length, LENGTH_TIE_DECIMALS), c.member_words[0]))


def compare_with_oracle(group: SurfaceGroup, table: GeodesicTable, T: float) -> dict:
    """Cross-check ``table`` (restricted to T) against :func:`enumerate_matrix_ball`.

    Agreement means equal primitive and total counts, equal sorted length
    lists, every oracle class canonicalising to a single word (no class
    split by the canonical form) and those words being exactly the table's.
    """
    tab = table.restrict(T)
    oracle = enumerate_matrix_ball(group, T)
    prim = [o for o in oracle if o.primitive]
    reps_ = [{cyclic_canonical(group, w) for w in o.member_words} for o in prim]
    split = sum(len(r) != 1 for r in reps_)
    words = {next(iter(r)) for r in reps_ if len(r) == 1}
    N0, N = count(tab, T)
    lengths_ok = len(prim) == N0 and bool(np.allclose(sorted(o.length for o in prim), tab.lengths, atol=1e-9))
    agree = (N0, N) == (len(prim), len(oracle)) and lengths_ok and split == 0 and words == set(tab.words)
    return {"agree": agree, "N0": N0, "N": N, "oracle_N0": len(prim), "oracle_N": len(oracle),
            "split_classes": split}
