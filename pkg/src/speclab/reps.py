"""Twisting data: abelian characters, compact-group representations, Haar moments.

Characters and representations are specified on the generator letters
``a, b, c, d``; every word is evaluated as the ordered product of letter
images.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, linalg, optimize

from .covers import HomSample
from .fuchsian import LETTERS, GeodesicTable, SurfaceGroup, encode, inverse
from .rng import as_generator, stream


# -- abelian characters ------------------------------------------------------

def abelianization(group: SurfaceGroup, w: str) -> np.ndarray:
    """Signed exponent sum of each generator letter."""
    g2 = group.ngen
    out = np.zeros(g2, dtype=np.int64)
    for x in encode(w):
        if x < g2:
            out[x] += 1
        else:
            out[x - g2] -= 1
    return out


@dataclass(frozen=True)
class AbelianCharacter:
    theta: tuple[float, ...]

    def __post_init__(self):
        if any(not (0.0 <= t < 1.0) for t in self.theta):
            raise ValueError("character exponents must lie in [0, 1)")

    @property
    def dim(self) -> int:
        return 1


def char_value(chi: AbelianCharacter, w: str, k: int = 1) -> complex:
    if k < 1:
        raise ValueError("k must be >= 1")
    counts = _letter_counts(w, len(chi.theta))
    phase = k * float(np.dot(chi.theta, counts))
    return complex(np.exp(2j * math.pi * phase))


def _letter_counts(w: str, g2: int) -> np.ndarray:
    out = np.zeros(g2)
    for ch in w:
        i = LETTERS.index(ch)
        if i < g2:
            out[i] += 1
        else:
            out[i - g2] -= 1
    return out


def is_involutive(chi: AbelianCharacter) -> bool:
    return all(t in (0.0, 0.5) for t in chi.theta)


# -- Haar measure ------------------------------------------------------------

def _haar_unitary(rng, M, N):
    Z = (rng.standard_normal((M, N, N)) + 1j * rng.standard_normal((M, N, N))) / math.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R, axis1=1, axis2=2)
    return Q * (d / np.abs(d))[:, None, :]


def _haar_orthogonal(rng, M, N):
    Q, R = np.linalg.qr(rng.standard_normal((M, N, N)))
    d = np.sign(np.diagonal(R, axis1=1, axis2=2))
    return Q * d[:, None, :]


def _j_matrix(N):
    J = np.zeros((2 * N, 2 * N))
    J[:N, N:] = -np.eye(N)
    J[N:, :N] = np.eye(N)
    return J


def _haar_symplectic(rng, M, N):
    """Compact Sp(N) in U(2N): unitary S with S^T J S = J.

    Quaternionic Gram-Schmidt: each new column u is orthogonalised
    against all previous u_j and J conj(u_j); the pair (u, J conj(u)) is
    automatically orthonormal.
    """
    J = _j_matrix(N)
    V = (rng.standard_normal((M, 2 * N, N)) + 1j * rng.standard_normal((M, 2 * N, N))) / math.sqrt(2)
    cols: list[np.ndarray] = []
    for k in range(N):
        v = V[:, :, k]
        for u in cols:
            v = v - np.einsum("mi,mi->m", u.conj(), v)[:, None] * u
        v = v / np.linalg.norm(v, axis=1)[:, None]
        w = np.einsum("ij,mj->mi", J, v.conj())
        cols.append(v)
        cols.append(w)
    U = np.stack(cols[0::2], axis=2)
    W = np.stack(cols[1::2], axis=2)
    return np.concatenate([U, W], axis=2)


def haar_sample(kind: str, N: int, rng=None, size: int | None = None) -> np.ndarray:
    """Haar-random element(s) of U(N), SU(N), SO(N), O(N) or compact Sp(N) (2N x 2N)."""
    rng = as_generator(rng)
    M = 1 if size is None else size
    kind = kind.upper()
    if kind == "U":
        out = _haar_unitary(rng, M, N)
    elif kind == "SU":
        out = _haar_unitary(rng, M, N)
        det = np.linalg.det(out)
        out = out * (det ** (-1.0 / N))[:, None, None]
    elif kind == "O":
        out = _haar_orthogonal(rng, M, N)
    elif kind == "SO":
        out = _haar_orthogonal(rng, M, N)
        flip = np.linalg.det(out) < 0
        out[flip, :, 0] *= -1
    elif kind == "SP":
        out = _haar_symplectic(rng, M, N)
    else:
        raise ValueError(f"unknown group kind {kind!r}")
    return out[0] if size is None else out


@dataclass(frozen=True)
class HaarMoments:
    kind: str
    N: int
    M: int
    abs2: float            # mean |Tr g|^2
    abs2_se: float
    sq: complex            # mean (Tr g)^2
    sq_se: float           # SE of real and imaginary parts (max)
    f_mean: float          # mean (Tr g + conj Tr g)^2
    f_se: float

    @property
    def f_from_moments(self) -> float:
        return 2.0 * self.sq.real + 2.0 * self.abs2


def haar_trace_moments(kind: str, N: int, M: int, rng=None, *, batch: int = 20000) -> HaarMoments:
    if M < 1000:
        raise ValueError("M >= 1000 required")
    rng = as_generator(rng)
    tr = []
    done = 0
    while done < M:
        b = min(batch, M - done)
        g = haar_sample(kind, N, rng, size=b)
        tr.append(np.trace(g, axis1=1, axis2=2))
        done += b
    t = np.concatenate(tr)
    a2 = np.abs(t) ** 2
    s2 = t ** 2
    f = (t + t.conj()).real ** 2
    rt = math.sqrt(M)
    return HaarMoments(kind.upper(), N, M, float(a2.mean()), float(a2.std(ddof=1) / rt),
                       complex(s2.mean()), float(max(s2.real.std(ddof=1), s2.imag.std(ddof=1)) / rt),
                       float(f.mean()), float(f.std(ddof=1) / rt))


# -- matrix representations --------------------------------------------------

@dataclass(frozen=True, eq=False)
class MatrixRep:
    kind: str
    N: int
    images: np.ndarray          # (2g, N, N) generator images
    relator_defect: float
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def dim(self) -> int:
        return self.N

    def letter_matrix(self, x: int) -> np.ndarray:
        g2 = len(self.images)
        return self.images[x] if x < g2 else self.images[x - g2].conj().T

    def word_matrix(self, w: str) -> np.ndarray:
        m = self._cache.get(w)
        if m is None:
            m = np.eye(self.N, dtype=self.images.dtype)
            for x in encode(w):
                m = m @ self.letter_matrix(x)
            if len(self._cache) < 200_000:
                self._cache[w] = m
        return m


def rep_trace(rep: MatrixRep, w: str, k: int = 1) -> complex:
    if k < 1:
        raise ValueError("k must be >= 1")
    return complex(np.trace(np.linalg.matrix_power(rep.word_matrix(w), k)))


def _eval_basis(expr: str, imgs: dict[str, np.ndarray]) -> np.ndarray:
    N = next(iter(imgs.values())).shape[0]
    m = np.eye(N, dtype=complex)
    for ch in expr:
        m = m @ (imgs[ch] if ch.islower() else imgs[ch.lower()].conj().T)
    return m


def _relator_defect(group: SurfaceGroup, images: np.ndarray) -> float:
    N = images.shape[1]
    m = np.eye(N, dtype=images.dtype)
    g2 = group.ngen
    for x in encode(group.relator):
        m = m @ (images[x] if x < g2 else images[x - g2].conj().T)
    return float(np.linalg.norm(m - np.eye(N)))


def commutator_solution(t: np.ndarray, rng=None) -> tuple[np.ndarray, np.ndarray]:
    """(Z, W) in SU(N) with Z W Z^-1 W^-1 = t for t in SU(N).

    With t = U diag(delta) U^-1 and P the cyclic shift e_i -> e_(i+1),
    P diag(q) P^-1 = diag(q_(i-1)), so q_i = q_(i-1) / delta_i solves
    [P, diag(q)] = diag(delta); the cycle closes because prod delta = 1.
    W is then multiplied by a random element of Z's centraliser.
    """
    rng = as_generator(rng)
    N = t.shape[0]
    T, U = linalg.schur(t, output="complex")
    delta = np.diagonal(T).copy()
    P = np.roll(np.eye(N), 1, axis=0).astype(complex)
    P *= np.exp(1j * math.pi * (N - 1) / N)         # det P = 1
    q = np.empty(N, dtype=complex)
    q[0] = 1.0
    for i in range(1, N):
        q[i] = q[i - 1] / delta[i]
    q *= np.prod(q) ** (-1.0 / N)
    Q = np.diag(q)
    # centraliser of P: diagonal in the Fourier basis
    F = np.exp(2j * math.pi * np.outer(np.arange(N), np.arange(N)) / N) / math.sqrt(N)
    phi = rng.uniform(0, 2 * math.pi, N)
    phi -= phi.mean()
    C = F @ np.diag(np.exp(1j * phi)) @ F.conj().T
    Z = U @ P @ U.conj().T
    W = U @ Q @ C @ U.conj().T
    return Z, W


def sample_su_rep(group: SurfaceGroup, N: int, rng=None, *, max_retries: int = 20) -> MatrixRep:
    """Representation into SU(N) with the relator satisfied to ~1e-12.

    The first commutator pair is Haar; the second pair is built by
    :func:`commutator_solution`; generator images follow from the
    group's commutator basis.
    """
    if N < 2:
        raise ValueError("SU(N) needs N >= 2")
    if group.genus != 2 or not group.basis_inverse:
        raise ValueError("needs a genus-2 commutator basis")
    rng = as_generator(rng)
    for _ in range(max_retries):
        X, Y = haar_sample("SU", N, rng, size=2)
        t = Y @ X @ Y.conj().T @ X.conj().T            # [X, Y]^-1
        Z, W = commutator_solution(t, rng)
        g = haar_sample("SU", N, rng)
        imgs = {k: g @ v @ g.conj().T for k, v in zip("xyzw", (X, Y, Z, W))}
        images = np.stack([_eval_basis(e, imgs) for e in group.basis_inverse])
        defect = _relator_defect(group, images)
        if defect <= 1e-8 and _in_group("SU", images, 1e-10):
            return MatrixRep("SU", N, images, defect)
    raise RuntimeError("SU completion failed; spectrum too degenerate")


def _skew(v: np.ndarray, N: int) -> np.ndarray:
    S = np.zeros((N, N))
    S[np.triu_indices(N, 1)] = v
    return S - S.T


def sample_so_rep(group: SurfaceGroup, N: int, rng=None, *, restarts: int = 50,
                  accept: float = 1e-6) -> MatrixRep:
    """Representation into SO(N); the second commutator pair is found numerically.

    Least-squares fit of [expm(S1), expm(S2)] = t over skew S1, S2 with
    random restarts. Fails if no restart reaches ``accept``.
    """
    if N < 3:
        raise ValueError("SO(N) needs N >= 3")
    if group.genus != 2 or not group.basis_inverse:
        raise ValueError("needs a genus-2 commutator basis")
    rng = as_generator(rng)
    X, Y = haar_sample("SO", N, rng, size=2)
    t = Y @ X @ Y.T @ X.T
    m = N * (N - 1) // 2

    def resid(p):
        A = linalg.expm(_skew(p[:m], N))
        B = linalg.expm(_skew(p[m:], N))
        return (A @ B @ A.T @ B.T - t).ravel()

    best = None
    for _ in range(restarts):
        p0 = rng.uniform(-math.pi, math.pi, 2 * m)
        res = optimize.least_squares(resid, p0, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15)
        err = float(np.linalg.norm(res.fun))
        if best is None or err < best[0]:
            best = (err, res.x)
        if err <= accept * 1e-3:
            break
    if best is None or best[0] > accept:
        raise RuntimeError("SO commutator completion failed after restarts")
    p = best[1]
    Z = linalg.expm(_skew(p[:m], N))
    W = linalg.expm(_skew(p[m:], N))
    imgs = {"x": X, "y": Y, "z": Z, "w": W}
    images = np.stack([_eval_basis(e, imgs).real for e in group.basis_inverse])
    defect = _relator_defect(group, images)
    if defect > accept or not _in_group("SO", images, 1e-10):
        raise RuntimeError(f"SO completion defect {defect:.2e}")
    return MatrixRep("SO", N, images, defect)


def _in_group(kind: str, images: np.ndarray, tol: float) -> bool:
    N = images.shape[1]
    for g in images:
        if np.linalg.norm(g.conj().T @ g - np.eye(N)) > tol:
            return False
        if kind in ("SU", "SO") and abs(np.linalg.det(g) - 1) > tol:
            return False
        if kind == "SO" and np.iscomplexobj(g) and np.abs(g.imag).max() > tol:
            return False
    return True


# -- character specs ---------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CharacterSpec:
    """Uniform trace evaluator over abelian characters and matrix reps."""
    text: str
    abelian: AbelianCharacter | None = None
    rep: MatrixRep | None = None

    @property
    def dim(self) -> int:
        return 1 if self.abelian is not None else self.rep.N

    @property
    def orientation_symmetric(self) -> bool:
        """True when chi(gamma^-1) = chi(gamma) for all gamma (GOE case)."""
        if self.abelian is not None:
            return is_involutive(self.abelian)
        return self.rep.kind in ("SO", "SP")

    def trace(self, w: str, k: int = 1) -> complex:
        if self.abelian is not None:
            return char_value(self.abelian, w, k)
        return rep_trace(self.rep, w, k)

    def matrix(self, w: str) -> np.ndarray:
        if self.abelian is not None:
            return np.array([[char_value(self.abelian, w, 1)]]) if w else np.eye(1, dtype=complex)
        return self.rep.word_matrix(w)


def parse_character(text: str, group: SurfaceGroup) -> CharacterSpec:
    """``trivial``, ``abelian:t1,t2,t3,t4``, ``su:N:seed`` or ``so:N:seed``."""
    kind, _, rest = text.partition(":")
    kind = kind.strip().lower()
    if kind == "trivial":
        return CharacterSpec(text, abelian=AbelianCharacter((0.0,) * group.ngen))
    if kind == "abelian":
        theta = tuple(float(v) for v in rest.split(","))
        if len(theta) != group.ngen:
            raise ValueError(f"abelian character needs {group.ngen} exponents")
        return CharacterSpec(text, abelian=AbelianCharacter(theta))
    if kind in ("su", "so"):
        N_s, _, seed_s = rest.partition(":")
        N, seed = int(N_s), int(seed_s or 0)
        sampler = sample_su_rep if kind == "su" else sample_so_rep
        return CharacterSpec(text, rep=sampler(group, N, stream(seed, 0x5EED)))
    raise ValueError(f"cannot parse character spec {text!r}")


# -- induced representation --------------------------------------------------

def induced_trace_oracle(charspec: CharacterSpec, hom: HomSample, w: str,
                         max_size: int = 256) -> tuple[complex, complex]:
    """(trace of the explicit induced block matrix, chi(w) * F_n(w)).

    Per orbit of the sheets a base sheet b is fixed and coset words g_i
    with phi(g_i)(i) = b are found by a Schreier-graph search. Block (i, j)
    is rho(g_i w g_j^-1) when phi(w)(j) = i, zero otherwise.
    """
    n, dim = hom.n, charspec.dim
    if n * dim > max_size:
        raise ValueError(f"induced matrix of size {n * dim} exceeds guard {max_size}")
    imgs = hom.letter_images
    nl = len(imgs)
    g2 = nl // 2
    coset: dict[int, str] = {}
    for b in range(n):
        if b in coset:
            continue
        coset[b] = ""
        queue = [b]
        while queue:
            i = queue.pop(0)
            for x in range(nl):
                j = int(imgs[x][i])
                if j not in coset:
                    # g_j = g_i x^-1 sends j back to i, then to the base
                    coset[j] = coset[i] + LETTERS[(x + g2) % nl]
                    queue.append(j)
    from .covers import permutation_of_word, fixed_points
    pw = permutation_of_word(hom, w)
    big = np.zeros((n * dim, n * dim), dtype=complex)
    for j in range(n):
        i = int(pw[j])
        word = coset[i] + w + inverse(coset[j])
        big[i * dim:(i + 1) * dim, j * dim:(j + 1) * dim] = charspec.matrix(word)
    lhs = complex(np.trace(big))
    rhs = charspec.trace(w, 1) * fixed_points(hom, w, 1) if w else dim * n
    return lhs, complex(rhs)


# -- Chebotarev sums ---------------------------------------------------------

def log_integral(y: float) -> float:
    """Li(y) = integral from 2 to y of dt / log t."""
    if y <= 2:
        return 0.0
    val, _ = integrate.quad(lambda s: math.exp(s) / s, math.log(2.0), math.log(y),
                            epsrel=1e-12, limit=200)
    return val


TracePoly = dict  # {(p, q): coefficient} meaning coeff * Tr^p * conj(Tr)^q


def parse_trace_poly(text: str) -> TracePoly:
    """``1``, ``tr``, ``abs2``, ``sq`` or ``(tr+ctr)^2``; or ``p,q:c;...`` explicit terms."""
    named = {"1": {(0, 0): 1.0}, "tr": {(1, 0): 1.0}, "abs2": {(1, 1): 1.0},
             "sq": {(2, 0): 1.0}, "(tr+ctr)^2": {(2, 0): 1.0, (1, 1): 2.0, (0, 2): 1.0}}
    if text in named:
        return named[text]
    out = {}
    for term in text.split(";"):
        pq, _, c = term.partition(":")
        p, q = (int(v) for v in pq.split(","))
        out[(p, q)] = complex(c) if "j" in c else float(c)
    return out


def chebotarev_sum(table: GeodesicTable, charspec: CharacterSpec, f: TracePoly | str,
                   x: float) -> tuple[complex, complex]:
    """(sum over primitive classes with length <= x of f(rho(gamma)), sum / Li(e^x))."""
    if x > table.cutoff + 1e-12:
        raise ValueError(f"x={x} exceeds table cutoff {table.cutoff}")
    if isinstance(f, str):
        f = parse_trace_poly(f)
    total = 0j
    for c in table.classes:
        if c.length > x:
            break
        tr = charspec.trace(c.canonical_word, 1)
        total += sum(coef * tr ** p * np.conj(tr) ** q for (p, q), coef in f.items())
    return complex(total), complex(total / log_integral(math.exp(x)))


__all__ = [
    "abelianization", "AbelianCharacter", "char_value", "is_involutive", "haar_sample",
    "haar_trace_moments", "HaarMoments", "MatrixRep", "rep_trace", "sample_su_rep",
    "sample_so_rep", "commutator_solution", "CharacterSpec", "parse_character",
    "induced_trace_oracle", "log_integral", "chebotarev_sum", "parse_trace_poly",
]
