# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; same functions and semantics as ``_pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport acosh, fabs
from libc.string cimport memcpy

cnp.import_array()

cdef enum:
    MAXW = 1024
MAX_RELATOR = 8
cdef int HALF = 4
cdef int REL = 8


cdef inline int _inv(int x, int g2) nogil:
    return (x + g2) % (2 * g2)


def inverse_word(bytes w, int g2):
    cdef int m = len(w), i
    cdef const unsigned char* p = w
    out = bytearray(m)
    for i in range(m):
        out[i] = _inv(p[m - 1 - i], g2)
    return bytes(out)


cdef int _free_reduce(unsigned char* w, int m, int g2) nogil:
    cdef int n = 0, i
    for i in range(m):
        if n > 0 and w[n - 1] == _inv(w[i], g2):
            n -= 1
        else:
            w[n] = w[i]
            n += 1
    return n


def free_reduce(bytes w, int g2):
    cdef unsigned char buf[MAXW]
    cdef int m = _load(w, buf)
    m = _free_reduce(buf, m, g2)
    return buf[:m]


cdef int _load(bytes w, unsigned char* buf) except -1:
    cdef int m = len(w)
    if m > MAXW - 16:
        raise ValueError("word too long for compiled kernels")
    memcpy(buf, <const unsigned char*> w, m)
    return m


cdef int _cyc_free(unsigned char* w, int m, int g2) nogil:
    cdef int i = 0, j = m - 1, k
    while j > i and w[i] == _inv(w[j], g2):
        i += 1
        j -= 1
    if i > 0:
        for k in range(j - i + 1):
            w[k] = w[i + k]
    return j - i + 1 if m > 0 else 0


cdef int _replacement(int x, int k, const unsigned char* succ, int g2, unsigned char* out) nogil:
    cdef int y = x, i, n = REL - k
    cdef unsigned char comp[8]
    for i in range(k):
        y = succ[y]
    for i in range(n):
        comp[i] = y
        y = succ[y]
    for i in range(n):
        out[i] = _inv(comp[n - 1 - i], g2)
    return n


cdef inline int _linear_run(const unsigned char* w, int m, int i, const unsigned char* succ) nogil:
    cdef int k = 1
    while i + k < m and succ[w[i + k - 1]] == w[i + k]:
        k += 1
    return k


cdef inline int _cyclic_run(const unsigned char* w, int m, int i, const unsigned char* succ) nogil:
    cdef int k = 1
    while k < m and succ[w[(i + k - 1) % m]] == w[(i + k) % m]:
        k += 1
    return k


cdef int _splice(unsigned char* w, int m, int i, int k, const unsigned char* rep, int nr) nogil:
    """w[:i] + rep + w[i+k:] in place; returns new length."""
    cdef unsigned char tmp[MAXW]
    cdef int n = 0, j
    for j in range(i):
        tmp[n] = w[j]; n += 1
    for j in range(nr):
        tmp[n] = rep[j]; n += 1
    for j in range(i + k, m):
        tmp[n] = w[j]; n += 1
    memcpy(w, tmp, n)
    return n


cdef int _dehn_linear(unsigned char* w, int m, const unsigned char* sf, const unsigned char* sb, int g2) nogil:
    cdef unsigned char rep[8]
    cdef const unsigned char* succ
    cdef int changed = 1, i, s, k, nr
    m = _free_reduce(w, m, g2)
    while changed:
        changed = 0
        for i in range(m):
            for s in range(2):
                succ = sf if s == 0 else sb
                k = _linear_run(w, m, i, succ)
                if k > HALF:
                    if k > REL:
                        k = REL
                    nr = _replacement(w[i], k, succ, g2, rep)
                    m = _splice(w, m, i, k, rep, nr)
                    m = _free_reduce(w, m, g2)
                    changed = 1
                    break
            if changed:
                break
    return m


cdef list _half_swaps_linear(const unsigned char* w, int m, const unsigned char* sf, const unsigned char* sb, int g2):
    cdef unsigned char rep[8]
    cdef unsigned char buf[MAXW]
    cdef const unsigned char* succ
    cdef int i, s, n
    out = []
    for i in range(m - HALF + 1):
        for s in range(2):
            succ = sf if s == 0 else sb
            if _linear_run(w, m, i, succ) >= HALF:
                _replacement(w[i], HALF, succ, g2, rep)
                memcpy(buf, w, m)
                n = _splice(buf, m, i, HALF, rep, HALF)
                out.append(buf[:n])
    return out


cdef tuple _linear_closure(bytes w, const unsigned char* sf, const unsigned char* sb, int g2):
    cdef unsigned char buf[MAXW]
    cdef int m = len(w), n
    seen = {w}
    frontier = [w]
    while frontier:
        nxt = []
        for u in frontier:
            for v in _half_swaps_linear(<const unsigned char*> (<bytes> u), m, sf, sb, g2):
                n = _load(v, buf)
                n = _dehn_linear(buf, n, sf, sb, g2)
                r = buf[:n]
                if n < m:
                    return r, seen
                if r not in seen:
                    seen.add(r)
                    nxt.append(r)
        frontier = nxt
    return None, seen


def dehn_reduce(bytes w, bytes succ_f, bytes succ_b, int g2):
    cdef unsigned char buf[MAXW]
    cdef const unsigned char* sf = succ_f
    cdef const unsigned char* sb = succ_b
    cdef int m = _load(w, buf)
    m = _dehn_linear(buf, m, sf, sb, g2)
    cur = buf[:m]
    while True:
        shorter, _ = _linear_closure(cur, sf, sb, g2)
        if shorter is None:
            return cur
        cur = shorter


cdef int _cyclic_dehn(unsigned char* w, int m, const unsigned char* sf, const unsigned char* sb, int g2) nogil:
    cdef unsigned char rep[8]
    cdef unsigned char tmp[MAXW]
    cdef const unsigned char* succ
    cdef int changed = 1, i, s, k, nr, j, n
    m = _free_reduce(w, m, g2)
    m = _cyc_free(w, m, g2)
    while changed and m > 0:
        changed = 0
        for s in range(2):
            succ = sf if s == 0 else sb
            for i in range(m):
                k = _cyclic_run(w, m, i, succ)
                if k > HALF:
                    if k > REL:
                        k = REL
                    if k > m:
                        k = m
                    nr = _replacement(w[i], k, succ, g2, rep)
                    n = 0
                    for j in range(nr):
                        tmp[n] = rep[j]; n += 1
                    for j in range(m - k):
                        tmp[n] = w[(i + k + j) % m]; n += 1
                    memcpy(w, tmp, n)
                    m = _free_reduce(w, n, g2)
                    m = _cyc_free(w, m, g2)
                    changed = 1
                    break
            if changed:
                break
    return m


def cyclic_dehn(bytes w, bytes succ_f, bytes succ_b, int g2):
    cdef unsigned char buf[MAXW]
    cdef int m = _load(w, buf)
    m = _cyclic_dehn(buf, m, succ_f, succ_b, g2)
    return [buf[i] for i in range(m)]


cdef bytes _min_rotation(const unsigned char* w, int m):
    cdef int best = 0, i, j
    cdef int a, b
    for i in range(1, m):
        for j in range(m):
            a = w[(i + j) % m]
            b = w[(best + j) % m]
            if a != b:
                if a < b:
                    best = i
                break
    cdef unsigned char buf[MAXW]
    for j in range(m):
        buf[j] = w[(best + j) % m]
    return buf[:m]


def min_rotation(w):
    cdef unsigned char buf[MAXW]
    cdef int m = _load(bytes(w), buf)
    if m == 0:
        return b""
    return _min_rotation(buf, m)


cdef list _cyclic_moves(bytes u, const unsigned char* sf, const unsigned char* sb, int g2):
    cdef unsigned char rep[8]
    cdef unsigned char buf[MAXW]
    cdef const unsigned char* succ
    cdef const unsigned char* pu = u
    cdef int m = len(u), i, j, s, x, n
    out = []
    for s in range(2):
        succ = sf if s == 0 else sb
        for i in range(m):
            if _cyclic_run(pu, m, i, succ) < HALF:
                continue
            _replacement(pu[i], HALF, succ, g2, rep)
            n = 0
            for j in range(HALF):
                buf[n] = rep[j]; n += 1
            for j in range(m - HALF):
                buf[n] = pu[(i + HALF + j) % m]; n += 1
            n = _cyclic_dehn(buf, n, sf, sb, g2)
            out.append(buf[:n])
    for i in range(m):
        for x in range(2 * g2):
            if x == _inv(pu[i], g2) or x == pu[(i + m - 1) % m]:
                continue
            buf[0] = x
            for j in range(m):
                buf[1 + j] = pu[(i + j) % m]
            buf[m + 1] = _inv(x, g2)
            n = _dehn_linear(buf, m + 2, sf, sb, g2)
            shorter, seen = _linear_closure(buf[:n], sf, sb, g2)
            if shorter is not None:
                seen = (shorter,)
            for r in seen:
                n = _load(r, buf)
                n = _cyclic_dehn(buf, n, sf, sb, g2)
                out.append(buf[:n])
    return out


cdef set _cyclic_orbit(bytes w, const unsigned char* sf, const unsigned char* sb, int g2):
    cdef unsigned char buf[MAXW]
    cdef int m = _load(w, buf)
    m = _cyclic_dehn(buf, m, sf, sb, g2)
    cur = buf[:m]
    while True:
        m = len(cur)
        if m == 0:
            return set()
        start = _min_rotation(<const unsigned char*> (<bytes> cur), m)
        seen = {start}
        frontier = [start]
        shorter = None
        while frontier and shorter is None:
            nxt = []
            for u in frontier:
                for v in _cyclic_moves(u, sf, sb, g2):
                    if len(v) < m:
                        shorter = v
                        break
                    if len(v) > m:
                        continue
                    key = _min_rotation(<const unsigned char*> (<bytes> v), m)
                    if key not in seen:
                        seen.add(key)
                        nxt.append(key)
                if shorter is not None:
                    break
            frontier = nxt
        if shorter is None:
            return seen
        cur = shorter


def cyclic_orbit(w, bytes succ_f, bytes succ_b, int g2):
    return _cyclic_orbit(bytes(w), succ_f, succ_b, g2)


def cyclic_canonical(w, bytes succ_f, bytes succ_b, int g2):
    orbit = _cyclic_orbit(bytes(w), succ_f, succ_b, g2)
    return min(orbit) if orbit else b""


def is_periodic(w):
    cdef bytes b = bytes(w)
    cdef const unsigned char* p = b
    cdef int m = len(b), d, j, ok
    for d in range(1, m // 2 + 1):
        if m % d:
            continue
        ok = 1
        for j in range(d, m):
            if p[j] != p[j - d]:
                ok = 0
                break
        if ok:
            return m // d
    return 1


def enumerate_ball(cnp.ndarray gens, bytes succ_f, bytes succ_b, int g2,
                   double trace_max, double cosh_dmax, long max_nodes, bytes roots):
    cdef int nl = 2 * g2, depth, x, last, m, i
    cdef const unsigned char* sf = succ_f
    cdef const unsigned char* sb = succ_b
    cdef double G[64][4]
    cdef double a, b, c, d, p, q, r, s, tr, n0, n1, n2, n3
    cdef unsigned char word[MAXW]
    cdef unsigned char buf[MAXW]
    cdef double mats[MAXW][4]
    cdef int runf[MAXW]
    cdef int runb[MAXW]
    cdef int nextx[MAXW]
    cdef long nodes = 0
    cdef double[:, :, ::1] gv = np.ascontiguousarray(gens, dtype=np.float64)
    if nl > 64:
        raise ValueError("too many generators")
    for x in range(nl):
        G[x][0] = gv[x, 0, 0]; G[x][1] = gv[x, 0, 1]
        G[x][2] = gv[x, 1, 0]; G[x][3] = gv[x, 1, 1]
    found = set()
    memo = {}
    for root in roots:
        # explicit-stack DFS; nextx[depth] is the next child letter to try
        depth = 0
        word[0] = root
        mats[0][0] = G[root][0]; mats[0][1] = G[root][1]
        mats[0][2] = G[root][2]; mats[0][3] = G[root][3]
        runf[0] = 1; runb[0] = 1
        nextx[0] = -1
        while depth >= 0:
            if nextx[depth] == -1:
                nodes += 1
                if nodes > max_nodes:
                    raise RuntimeError("enumeration node ceiling exceeded")
                tr = fabs(mats[depth][0] + mats[depth][3])
                m = depth + 1
                if 2.0 < tr <= trace_max and word[0] != _inv(word[depth], g2):
                    memcpy(buf, word, m)
                    m = _cyclic_dehn(buf, m, sf, sb, g2)
                    if m > 0:
                        key = _min_rotation(buf, m)
                        cc = memo.get(key)
                        if cc is None:
                            orbit = _cyclic_orbit(key, sf, sb, g2)
                            cc = min(orbit) if orbit else b""
                            for o in orbit:
                                memo[o] = cc
                            memo[key] = cc
                        found.add(cc)
                nextx[depth] = 0
            x = nextx[depth]
            if x >= nl:
                depth -= 1
                continue
            nextx[depth] = x + 1
            last = word[depth]
            if x == _inv(last, g2):
                continue
            i = runf[depth] + 1 if sf[last] == x else 1
            if i > HALF:
                continue
            m = runb[depth] + 1 if sb[last] == x else 1
            if m > HALF:
                continue
            a = mats[depth][0]; b = mats[depth][1]; c = mats[depth][2]; d = mats[depth][3]
            p = G[x][0]; q = G[x][1]; r = G[x][2]; s = G[x][3]
            n0 = a * p + b * r; n1 = a * q + b * s
            n2 = c * p + d * r; n3 = c * q + d * s
            if 0.5 * (n0 * n0 + n1 * n1 + n2 * n2 + n3 * n3) > cosh_dmax:
                continue
            if depth + 1 >= MAXW - 16:
                raise RuntimeError("word length ceiling exceeded")
            depth += 1
            word[depth] = x
            mats[depth][0] = n0; mats[depth][1] = n1; mats[depth][2] = n2; mats[depth][3] = n3
            runf[depth] = i; runb[depth] = m
            nextx[depth] = -1
    found.discard(b"")
    return found, nodes


def word_permutations(cnp.ndarray perms, list words):
    cdef long[:, :, ::1] P = np.ascontiguousarray(perms, dtype=np.int64)
    cdef Py_ssize_t M = P.shape[0], n = P.shape[2], nw = len(words)
    out_arr = np.empty((M, nw, n), dtype=np.int64)
    cdef long[:, :, ::1] out = out_arr
    cdef Py_ssize_t mi, j, t, L, pos
    cdef long v
    cdef const unsigned char* pw
    cdef bytes w
    for j in range(nw):
        w = bytes(words[j])
        pw = w
        L = len(w)
        for mi in range(M):
            for t in range(n):
                v = t
                for pos in range(L - 1, -1, -1):
                    v = P[mi, pw[pos], v]
                out[mi, j, t] = v
    return out_arr


def fixed_point_counts(cnp.ndarray perms, list words, int kmax):
    W_arr = word_permutations(perms, words)
    cdef long[:, :, ::1] W = W_arr
    cdef Py_ssize_t M = W.shape[0], nw = W.shape[1], n = W.shape[2]
    out_arr = np.zeros((M, nw, kmax), dtype=np.int64)
    cdef long[:, :, ::1] out = out_arr
    cdef Py_ssize_t mi, j, t, k
    cdef long v
    for mi in range(M):
        for j in range(nw):
            for t in range(n):
                v = t
                for k in range(kmax):
                    v = W[mi, j, v]
                    if v == t:
                        out[mi, j, k] += 1
    return out_arr


def cycle_counts(cnp.ndarray perms, list words, int dmax):
    W_arr = word_permutations(perms, words)
    cdef long[:, :, ::1] W = W_arr
    cdef Py_ssize_t M = W.shape[0], nw = W.shape[1], n = W.shape[2]
    out_arr = np.zeros((M, nw, dmax), dtype=np.int64)
    cdef long[:, :, ::1] out = out_arr
    seen_arr = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] seen = seen_arr
    cdef Py_ssize_t mi, j, s, t, L
    for mi in range(M):
        for j in range(nw):
            seen[:] = 0
            for s in range(n):
                if seen[s]:
                    continue
                L = 0
                t = s
                while not seen[t]:
                    seen[t] = 1
                    t = W[mi, j, t]
                    L += 1
                if L <= dmax:
                    out[mi, j, L - 1] += 1
    return out_arr


def relator_holds(cnp.ndarray perms, bytes relator):
    W = word_permutations(perms, [relator])
    n = perms.shape[2]
    return (W[:, 0, :] == np.arange(n)).all(axis=1)


def translation_length_from_trace(double tr):
    return 2.0 * acosh(fabs(tr) / 2.0)
