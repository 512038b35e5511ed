# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled integer kernels.

Each routine first runs on int64 with overflow-checked arithmetic and
restarts on Python ints when any intermediate overflows, so results are
always exact and identical to ``_kernels_py``.
"""

from libc.stdlib cimport malloc, free
from libc.stdint cimport int64_t

cdef extern from *:
    """
    static inline int qc_mul(long long a, long long b, long long *r) {
        return __builtin_mul_overflow(a, b, r);
    }
    static inline int qc_add(long long a, long long b, long long *r) {
        return __builtin_add_overflow(a, b, r);
    }
    """
    int qc_mul(long long a, long long b, long long *r) nogil
    int qc_add(long long a, long long b, long long *r) nogil

cdef long long LIMIT = 1LL << 62


cdef int _load(list src, Py_ssize_t n, long long *dst) except -1:
    """Copy up to n ints into dst (zero padded); return 1 if any is too large."""
    cdef Py_ssize_t i, m = min(n, len(src))
    cdef object v
    for i in range(m):
        v = src[i]
        if v >= LIMIT or v <= -LIMIT:
            return 1
        dst[i] = v
    for i in range(m, n):
        dst[i] = 0
    return 0


def convolve(a, b, Py_ssize_t n):
    """Truncated product: ``c[k] = sum_i a[i] * b[k - i]`` for ``k < n``."""
    cdef list la = list(a), lb = list(b)
    if n <= 0:
        return []
    cdef long long *x = <long long *> malloc(n * sizeof(long long))
    cdef long long *y = <long long *> malloc(n * sizeof(long long))
    cdef long long *z = <long long *> malloc(n * sizeof(long long))
    cdef Py_ssize_t *ynz = <Py_ssize_t *> malloc(n * sizeof(Py_ssize_t))
    cdef Py_ssize_t i, j, k, ny = 0
    cdef long long p, s
    cdef bint overflow = False
    try:
        if _load(la, n, x) or _load(lb, n, y):
            overflow = True
        else:
            for k in range(n):
                z[k] = 0
                if y[k] != 0:
                    ynz[ny] = k
                    ny += 1
            for i in range(n):
                if x[i] == 0:
                    continue
                for k in range(ny):
                    j = ynz[k]
                    if i + j >= n:
                        break
                    if qc_mul(x[i], y[j], &p) or qc_add(z[i + j], p, &s):
                        overflow = True
                        break
                    z[i + j] = s
                if overflow:
                    break
            if not overflow:
                return [z[k] for k in range(n)]
    finally:
        free(x)
        free(y)
        free(z)
        free(ynz)
    return _convolve_obj(la, lb, n)


cdef list _convolve_obj(list a, list b, Py_ssize_t n):
    cdef list out = [0] * n
    cdef list bi = [], bv = []
    cdef Py_ssize_t i, j, k, nb, lim
    cdef object xv
    for j in range(min(n, len(b))):
        if b[j]:
            bi.append(j)
            bv.append(b[j])
    nb = len(bi)
    for i in range(min(n, len(a))):
        xv = a[i]
        if not xv:
            continue
        lim = n - i
        for k in range(nb):
            j = bi[k]
            if j >= lim:
                break
            out[i + j] = out[i + j] + xv * bv[k]
    return out


def inverse_unit(a, Py_ssize_t n):
    """Reciprocal of an integer series whose constant term is +1 or -1."""
    cdef list la = list(a)
    if la[0] != 1 and la[0] != -1:
        raise ValueError("leading coefficient must be a unit")
    if n <= 0:
        return []
    cdef long long a0 = la[0]
    cdef long long *x = <long long *> malloc(n * sizeof(long long))
    cdef long long *y = <long long *> malloc(n * sizeof(long long))
    cdef Py_ssize_t *nz = <Py_ssize_t *> malloc(n * sizeof(Py_ssize_t))
    cdef Py_ssize_t i, k, t, m = 0
    cdef long long p, s
    cdef bint overflow = False
    try:
        if _load(la, n, x):
            overflow = True
        else:
            for i in range(1, n):
                if x[i] != 0:
                    nz[m] = i
                    m += 1
            y[0] = a0
            for k in range(1, n):
                s = 0
                for t in range(m):
                    i = nz[t]
                    if i > k:
                        break
                    if qc_mul(x[i], y[k - i], &p) or qc_add(s, p, &s):
                        overflow = True
                        break
                if overflow:
                    break
                y[k] = -a0 * s
            if not overflow:
                return [y[k] for k in range(n)]
    finally:
        free(x)
        free(y)
        free(nz)
    return _inverse_unit_obj(la, n)


cdef list _inverse_unit_obj(list a, Py_ssize_t n):
    cdef object a0 = a[0]
    cdef list ai = [], av = []
    cdef Py_ssize_t i, k, t, m
    cdef object s
    for i in range(1, min(n, len(a))):
        if a[i]:
            ai.append(i)
            av.append(a[i])
    m = len(ai)
    cdef list b = [0] * n
    b[0] = a0
    for k in range(1, n):
        s = 0
        for t in range(m):
            i = ai[t]
            if i > k:
                break
            s = s + av[t] * b[k - i]
        b[k] = -a0 * s
    return b


def inverse_scaled(a, Py_ssize_t n):
    """Scaled reciprocal: ``1/a = sum_k B[k] / a[0]**(k+1) q^k``."""
    cdef list la = list(a)
    cdef object a0 = la[0]
    if not a0:
        raise ValueError("constant term is zero")
    cdef list ti = [], tv = []
    cdef object p = 1
    cdef Py_ssize_t i, k, t, m
    cdef object s
    for i in range(1, n):
        if i < len(la) and la[i]:
            ti.append(i)
            tv.append(la[i] * p)
        p = p * a0
    m = len(ti)
    if n <= 0:
        return []
    cdef list b = [0] * n
    b[0] = 1
    for k in range(1, n):
        s = 0
        for t in range(m):
            i = ti[t]
            if i > k:
                break
            s = s + tv[t] * b[k - i]
        b[k] = -s
    return b


def power_unit(a, long long kexp, Py_ssize_t n):
    """``a**k`` for an integer series with ``a[0] == 1`` (Miller recurrence)."""
    cdef list la = list(a)
    if la[0] != 1:
        raise ValueError("constant term must be 1")
    if n <= 0:
        return []
    cdef long long *x = <long long *> malloc(n * sizeof(long long))
    cdef long long *g = <long long *> malloc(n * sizeof(long long))
    cdef Py_ssize_t *nz = <Py_ssize_t *> malloc(n * sizeof(Py_ssize_t))
    cdef Py_ssize_t j, mm, t, cnt = 0
    cdef long long p, w, s, k1 = kexp + 1
    cdef bint overflow = False
    try:
        if _load(la, n, x):
            overflow = True
        else:
            for j in range(1, n):
                if x[j] != 0:
                    nz[cnt] = j
                    cnt += 1
            g[0] = 1
            for mm in range(1, n):
                s = 0
                for t in range(cnt):
                    j = nz[t]
                    if j > mm:
                        break
                    w = k1 * j - mm
                    if qc_mul(w, x[j], &p) or qc_mul(p, g[mm - j], &p) or qc_add(s, p, &s):
                        overflow = True
                        break
                if overflow:
                    break
                g[mm] = s // mm
            if not overflow:
                return [g[t] for t in range(n)]
    finally:
        free(x)
        free(g)
        free(nz)
    return _power_unit_obj(la, kexp, n)


cdef list _power_unit_obj(list a, object k, Py_ssize_t n):
    cdef list ai = [], av = []
    cdef Py_ssize_t j, m, t, cnt
    cdef object s, k1 = k + 1
    for j in range(1, min(n, len(a))):
        if a[j]:
            ai.append(j)
            av.append(a[j])
    cnt = len(ai)
    cdef list g = [0] * n
    g[0] = 1
    for m in range(1, n):
        s = 0
        for t in range(cnt):
            j = ai[t]
            if j > m:
                break
            s = s + (k1 * j - m) * av[t] * g[m - j]
        g[m] = s // m
    return g


def geometric_update(list grid, Py_ssize_t width, Py_ssize_t depth, int sigma,
                     Py_ssize_t e, int reps):
    """Multiply a bivariate grid by ``(1 - zeta**sigma * t**e)**(-reps)`` in place."""
    cdef Py_ssize_t size = width * depth
    cdef long long *g = <long long *> malloc(size * sizeof(long long)) if size > 0 else NULL
    cdef Py_ssize_t j, d, src, dst, r, start, stop, stepj
    cdef long long s
    cdef bint overflow = False
    if sigma == 0:
        raise ValueError("sigma must be nonzero")
    if size > 0 and g == NULL:
        raise MemoryError()
    try:
        if size > 0 and _load(grid, size, g):
            overflow = True
        if not overflow:
            if sigma > 0:
                start, stop, stepj = sigma, width, 1
            else:
                start, stop, stepj = width - 1 + sigma, -1, -1
            if (stepj > 0 and start >= stop) or (stepj < 0 and start <= stop):
                return grid
            for r in range(reps):
                j = start
                while j != stop:
                    src = (j - sigma) * depth
                    dst = j * depth
                    for d in range(e, depth):
                        if g[src + d - e] != 0:
                            if qc_add(g[dst + d], g[src + d - e], &s):
                                overflow = True
                                break
                            g[dst + d] = s
                    if overflow:
                        break
                    j += stepj
                if overflow:
                    break
            if not overflow:
                for j in range(size):
                    grid[j] = g[j]
                return grid
    finally:
        if g != NULL:
            free(g)
    return _geometric_update_obj(grid, width, depth, sigma, e, reps)


cdef list _geometric_update_obj(list grid, Py_ssize_t width, Py_ssize_t depth,
                                int sigma, Py_ssize_t e, int reps):
    cdef Py_ssize_t j, d, src, dst, r
    cdef object v
    for r in range(reps):
        if sigma > 0:
            rows = range(sigma, width)
        else:
            rows = range(width - 1 + sigma, -1, -1)
        for j in rows:
            src = (j - sigma) * depth
            dst = j * depth
            for d in range(e, depth):
                v = grid[src + d - e]
                if v:
                    grid[dst + d] = grid[dst + d] + v
    return grid
