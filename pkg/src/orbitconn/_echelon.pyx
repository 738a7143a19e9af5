# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled fraction-free sparse row echelon kernel (int64 with overflow traps).

Same contract as ``_echelon_py.echelon``.  Arithmetic is on signed 64-bit
integers; any overflow raises ``OverflowError`` so the caller can rerun the
system on the big-integer Python kernel.  Results are never approximate.
"""

from libc.stdlib cimport malloc, realloc, free
from libc.limits cimport LLONG_MIN

cdef extern from *:
    """
    static int _ovf_mul(long long a, long long b, long long *r) {
        return __builtin_mul_overflow(a, b, r);
    }
    static int _ovf_sub(long long a, long long b, long long *r) {
        return __builtin_sub_overflow(a, b, r);
    }
    """
    int _ovf_mul(long long a, long long b, long long *r) nogil
    int _ovf_sub(long long a, long long b, long long *r) nogil


cdef inline long long _abs(long long a) nogil:
    return -a if a < 0 else a


cdef inline long long _gcd(long long a, long long b) nogil:
    cdef long long t
    a = _abs(a)
    b = _abs(b)
    while b:
        t = a % b
        a = b
        b = t
    return a


cdef struct Pool:
    long long *cols
    long long *vals
    Py_ssize_t size
    Py_ssize_t cap


cdef int _pool_reserve(Pool *pool, Py_ssize_t extra) except -1:
    cdef Py_ssize_t cap = pool.cap
    cdef long long *nc
    cdef long long *nv
    if pool.size + extra <= cap:
        return 0
    while pool.size + extra > cap:
        cap = cap * 2 + 64
    nc = <long long *> realloc(pool.cols, cap * sizeof(long long))
    if nc == NULL:
        raise MemoryError()
    pool.cols = nc
    nv = <long long *> realloc(pool.vals, cap * sizeof(long long))
    if nv == NULL:
        raise MemoryError()
    pool.vals = nv
    pool.cap = cap
    return 0


cdef int _content_normalize(long long *vals, Py_ssize_t n) except -1:
    cdef long long g = 0
    cdef Py_ssize_t i
    for i in range(n):
        if vals[i] == LLONG_MIN:
            raise OverflowError("int64 kernel overflow")
        g = _gcd(g, vals[i])
        if g == 1:
            break
    if vals[0] < 0:
        g = -g
    if g != 1:
        for i in range(n):
            vals[i] = vals[i] // g
    return 0


def echelon(rows, Py_ssize_t pivot_limit, Py_ssize_t ncols_total):
    """Row-reduce ``rows`` in order; see ``_echelon_py.echelon``."""
    cdef Py_ssize_t width = ncols_total + 1
    cdef Py_ssize_t *piv_start = <Py_ssize_t *> malloc(width * sizeof(Py_ssize_t))
    cdef Py_ssize_t *piv_len = <Py_ssize_t *> malloc(width * sizeof(Py_ssize_t))
    cdef long long *a_cols = <long long *> malloc(width * sizeof(long long))
    cdef long long *a_vals = <long long *> malloc(width * sizeof(long long))
    cdef long long *b_cols = <long long *> malloc(width * sizeof(long long))
    cdef long long *b_vals = <long long *> malloc(width * sizeof(long long))
    cdef long long *tmp
    cdef Pool pool
    cdef Py_ssize_t i, j, k, n, m, ps, pl, idx
    cdef long long c, a, p, g, pa, aa, x, y
    pool.cols = NULL
    pool.vals = NULL
    pool.size = 0
    pool.cap = 0
    if (piv_start == NULL or piv_len == NULL or a_cols == NULL or a_vals == NULL
            or b_cols == NULL or b_vals == NULL):
        free(piv_start); free(piv_len); free(a_cols); free(a_vals); free(b_cols); free(b_vals)
        raise MemoryError()
    for i in range(width):
        piv_start[i] = -1
        piv_len[i] = 0

    pivots = []
    sources = []
    bad_index = -1
    bad_row = None
    try:
        for idx, row in enumerate(rows):
            cols, vals = row
            n = 0
            for j in range(len(cols)):
                x = vals[j]
                if x == LLONG_MIN:
                    raise OverflowError("int64 kernel overflow")
                if x != 0:
                    a_cols[n] = cols[j]
                    a_vals[n] = x
                    n += 1
            while n > 0:
                c = a_cols[0]
                if c >= pivot_limit:
                    break
                ps = piv_start[c]
                if ps < 0:
                    break
                pl = piv_len[c]
                a = a_vals[0]
                p = pool.vals[ps]
                g = _gcd(a, p)
                pa = p // g
                aa = a // g
                # b = pa * a - aa * piv, merged over sorted columns
                j = 0
                k = 0
                m = 0
                while j < n or k < pl:
                    if k >= pl or (j < n and a_cols[j] < pool.cols[ps + k]):
                        if _ovf_mul(pa, a_vals[j], &x):
                            raise OverflowError("int64 kernel overflow")
                        b_cols[m] = a_cols[j]
                        b_vals[m] = x
                        m += 1
                        j += 1
                    elif j >= n or pool.cols[ps + k] < a_cols[j]:
                        if _ovf_mul(aa, pool.vals[ps + k], &y):
                            raise OverflowError("int64 kernel overflow")
                        if y == LLONG_MIN:
                            raise OverflowError("int64 kernel overflow")
                        b_cols[m] = pool.cols[ps + k]
                        b_vals[m] = -y
                        m += 1
                        k += 1
                    else:
                        if _ovf_mul(pa, a_vals[j], &x):
                            raise OverflowError("int64 kernel overflow")
                        if _ovf_mul(aa, pool.vals[ps + k], &y):
                            raise OverflowError("int64 kernel overflow")
                        if _ovf_sub(x, y, &x):
                            raise OverflowError("int64 kernel overflow")
                        if x != 0:
                            b_cols[m] = a_cols[j]
                            b_vals[m] = x
                            m += 1
                        j += 1
                        k += 1
                tmp = a_cols; a_cols = b_cols; b_cols = tmp
                tmp = a_vals; a_vals = b_vals; b_vals = tmp
                n = m
                if n > 0:
                    _content_normalize(a_vals, n)
            if n == 0:
                continue
            _content_normalize(a_vals, n)
            c = a_cols[0]
            if c < pivot_limit:
                _pool_reserve(&pool, n)
                piv_start[c] = pool.size
                piv_len[c] = n
                for j in range(n):
                    pool.cols[pool.size + j] = a_cols[j]
                    pool.vals[pool.size + j] = a_vals[j]
                pool.size += n
                pivots.append(([a_cols[j] for j in range(n)], [a_vals[j] for j in range(n)]))
                sources.append(idx)
            elif c == pivot_limit:
                bad_index = idx
                bad_row = ([a_cols[j] for j in range(n)], [a_vals[j] for j in range(n)])
                break
    finally:
        free(piv_start); free(piv_len)
        free(a_cols); free(a_vals); free(b_cols); free(b_vals)
        free(pool.cols); free(pool.vals)
    return pivots, sources, bad_index, bad_row
