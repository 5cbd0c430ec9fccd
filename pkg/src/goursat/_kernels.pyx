# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled bit kernels; semantics and output order identical to _kernels_py."""

from cpython.bytes cimport PyBytes_FromStringAndSize, PyBytes_AS_STRING
from libc.stdlib cimport free, malloc
from libc.string cimport memcpy, memset

cdef extern from *:
    int __builtin_ctzll(unsigned long long) nogil

BACKEND = "compiled"


def compose_bits(rows_r, rows_s, n_out):
    """Boolean matrix product: (x,z) iff some y with x->y in r and y->z in s."""
    cdef Py_ssize_t n_r = len(rows_r)
    cdef Py_ssize_t mid = len(rows_s)
    cdef Py_ssize_t w_out = (n_out + 63) >> 6
    cdef Py_ssize_t w_mid = (mid + 63) >> 6
    if w_out == 0:
        w_out = 1
    if w_mid == 0:
        w_mid = 1
    cdef unsigned long long *smat = <unsigned long long *> malloc(
        (mid if mid else 1) * w_out * 8)
    cdef unsigned long long *acc = <unsigned long long *> malloc(w_out * 8)
    cdef unsigned long long *rrow = <unsigned long long *> malloc(w_mid * 8)
    if smat is NULL or acc is NULL or rrow is NULL:
        free(smat); free(acc); free(rrow)
        raise MemoryError()
    cdef Py_ssize_t x, y, w, b
    cdef unsigned long long word
    cdef bytes packed
    out = []
    try:
        for y in range(mid):
            packed = rows_s[y].to_bytes(w_out * 8, "little")
            memcpy(smat + y * w_out, PyBytes_AS_STRING(packed), w_out * 8)
        for x in range(n_r):
            memset(acc, 0, w_out * 8)
            packed = rows_r[x].to_bytes(w_mid * 8, "little")
            memcpy(rrow, PyBytes_AS_STRING(packed), w_mid * 8)
            for w in range(w_mid):
                word = rrow[w]
                while word:
                    b = __builtin_ctzll(word)
                    word &= word - 1
                    y = (w << 6) + b
                    for b2 in range(w_out):
                        acc[b2] |= smat[y * w_out + b2]
            packed = PyBytes_FromStringAndSize(<char *> acc, w_out * 8)
            out.append(int.from_bytes(packed, "little"))
    finally:
        free(smat); free(acc); free(rrow)
    return out


def transitive_closure_bits(rows):
    cdef Py_ssize_t n = len(rows)
    cdef Py_ssize_t w = (n + 63) >> 6
    if n == 0:
        return []
    cdef unsigned long long *mat = <unsigned long long *> malloc(n * w * 8)
    if mat is NULL:
        raise MemoryError()
    cdef Py_ssize_t i, k, j
    cdef bytes packed
    out = []
    try:
        for i in range(n):
            packed = rows[i].to_bytes(w * 8, "little")
            memcpy(mat + i * w, PyBytes_AS_STRING(packed), w * 8)
        for k in range(n):
            for i in range(n):
                if mat[i * w + (k >> 6)] & (<unsigned long long> 1 << (k & 63)):
                    for j in range(w):
                        mat[i * w + j] |= mat[k * w + j]
        for i in range(n):
            packed = PyBytes_FromStringAndSize(<char *> (mat + i * w), w * 8)
            out.append(int.from_bytes(packed, "little"))
    finally:
        free(mat)
    return out


def expand_layer(size, ops, vectors, known, frontier_start, cap, app_budget):
    """One BFS layer of pointwise closure; see _kernels_py.expand_layer."""
    if size > 256:
        raise ValueError(f"carrier too large for byte vectors: {size}")
    cdef Py_ssize_t m = len(vectors)
    cdef Py_ssize_t width = len(vectors[0]) if m else 0
    cdef Py_ssize_t start = frontier_start
    cdef Py_ssize_t vcap = cap
    cdef Py_ssize_t budget = app_budget
    cdef Py_ssize_t n = size
    cdef Py_ssize_t apps = 0
    cdef Py_ssize_t total = len(known)
    cdef unsigned char *vecs = NULL
    cdef unsigned char *cand = NULL
    cdef Py_ssize_t idx[16]
    cdef Py_ssize_t arity, opi, i, t, acc, mx
    cdef const unsigned char *tbl
    cdef bytes bcand, tbytes
    new_vecs = []
    new_parents = []
    truncated = False
    if m:
        vecs = <unsigned char *> malloc(m * width if m * width else 1)
        cand = <unsigned char *> malloc(width if width else 1)
        if vecs is NULL or cand is NULL:
            free(vecs); free(cand)
            raise MemoryError()
        for i in range(m):
            memcpy(vecs + i * width, PyBytes_AS_STRING(vectors[i]), width)
    try:
        for opi in range(len(ops)):
            arity = ops[opi][0]
            if arity > 16:
                raise ValueError("operation arity above 16 unsupported")
            tbytes = ops[opi][1]
            tbl = <const unsigned char *> PyBytes_AS_STRING(tbytes)
            if arity == 0:
                if start > 0:
                    continue
                apps += 1
                bcand = bytes([tbytes[0]]) * width
                if bcand not in known:
                    known.add(bcand)
                    new_vecs.append(bcand)
                    new_parents.append((opi, ()))
                    total += 1
                    if total >= vcap:
                        truncated = True
                        return new_vecs, new_parents, truncated, apps
                continue
            if m == 0 or start >= m:
                continue
            # odometer over arg tuples with max coordinate >= start, lex order
            for i in range(arity):
                idx[i] = 0
            if start > 0:
                idx[arity - 1] = start
            while True:
                if apps >= budget:
                    truncated = True
                    return new_vecs, new_parents, truncated, apps
                apps += 1
                for t in range(width):
                    acc = vecs[idx[0] * width + t]
                    for i in range(1, arity):
                        acc = acc * n + vecs[idx[i] * width + t]
                    cand[t] = tbl[acc]
                bcand = PyBytes_FromStringAndSize(<char *> cand, width)
                if bcand not in known:
                    known.add(bcand)
                    new_vecs.append(bcand)
                    new_parents.append((opi, tuple([idx[i] for i in range(arity)])))
                    total += 1
                    if total >= vcap:
                        truncated = True
                        return new_vecs, new_parents, truncated, apps
                # lex successor, skipping tuples whose coordinates all miss
                # the frontier
                i = arity - 1
                while i >= 0:
                    idx[i] += 1
                    if idx[i] < m:
                        break
                    idx[i] = 0
                    i -= 1
                if i < 0:
                    break
                mx = idx[0]
                for i in range(1, arity):
                    if idx[i] > mx:
                        mx = idx[i]
                if mx < start:
                    idx[arity - 1] = start
        return new_vecs, new_parents, truncated, apps
    finally:
        free(vecs)
        free(cand)
