# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled bitset engine: per-item bitmaps packed into uint64 words.

Besides counting, this lane also compiles apriori candidate generation
(prefix-run joins plus downward-closure checks by lexicographic binary
search), which is the other hot loop of level-wise mining.
"""

import threading

import numpy as np

from libc.stdint cimport int32_t, int64_t, uint64_t
from libc.stdlib cimport free, malloc

cdef extern from *:
    """
    #if defined(__GNUC__) || defined(__clang__)
    static inline unsigned long long rb_popcountll(unsigned long long x) {
        return __builtin_popcountll(x);
    }
    #else
    static inline unsigned long long rb_popcountll(unsigned long long x) {
        x = x - ((x >> 1) & 0x5555555555555555ULL);
        x = (x & 0x3333333333333333ULL) + ((x >> 2) & 0x3333333333333333ULL);
        x = (x + (x >> 4)) & 0x0F0F0F0F0F0F0F0FULL;
        return (x * 0x0101010101010101ULL) >> 56;
    }
    #endif
    """
    uint64_t rb_popcountll(uint64_t x) nogil


cdef inline int _cmp_row(const int32_t* a, const int32_t* b, Py_ssize_t m) noexcept nogil:
    cdef Py_ssize_t j
    for j in range(m):
        if a[j] < b[j]:
            return -1
        if a[j] > b[j]:
            return 1
    return 0


cdef bint _contains_row(const int32_t[:, ::1] rows, const int32_t* probe, Py_ssize_t m) noexcept nogil:
    cdef Py_ssize_t lo = 0, hi = rows.shape[0], mid
    cdef int c
    while lo < hi:
        mid = (lo + hi) // 2
        c = _cmp_row(&rows[mid, 0], probe, m)
        if c < 0:
            lo = mid + 1
        elif c > 0:
            hi = mid
        else:
            return True
    return False


cdef Py_ssize_t _fill_candidates(const int32_t[:, ::1] prev,
                                 int64_t[::1] parents,
                                 int64_t[::1] items,
                                 int32_t[:, ::1] cand) noexcept nogil:
    """Prefix-run join with closure pruning; returns the kept count, or -1 on OOM."""
    cdef Py_ssize_t R = prev.shape[0], km1 = prev.shape[1]
    cdef Py_ssize_t run_start = 0, row, x, y, i, j, pos, out = 0
    cdef int32_t* probe = <int32_t*>malloc(km1 * sizeof(int32_t) if km1 else sizeof(int32_t))
    cdef bint closed
    if probe == NULL:
        return -1
    for row in range(1, R + 1):
        if row < R and _cmp_row(&prev[row, 0], &prev[run_start, 0], km1 - 1) == 0:
            continue
        for x in range(run_start, row - 1):
            for y in range(x + 1, row):
                # candidate = prev[x] + last item of prev[y]; the join itself
                # covers the two subsets dropping either last item
                closed = True
                for i in range(km1 - 1):
                    pos = 0
                    for j in range(km1):
                        if j == i:
                            continue
                        probe[pos] = prev[x, j]
                        pos += 1
                    probe[pos] = prev[y, km1 - 1]
                    if not _contains_row(prev, probe, km1):
                        closed = False
                        break
                if closed:
                    parents[out] = x
                    items[out] = prev[y, km1 - 1]
                    for j in range(km1):
                        cand[out, j] = prev[x, j]
                    cand[out, km1] = prev[y, km1 - 1]
                    out += 1
        run_start = row
    free(probe)
    return out


def generate_candidates(prev):
    """Level-(k+1) candidates from the lex-sorted level-k antecedent array.

    Returns (parent_rows, new_items, candidates); only candidates whose
    every k-subset is present in `prev` survive.
    """
    prev = np.ascontiguousarray(prev, dtype=np.int32)
    cdef const int32_t[:, ::1] p = prev
    cdef Py_ssize_t R = p.shape[0], km1 = p.shape[1]
    cdef Py_ssize_t run_start = 0, row, L, total = 0
    # first pass: bound the candidate count by the prefix-run pair counts
    with nogil:
        for row in range(1, R + 1):
            if row < R and _cmp_row(&p[row, 0], &p[run_start, 0], km1 - 1) == 0:
                continue
            L = row - run_start
            total += L * (L - 1) // 2
            run_start = row
    parents = np.empty(total, dtype=np.int64)
    items = np.empty(total, dtype=np.int64)
    cand = np.empty((total, km1 + 1), dtype=np.int32)
    if total == 0:
        return parents, items, cand
    cdef int64_t[::1] par = parents
    cdef int64_t[::1] it = items
    cdef int32_t[:, ::1] c = cand
    cdef Py_ssize_t kept
    with nogil:
        kept = _fill_candidates(p, par, it, c)
    if kept < 0:
        raise MemoryError("candidate buffer allocation failed")
    return parents[:kept], items[:kept], cand[:kept]


cdef void _join_range(const uint64_t[:, ::1] buf,
                      const int64_t[::1] parents,
                      const int64_t[::1] items,
                      const uint64_t[:, ::1] masks,
                      const uint64_t[::1] tmask,
                      uint64_t[:, ::1] out,
                      int64_t[::1] joint,
                      int64_t[::1] ante,
                      Py_ssize_t start,
                      Py_ssize_t stop) noexcept nogil:
    cdef Py_ssize_t c, w, words = tmask.shape[0]
    cdef uint64_t v
    cdef int64_t cnt_j, cnt_a
    cdef const uint64_t* parent_row
    cdef const uint64_t* item_row
    for c in range(start, stop):
        parent_row = &buf[parents[c], 0]
        item_row = &masks[items[c], 0]
        cnt_j = 0
        cnt_a = 0
        for w in range(words):
            v = parent_row[w] & item_row[w]
            out[c, w] = v
            cnt_a += <int64_t>rb_popcountll(v)
            cnt_j += <int64_t>rb_popcountll(v & tmask[w])
        joint[c] = cnt_j
        ante[c] = cnt_a


class BitsetEngine:
    """Same contract as the pure-Python engine; buffers are 2-D uint64 arrays.

    Counts come back as int64 arrays rather than lists, and the engine
    additionally exposes array-based candidate generation.
    """

    NAME = "cython"

    generate_candidates = staticmethod(generate_candidates)

    def __init__(self, transactions, n_items, n_trans):
        n_words = max(1, (n_trans + 63) // 64)
        masks = np.zeros((n_items, n_words), dtype=np.uint64)
        cdef uint64_t[:, ::1] m = masks
        cdef Py_ssize_t row = 0
        cdef Py_ssize_t i
        for t in transactions:
            for i in t:
                m[i, row >> 6] |= (<uint64_t>1) << (row & 63)
            row += 1
        self._masks = masks
        self.n_items = n_items
        self.n_trans = n_trans

    def count_itemset(self, items):
        if not len(items):
            return self.n_trans
        cdef uint64_t[:, ::1] masks = self._masks
        acc = np.array(self._masks[items[0]], dtype=np.uint64)
        cdef uint64_t[::1] a = acc
        cdef Py_ssize_t w, words = a.shape[0]
        cdef Py_ssize_t idx
        cdef int64_t cnt = 0
        for idx in items[1:]:
            for w in range(words):
                a[w] &= masks[idx, w]
        for w in range(words):
            cnt += <int64_t>rb_popcountll(a[w])
        return int(cnt)

    def singletons(self, items, target):
        rows = np.asarray(items, dtype=np.intp)
        buf = np.ascontiguousarray(self._masks[rows])
        joint = np.empty(len(items), dtype=np.int64)
        ante = np.empty(len(items), dtype=np.int64)
        cdef const uint64_t[:, ::1] b = buf
        cdef const uint64_t[::1] tmask = self._masks[target]
        cdef int64_t[::1] j = joint
        cdef int64_t[::1] a = ante
        cdef Py_ssize_t c, w, words = b.shape[1]
        cdef int64_t cnt_j, cnt_a
        for c in range(b.shape[0]):
            cnt_j = 0
            cnt_a = 0
            for w in range(words):
                cnt_a += <int64_t>rb_popcountll(b[c, w])
                cnt_j += <int64_t>rb_popcountll(b[c, w] & tmask[w])
            j[c] = cnt_j
            a[c] = cnt_a
        return buf, joint, ante

    def join_and_count(self, buf, parent_rows, item_ids, target, jobs=1):
        cdef Py_ssize_t n = len(parent_rows)
        parents = np.asarray(parent_rows, dtype=np.int64)
        items = np.asarray(item_ids, dtype=np.int64)
        out = np.empty((n, buf.shape[1]), dtype=np.uint64)
        joint = np.empty(n, dtype=np.int64)
        ante = np.empty(n, dtype=np.int64)

        cdef const uint64_t[:, ::1] b = buf
        cdef const int64_t[::1] p = parents
        cdef const int64_t[::1] it = items
        cdef const uint64_t[:, ::1] masks = self._masks
        cdef const uint64_t[::1] tmask = self._masks[target]
        cdef uint64_t[:, ::1] o = out
        cdef int64_t[::1] j = joint
        cdef int64_t[::1] a = ante

        if jobs > 1 and n >= 4096:
            chunks = np.linspace(0, n, num=min(jobs, 32) + 1, dtype=np.int64)
            threads = []
            for k in range(len(chunks) - 1):
                start, stop = int(chunks[k]), int(chunks[k + 1])
                if start == stop:
                    continue
                th = threading.Thread(
                    target=_join_slice,
                    args=(buf, parents, items, self._masks, target, out, joint, ante, start, stop),
                )
                threads.append(th)
                th.start()
            for th in threads:
                th.join()
        else:
            with nogil:
                _join_range(b, p, it, masks, tmask, o, j, a, 0, n)
        return out, joint, ante

    def select(self, buf, rows):
        return np.ascontiguousarray(buf[np.asarray(rows, dtype=np.intp)])


def _join_slice(buf, parents, items, masks, target, out, joint, ante, Py_ssize_t start, Py_ssize_t stop):
    cdef const uint64_t[:, ::1] b = buf
    cdef const int64_t[::1] p = parents
    cdef const int64_t[::1] it = items
    cdef const uint64_t[:, ::1] m = masks
    cdef const uint64_t[::1] tmask = masks[target]
    cdef uint64_t[:, ::1] o = out
    cdef int64_t[::1] j = joint
    cdef int64_t[::1] a = ante
    with nogil:
        _join_range(b, p, it, m, tmask, o, j, a, start, stop)
