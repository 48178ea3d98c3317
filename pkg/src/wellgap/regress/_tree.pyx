# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled CART regression-tree builder and forest predictor.

Mirrors ``_tree_py`` operation for operation (same scan order, same
summation order) so both back ends grow identical trees.
"""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t
from libc.math cimport INFINITY

cnp.import_array()


cdef inline uint64_t _splitmix64(uint64_t* state) noexcept nogil:
    cdef uint64_t z
    state[0] += <uint64_t>0x9E3779B97F4A7C15ULL
    z = state[0]
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EBULL
    return z ^ (z >> 31)


def build_tree(const double[:, ::1] X, const double[::1] y, int64_t[:, ::1] order,
               Py_ssize_t max_depth, Py_ssize_t min_samples_leaf,
               Py_ssize_t max_features, uint64_t seed):
    """Grow one tree.

    ``order[f]`` must hold ``argsort(X[:, f], kind="stable")``; it is
    partitioned in place. ``max_depth < 0`` means unlimited. Returns
    ``(feature, threshold, left, right, value)`` arrays in node order.
    """
    cdef Py_ssize_t n = X.shape[0]
    cdef Py_ssize_t p = X.shape[1]
    cdef Py_ssize_t cap = 2 * n + 1
    feature_arr = np.full(cap, -1, dtype=np.int64)
    threshold_arr = np.zeros(cap, dtype=np.float64)
    left_arr = np.full(cap, -1, dtype=np.int64)
    right_arr = np.full(cap, -1, dtype=np.int64)
    value_arr = np.zeros(cap, dtype=np.float64)
    cdef int64_t[::1] feature = feature_arr
    cdef double[::1] threshold = threshold_arr
    cdef int64_t[::1] left = left_arr
    cdef int64_t[::1] right = right_arr
    cdef double[::1] value = value_arr

    cdef int64_t[::1] goes_left = np.zeros(n, dtype=np.int64)
    cdef int64_t[::1] buf = np.zeros(n, dtype=np.int64)
    cdef int64_t[::1] feats = np.arange(p, dtype=np.int64)
    cdef int64_t[::1] chosen = np.zeros(p, dtype=np.int64)
    # stack of (node, start, end, depth)
    cdef int64_t[:, ::1] stack = np.zeros((cap, 4), dtype=np.int64)
    cdef Py_ssize_t top = 0
    cdef Py_ssize_t n_nodes = 1
    cdef uint64_t rng = seed

    cdef Py_ssize_t node, start, end, depth, cnt, i, j, f, k, nf, pos, nl, a, b, tmp
    cdef Py_ssize_t best_f, best_pos
    cdef double s, ymin, ymax, yi, total, sum_l, sum_r, score, best_score, thr, xa, xb
    cdef int64_t* o

    stack[0, 0] = 0
    stack[0, 1] = 0
    stack[0, 2] = n
    stack[0, 3] = 0
    top = 1

    with nogil:
        while top > 0:
            top -= 1
            node = stack[top, 0]
            start = stack[top, 1]
            end = stack[top, 2]
            depth = stack[top, 3]
            cnt = end - start

            o = &order[0, 0]
            s = 0.0
            ymin = y[o[start]]
            ymax = ymin
            for i in range(start, end):
                yi = y[o[i]]
                s += yi
                if yi < ymin:
                    ymin = yi
                if yi > ymax:
                    ymax = yi
            # a pure node stores its value as is; s / cnt can be off by an ulp
            value[node] = ymin if ymin == ymax else s / cnt

            if (max_depth >= 0 and depth >= max_depth) or cnt < 2 * min_samples_leaf or ymin == ymax:
                continue

            # candidate features, ascending
            if max_features >= p:
                nf = p
                for k in range(p):
                    chosen[k] = k
            else:
                nf = max_features
                for k in range(p):
                    feats[k] = k
                for k in range(nf):
                    j = k + <Py_ssize_t>(_splitmix64(&rng) % <uint64_t>(p - k))
                    tmp = feats[k]
                    feats[k] = feats[j]
                    feats[j] = tmp
                for k in range(nf):
                    chosen[k] = feats[k]
                # insertion sort of the chosen subset
                for k in range(1, nf):
                    tmp = chosen[k]
                    j = k - 1
                    while j >= 0 and chosen[j] > tmp:
                        chosen[j + 1] = chosen[j]
                        j -= 1
                    chosen[j + 1] = tmp

            best_score = -INFINITY
            best_f = -1
            best_pos = -1
            for k in range(nf):
                f = chosen[k]
                o = &order[f, 0]
                total = 0.0
                for i in range(start, end):
                    total += y[o[i]]
                sum_l = 0.0
                for i in range(start, end - 1):
                    sum_l += y[o[i]]
                    nl = i - start + 1
                    if nl < min_samples_leaf:
                        continue
                    if cnt - nl < min_samples_leaf:
                        break
                    if X[o[i], f] == X[o[i + 1], f]:
                        continue
                    sum_r = total - sum_l
                    score = sum_l * sum_l / <double>nl + sum_r * sum_r / <double>(cnt - nl)
                    if score > best_score:
                        best_score = score
                        best_f = f
                        best_pos = i

            if best_f < 0:
                continue

            o = &order[best_f, 0]
            xa = X[o[best_pos], best_f]
            xb = X[o[best_pos + 1], best_f]
            thr = (xa + xb) / 2.0
            if thr >= xb:
                thr = xa
            feature[node] = best_f
            threshold[node] = thr

            for i in range(start, end):
                goes_left[o[i]] = 1 if i <= best_pos else 0
            for f in range(p):
                o = &order[f, 0]
                a = start
                b = 0
                for i in range(start, end):
                    if goes_left[o[i]]:
                        o[a] = o[i]
                        a += 1
                    else:
                        buf[b] = o[i]
                        b += 1
                for i in range(b):
                    o[a + i] = buf[i]

            left[node] = n_nodes
            right[node] = n_nodes + 1
            n_nodes += 2
            nl = best_pos - start + 1
            # push right first so the left subtree is grown first
            stack[top, 0] = right[node]
            stack[top, 1] = start + nl
            stack[top, 2] = end
            stack[top, 3] = depth + 1
            top += 1
            stack[top, 0] = left[node]
            stack[top, 1] = start
            stack[top, 2] = start + nl
            stack[top, 3] = depth + 1
            top += 1

    return (
        feature_arr[:n_nodes].copy(),
        threshold_arr[:n_nodes].copy(),
        left_arr[:n_nodes].copy(),
        right_arr[:n_nodes].copy(),
        value_arr[:n_nodes].copy(),
    )


def predict_tree(const int64_t[::1] feature, const double[::1] threshold,
                 const int64_t[::1] left, const int64_t[::1] right,
                 const double[::1] value, const double[:, ::1] X):
    cdef Py_ssize_t m = X.shape[0]
    out_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t r, node
    with nogil:
        for r in range(m):
            node = 0
            while feature[node] >= 0:
                if X[r, feature[node]] <= threshold[node]:
                    node = left[node]
                else:
                    node = right[node]
            out[r] = value[node]
    return out_arr


def splitmix64_stream(uint64_t seed, Py_ssize_t count):
    """First *count* outputs of the splitmix64 generator (for cross-checks)."""
    out = np.empty(count, dtype=np.uint64)
    cdef uint64_t[::1] view = out
    cdef uint64_t state = seed
    cdef Py_ssize_t i
    for i in range(count):
        view[i] = _splitmix64(&state)
    return out
