"""Pure numpy fallback for the compiled tree kernel.

Same algorithm and the same floating-point operation order as ``_tree.pyx``
(sequential cumulative sums, first-maximum tie-breaking), so a tree grown
here is identical to one grown by the extension. It is slower by one to
two orders of magnitude on realistic well sizes.
"""

import numpy as np

_MASK = (1 << 64) - 1


def _splitmix64(state):
    state = (state + 0x9E3779B97F4A7C15) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return state, z ^ (z >> 31)


def splitmix64_stream(seed, count):
    out = np.empty(count, dtype=np.uint64)
    state = int(seed) & _MASK
    for i in range(count):
        state, out[i] = _splitmix64(state)
    return out


def build_tree(X, y, order, max_depth, min_samples_leaf, max_features, seed):
    n, p = X.shape
    cap = 2 * n + 1
    feature = np.full(cap, -1, dtype=np.int64)
    threshold = np.zeros(cap)
    left = np.full(cap, -1, dtype=np.int64)
    right = np.full(cap, -1, dtype=np.int64)
    value = np.zeros(cap)
    rng = int(seed) & _MASK
    msl = min_samples_leaf

    stack = [(0, 0, n, 0)]
    n_nodes = 1
    while stack:
        node, start, end, depth = stack.pop()
        cnt = end - start
        ys = y[order[0, start:end]]
        pure = ys.min() == ys.max()
        value[node] = ys[0] if pure else np.cumsum(ys)[-1] / cnt
        if (max_depth >= 0 and depth >= max_depth) or cnt < 2 * msl or pure:
            continue

        if max_features >= p:
            chosen = list(range(p))
        else:
            feats = list(range(p))
            for k in range(max_features):
                rng, r = _splitmix64(rng)
                j = k + int(r % (p - k))
                feats[k], feats[j] = feats[j], feats[k]
            chosen = sorted(feats[:max_features])

        best_score, best_f, best_pos = -np.inf, -1, -1
        nl = np.arange(1, cnt)
        for f in chosen:
            o = order[f, start:end]
            ys = y[o]
            xs = X[o, f]
            cs = np.cumsum(ys)
            total = cs[-1]
            sum_l = cs[:-1]
            sum_r = total - sum_l
            valid = (nl >= msl) & (cnt - nl >= msl) & (xs[:-1] != xs[1:])
            if not valid.any():
                continue
            score = sum_l * sum_l / nl + sum_r * sum_r / (cnt - nl)
            score[~valid] = -np.inf
            j = int(np.argmax(score))
            if score[j] > best_score:
                best_score, best_f, best_pos = score[j], f, start + j

        if best_f < 0:
            continue

        o = order[best_f]
        xa = X[o[best_pos], best_f]
        xb = X[o[best_pos + 1], best_f]
        thr = (xa + xb) / 2.0
        if thr >= xb:
            thr = xa
        feature[node] = best_f
        threshold[node] = thr

        goes_left = np.zeros(n, dtype=bool)
        goes_left[o[start : best_pos + 1]] = True
        for f in range(p):
            seg = order[f, start:end].copy()
            m = goes_left[seg]
            order[f, start:end] = np.concatenate([seg[m], seg[~m]])

        left[node], right[node] = n_nodes, n_nodes + 1
        n_nodes += 2
        split = best_pos + 1
        stack.append((right[node], split, end, depth + 1))
        stack.append((left[node], start, split, depth + 1))

    return (
        feature[:n_nodes].copy(),
        threshold[:n_nodes].copy(),
        left[:n_nodes].copy(),
        right[:n_nodes].copy(),
        value[:n_nodes].copy(),
    )


def predict_tree(feature, threshold, left, right, value, X):
    m = X.shape[0]
    node = np.zeros(m, dtype=np.int64)
    active = feature[node] >= 0
    rows = np.arange(m)
    while active.any():
        r = rows[active]
        nd = node[r]
        go_left = X[r, feature[nd]] <= threshold[nd]
        node[r] = np.where(go_left, left[nd], right[nd])
        active = feature[node] >= 0
    return value[node]
