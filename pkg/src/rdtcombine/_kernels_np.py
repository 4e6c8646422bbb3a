"""Pure-numpy fallbacks for the hot kernels.

Same contracts as :mod:`rdtcombine._kernels_nb`.  Partitioning and routing
are vectorized across instances while consuming the exact SplitMix64 draw
sequence of the numba kernels, so tree structure and routed counts are
bit-identical across backends; the belief folds repeat the same
floating-point expressions in the same order.
"""

from __future__ import annotations

import numpy as np

from rdtcombine._splitmix import GOLDEN, MASK64, mix64


def build_tree_arrays(X, y, kinds, ncats, min_leaf, max_depth, seed, retries):
    n, m = X.shape
    cmax = max(2, int(ncats.max()) if m else 2)
    node_cap = 1 if n <= 1 else 1 + (n - 1) * cmax

    kind = np.zeros(node_cap, dtype=np.int8)
    feat = np.full(node_cap, -1, dtype=np.int32)
    thresh = np.full(node_cap, np.nan, dtype=np.float64)
    npos = np.zeros(node_cap, dtype=np.int64)
    nneg = np.zeros(node_cap, dtype=np.int64)
    child_base = np.full(node_cap, -1, dtype=np.int64)
    n_children = np.zeros(node_cap, dtype=np.int32)
    miss_child = np.full(node_cap, -1, dtype=np.int64)
    parent = np.full(node_cap, -1, dtype=np.int64)
    children = np.full(node_cap, -1, dtype=np.int64)

    idx = np.arange(n, dtype=np.int64)
    numeric = kinds == 0

    state = int(seed) & MASK64
    n_nodes = 1
    children_len = 0
    # stack entries: (node, start, end, depth)
    stack = [(0, 0, n, 0)]

    while stack:
        v, s, e, d = stack.pop()
        nn = e - s
        seg = idx[s:e]
        p = int((y[seg] == 1).sum())
        npos[v] = p
        nneg[v] = nn - p

        if nn <= min_leaf:
            continue
        if max_depth >= 0 and d >= max_depth:
            continue

        used = np.zeros(m, dtype=bool)
        anc = parent[v]
        while anc >= 0:
            fa = feat[anc]
            if kinds[fa] == 1:
                used[fa] = True
            anc = parent[anc]
        avail = np.flatnonzero(numeric | ~used)
        na = len(avail)
        if na == 0:
            continue

        chosen = -1
        nslots = 0
        ccounts = None
        vals = None
        for _ in range(retries):
            state = (state + GOLDEN) & MASK64
            f = int(avail[mix64(state) % na])
            vals = X[seg, f]
            present = ~np.isnan(vals)
            if kinds[f] == 0:
                state = (state + GOLDEN) & MASK64
                t = float(X[seg[mix64(state) % nn], f])
                if np.isnan(t):
                    continue
                left = vals <= t  # NaN compares False
                right = vals > t
                lc = int(left.sum())
                rc = int(right.sum())
                if lc >= 1 and rc >= 1:
                    chosen = f
                    nslots = 2
                    ccounts = np.array([lc, rc], dtype=np.int64)
                    thresh[v] = t
                    break
            else:
                C = int(ncats[f])
                codes = vals[present].astype(np.int64)
                counts = np.bincount(codes, minlength=C).astype(np.int64)
                if int((counts > 0).sum()) >= 2:
                    chosen = f
                    nslots = C
                    ccounts = counts
                    break
        if chosen < 0:
            continue

        feat[v] = chosen
        kind[v] = 1 if kinds[chosen] == 0 else 2

        attach = int(np.argmax(ccounts))  # argmax keeps the first maximum

        vals = X[seg, chosen]
        missing = np.isnan(vals)
        if kind[v] == 1:
            assign = np.where(vals > thresh[v], 1, 0).astype(np.int64)
        else:
            assign = np.where(missing, 0, vals).astype(np.int64)
        assign[missing] = attach

        final_counts = np.bincount(assign, minlength=nslots).astype(np.int64)

        cb = children_len
        child_base[v] = cb
        n_children[v] = nslots
        for c in range(nslots):
            if final_counts[c] > 0:
                children[cb + c] = n_nodes
                parent[n_nodes] = v
                n_nodes += 1
            else:
                children[cb + c] = -1
        children_len += nslots

        miss_child[v] = children[cb + int(np.argmax(final_counts))]

        offs = np.empty(nslots + 1, dtype=np.int64)
        offs[0] = s
        np.cumsum(final_counts, out=offs[1:])
        offs[1:] += s
        parts = [seg[assign == c] for c in range(nslots)]
        idx[s:e] = np.concatenate(parts)

        for c in range(nslots - 1, -1, -1):
            cid = children[cb + c]
            if cid >= 0:
                stack.append((int(cid), int(offs[c]), int(offs[c + 1]), d + 1))

    return (
        kind[:n_nodes].copy(),
        feat[:n_nodes].copy(),
        thresh[:n_nodes].copy(),
        npos[:n_nodes].copy(),
        nneg[:n_nodes].copy(),
        child_base[:n_nodes].copy(),
        n_children[:n_nodes].copy(),
        miss_child[:n_nodes].copy(),
        parent[:n_nodes].copy(),
        children[:children_len].copy(),
    )


def route_all(
    Xq,
    kind,
    feat,
    thresh,
    npos,
    nneg,
    child_base,
    n_children,
    miss_child,
    children,
    tree_off,
    child_off,
):
    q = Xq.shape[0]
    K = tree_off.shape[0] - 1
    out = np.empty((q, K, 2), dtype=np.int64)
    rows = np.arange(q)
    for t in range(K):
        nb = int(tree_off[t])
        cb = int(child_off[t])
        cur = np.zeros(q, dtype=np.int64)
        active = kind[nb + cur] != 0
        while active.any():
            ai = np.flatnonzero(active)
            v = cur[ai]
            f = feat[nb + v]
            xv = Xq[ai, f]
            isna = np.isnan(xv)
            nxt = np.empty(len(ai), dtype=np.int64)
            if isna.any():
                nxt[isna] = miss_child[nb + v[isna]]
            is_num = (kind[nb + v] == 1) & ~isna
            if is_num.any():
                slot = (xv[is_num] > thresh[nb + v[is_num]]).astype(np.int64)
                nxt[is_num] = children[cb + child_base[nb + v[is_num]] + slot]
            is_nom = (kind[nb + v] == 2) & ~isna
            if is_nom.any():
                c = xv[is_nom].astype(np.int64)
                vi = v[is_nom]
                ok = (c >= 0) & (c < n_children[nb + vi])
                res = np.full(len(c), -1, dtype=np.int64)
                res[ok] = children[cb + child_base[nb + vi[ok]] + c[ok]]
                nxt[is_nom] = res
            move = nxt >= 0
            moved = ai[move]
            cur[moved] = nxt[move]
            active = np.zeros(q, dtype=bool)
            active[moved] = kind[nb + cur[moved]] != 0
        out[rows, t, 0] = npos[nb + cur]
        out[rows, t, 1] = nneg[nb + cur]
    return out


def dempster_fold(masses):
    """Left fold of the unnormalized conjunctive rule over axis 1."""
    N, K = masses.shape[0], masses.shape[1]
    p = masses[:, 0, 0].copy()
    q = masses[:, 0, 1].copy()
    o = masses[:, 0, 2].copy()
    e = 1.0 - (p + q + o)
    for k in range(1, K):
        p2 = masses[:, k, 0]
        q2 = masses[:, k, 1]
        o2 = masses[:, k, 2]
        e2 = 1.0 - (p2 + q2 + o2)
        en = e * e2 + e * p2 + e * q2 + e * o2 + p * e2 + q * e2 + o * e2 + p * q2 + q * p2
        pn = p * p2 + p * o2 + o * p2
        qn = q * q2 + q * o2 + o * q2
        on = o * o2
        e, p, q, o = en, pn, qn, on
    out = np.empty((N, 4), dtype=np.float64)
    out[:, 0] = e
    out[:, 1] = p
    out[:, 2] = q
    out[:, 3] = o
    return out


def cautious_fold(weights):
    """Componentwise minimum over axis 1 of (N, K, 3) weight triples."""
    return weights.min(axis=1)


def splitmix_draws(seed, count):
    """First ``count`` SplitMix64 draws; used to cross-check backends."""
    out = np.empty(count, dtype=np.uint64)
    state = int(seed) & MASK64
    for i in range(count):
        state = (state + GOLDEN) & MASK64
        out[i] = mix64(state)
    return out
