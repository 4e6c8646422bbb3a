"""Numba-compiled hot kernels: tree construction, routing, belief folds.

The numpy fallback in :mod:`rdtcombine._kernels_np` mirrors every draw and
every floating-point expression of these kernels, so outputs agree across
backends (integers exactly, floats to rounding error).  Randomness is inline
SplitMix64: ``state += GOLDEN; value = mix(state)``.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


@njit(cache=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


@njit(cache=True)
def _build_impl(X, y, kinds, ncats, min_leaf, max_depth, seed, retries):
    n, m = X.shape
    cmax = 2
    for f in range(m):
        if ncats[f] > cmax:
            cmax = ncats[f]
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

    st_node = np.empty(node_cap, dtype=np.int64)
    st_start = np.empty(node_cap, dtype=np.int64)
    st_end = np.empty(node_cap, dtype=np.int64)
    st_depth = np.empty(node_cap, dtype=np.int64)

    idx = np.arange(n, dtype=np.int64)
    tmp = np.empty(n, dtype=np.int64)
    assign = np.empty(n, dtype=np.int64)
    avail = np.empty(m, dtype=np.int64)
    used_ver = np.zeros(m, dtype=np.int64)
    ccounts = np.empty(cmax, dtype=np.int64)
    offs = np.empty(cmax + 1, dtype=np.int64)
    cursor = np.empty(cmax, dtype=np.int64)

    state = seed
    version = np.int64(0)
    n_nodes = 1
    children_len = 0
    sp = 0
    st_node[sp] = 0
    st_start[sp] = 0
    st_end[sp] = n
    st_depth[sp] = 0
    sp += 1

    while sp > 0:
        sp -= 1
        v = st_node[sp]
        s = st_start[sp]
        e = st_end[sp]
        d = st_depth[sp]
        nn = e - s

        p = 0
        for i in range(s, e):
            if y[idx[i]] == 1:
                p += 1
        npos[v] = p
        nneg[v] = nn - p

        if nn <= min_leaf:
            continue
        if max_depth >= 0 and d >= max_depth:
            continue

        version += 1
        anc = parent[v]
        while anc >= 0:
            fa = feat[anc]
            if kinds[fa] == 1:
                used_ver[fa] = version
            anc = parent[anc]
        na = 0
        for f in range(m):
            if kinds[f] == 0 or used_ver[f] != version:
                avail[na] = f
                na += 1
        if na == 0:
            continue

        chosen = -1
        nslots = 0
        for _ in range(retries):
            state = state + _GOLDEN
            u = _mix64(state)
            f = avail[int(u % np.uint64(na))]
            if kinds[f] == 0:
                state = state + _GOLDEN
                u = _mix64(state)
                ti = int(u % np.uint64(nn))
                t = X[idx[s + ti], f]
                if not (t == t):
                    continue
                lc = 0
                rc = 0
                for i in range(s, e):
                    xv = X[idx[i], f]
                    if xv == xv:
                        if xv <= t:
                            lc += 1
                        else:
                            rc += 1
                if lc >= 1 and rc >= 1:
                    chosen = f
                    nslots = 2
                    ccounts[0] = lc
                    ccounts[1] = rc
                    thresh[v] = t
                    break
            else:
                C = int(ncats[f])
                for c in range(C):
                    ccounts[c] = 0
                for i in range(s, e):
                    xv = X[idx[i], f]
                    if xv == xv:
                        ccounts[int(xv)] += 1
                nonempty = 0
                for c in range(C):
                    if ccounts[c] > 0:
                        nonempty += 1
                if nonempty >= 2:
                    chosen = f
                    nslots = C
                    break
        if chosen < 0:
            continue

        feat[v] = chosen
        kind[v] = 1 if kinds[chosen] == 0 else 2

        attach = 0
        best = ccounts[0]
        for c in range(1, nslots):
            if ccounts[c] > best:
                best = ccounts[c]
                attach = c

        for i in range(s, e):
            xv = X[idx[i], chosen]
            if not (xv == xv):
                assign[i] = attach
            elif kind[v] == 1:
                assign[i] = 0 if xv <= thresh[v] else 1
            else:
                assign[i] = int(xv)

        for c in range(nslots):
            ccounts[c] = 0
        for i in range(s, e):
            ccounts[assign[i]] += 1

        cb = children_len
        child_base[v] = cb
        n_children[v] = nslots
        for c in range(nslots):
            if ccounts[c] > 0:
                children[cb + c] = n_nodes
                parent[n_nodes] = v
                n_nodes += 1
            else:
                children[cb + c] = -1
        children_len += nslots

        mbest = np.int64(-1)
        mslot = 0
        for c in range(nslots):
            if ccounts[c] > mbest:
                mbest = ccounts[c]
                mslot = c
        miss_child[v] = children[cb + mslot]

        offs[0] = s
        for c in range(nslots):
            offs[c + 1] = offs[c] + ccounts[c]
            cursor[c] = offs[c]
        for i in range(s, e):
            sl = assign[i]
            tmp[cursor[sl]] = idx[i]
            cursor[sl] += 1
        for i in range(s, e):
            idx[i] = tmp[i]

        for c in range(nslots - 1, -1, -1):
            cid = children[cb + c]
            if cid >= 0:
                st_node[sp] = cid
                st_start[sp] = offs[c]
                st_end[sp] = offs[c + 1]
                st_depth[sp] = d + 1
                sp += 1

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


def build_tree_arrays(X, y, kinds, ncats, min_leaf, max_depth, seed, retries):
    return _build_impl(
        X,
        y,
        kinds,
        ncats,
        np.int64(min_leaf),
        np.int64(max_depth),
        np.uint64(seed),
        np.int64(retries),
    )


@njit(cache=True)
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
    for t in range(K):
        nb = tree_off[t]
        cb = child_off[t]
        for i in range(q):
            v = np.int64(0)
            while kind[nb + v] != 0:
                f = feat[nb + v]
                xv = Xq[i, f]
                if not (xv == xv):
                    nxt = miss_child[nb + v]
                elif kind[nb + v] == 1:
                    slot = 0 if xv <= thresh[nb + v] else 1
                    nxt = children[cb + child_base[nb + v] + slot]
                else:
                    c = np.int64(xv)
                    if c < 0 or c >= n_children[nb + v]:
                        nxt = np.int64(-1)
                    else:
                        nxt = children[cb + child_base[nb + v] + c]
                if nxt < 0:
                    break
                v = nxt
            out[i, t, 0] = npos[nb + v]
            out[i, t, 1] = nneg[nb + v]
    return out


@njit(cache=True)
def dempster_fold(masses):
    """Left fold of the unnormalized conjunctive rule over axis 1.

    ``masses`` is (N, K, 3) float64 holding (pos, neg, omega) per source;
    the mass on the empty set is implied as 1 - (pos + neg + omega).
    Returns (N, 4): columns (empty, pos, neg, omega).
    """
    N, K = masses.shape[0], masses.shape[1]
    out = np.empty((N, 4), dtype=np.float64)
    for i in range(N):
        p = masses[i, 0, 0]
        q = masses[i, 0, 1]
        o = masses[i, 0, 2]
        e = 1.0 - (p + q + o)
        for k in range(1, K):
            p2 = masses[i, k, 0]
            q2 = masses[i, k, 1]
            o2 = masses[i, k, 2]
            e2 = 1.0 - (p2 + q2 + o2)
            en = e * e2 + e * p2 + e * q2 + e * o2 + p * e2 + q * e2 + o * e2 + p * q2 + q * p2
            pn = p * p2 + p * o2 + o * p2
            qn = q * q2 + q * o2 + o * q2
            on = o * o2
            e = en
            p = pn
            q = qn
            o = on
        out[i, 0] = e
        out[i, 1] = p
        out[i, 2] = q
        out[i, 3] = o
    return out


@njit(cache=True)
def cautious_fold(weights):
    """Componentwise minimum over axis 1 of (N, K, 3) weight triples."""
    N, K = weights.shape[0], weights.shape[1]
    out = np.empty((N, 3), dtype=np.float64)
    for i in range(N):
        a = weights[i, 0, 0]
        b = weights[i, 0, 1]
        c = weights[i, 0, 2]
        for k in range(1, K):
            if weights[i, k, 0] < a:
                a = weights[i, k, 0]
            if weights[i, k, 1] < b:
                b = weights[i, k, 1]
            if weights[i, k, 2] < c:
                c = weights[i, k, 2]
        out[i, 0] = a
        out[i, 1] = b
        out[i, 2] = c
    return out


@njit(cache=True)
def splitmix_draws(seed, count):
    """First ``count`` SplitMix64 draws; used to cross-check backends."""
    out = np.empty(count, dtype=np.uint64)
    state = seed
    for i in range(count):
        state = state + _GOLDEN
        out[i] = _mix64(state)
    return out
