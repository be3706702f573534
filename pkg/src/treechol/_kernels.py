"""Compiled kernels for factorization and preconditioner application.

Everything here mirrors the pure-Python reference implementations
(`sampling.py`, `ordering.py`, `rng.py`) operation-for-operation: same
counter-RNG keys, same (weight, index) star order, same left-to-right float
accumulation, same lazy bucket-queue semantics.  ``tests/test_reference.py``
asserts bit-identical factorizations between the two paths.

Data layout during elimination:
  - pair store: weight sum, multiplicity and live flag per vertex pair;
  - pair table: open-addressing hash map (u << 32 | v) -> store index;
  - adjacency: append-ordered linked lists of (neighbor, store index), one
    entry per endpoint per pair; entries to dead pairs are skipped lazily;
  - bucket queue: stamped entries, lowest non-empty bucket wins, LIFO within
    a bucket, stale entries discarded on pop.
"""

import numpy as np
from numba import njit, uint64

_EMPTY = np.uint64(0xFFFFFFFFFFFFFFFF)
_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_SALT = np.uint64(0xA0761D6478BD642F)
_ORDER_SALT = np.uint64(0x52414E444F524452)

OP_SHIFT = 0
OP_ATTACH = 1


@njit(cache=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@njit(cache=True, inline="always")
def _u01(seed, elim, star, draw):
    h = _mix64(seed ^ _SALT)
    h = _mix64(h + _GAMMA * (elim + np.uint64(1)))
    h = _mix64(h + _GAMMA * (star + np.uint64(1)))
    h = _mix64(h + _GAMMA * (draw + np.uint64(1)))
    return (h >> np.uint64(11)) * (2.0 ** -53)


@njit(cache=True)
def counter_u01_kernel(seed, elim, star, draw):
    return _u01(uint64(seed), uint64(elim), uint64(star), uint64(draw))


@njit(cache=True, inline="always")
def _bucket(d):
    if d <= 1:
        return 0
    b = 0
    x = d - 1
    while x > 0:
        x >>= 1
        b += 1
    return b


@njit(cache=True)
def _random_perm(n, seed):
    perm = np.arange(n)
    s2 = _mix64(uint64(seed) ^ _ORDER_SALT)
    for i in range(n - 1, 0, -1):
        j = int(_u01(s2, uint64(i), uint64(0), uint64(0)) * (i + 1))
        if j > i:
            j = i
        t = perm[i]
        perm[i] = perm[j]
        perm[j] = t
    return perm


@njit(cache=True)
def _merge_sort_star(nbr, w, cnt, deg, t_nbr, t_w, t_cnt):
    """Sort the first deg slots by (weight, vertex index), ascending."""
    width = 1
    while width < deg:
        lo = 0
        while lo < deg:
            mid = lo + width
            if mid > deg:
                mid = deg
            hi = lo + 2 * width
            if hi > deg:
                hi = deg
            a, b, k = lo, mid, lo
            while a < mid and b < hi:
                if w[a] < w[b] or (w[a] == w[b] and nbr[a] <= nbr[b]):
                    t_nbr[k] = nbr[a]
                    t_w[k] = w[a]
                    t_cnt[k] = cnt[a]
                    a += 1
                else:
                    t_nbr[k] = nbr[b]
                    t_w[k] = w[b]
                    t_cnt[k] = cnt[b]
                    b += 1
                k += 1
            while a < mid:
                t_nbr[k] = nbr[a]
                t_w[k] = w[a]
                t_cnt[k] = cnt[a]
                a += 1
                k += 1
            while b < hi:
                t_nbr[k] = nbr[b]
                t_w[k] = w[b]
                t_cnt[k] = cnt[b]
                b += 1
                k += 1
            lo = hi
        for idx in range(deg):
            nbr[idx] = t_nbr[idx]
            w[idx] = t_w[idx]
            cnt[idx] = t_cnt[idx]
        width *= 2


@njit(cache=True)
def factorize_kernel(n, e_u, e_v, e_w, k_split, l_merge, seed, order_mode):
    """Randomized approximate Cholesky elimination of a Laplacian.

    Inputs are the unique upper (u < v) off-diagonal pairs with positive
    weights.  ``l_merge == 0`` means unbounded multiplicity; ``order_mode``
    0 is approximate min-degree, 1 a seeded random permutation.

    Returns (perm, col_ptr, col_idx, col_w, col_d, stats) where stats =
    [underflow eliminations, multi-edge monotonicity violations].  Column
    pos holds the star of perm[pos] at its elimination, sorted in star
    order; col_d[pos] is its weighted degree (0 for component finals).
    """
    useed = uint64(seed)
    m = e_u.shape[0]

    # pair store
    s_cap = 2 * m + 16
    pw = np.empty(s_cap, dtype=np.float64)
    pcnt = np.empty(s_cap, dtype=np.int64)
    palive = np.empty(s_cap, dtype=np.uint8)
    ns = 0

    # hash table, capacity a power of two, load kept under ~0.5
    t_cap = 64
    while t_cap < 4 * (m + 16):
        t_cap *= 2
    t_keys = np.full(t_cap, _EMPTY, dtype=np.uint64)
    t_vals = np.empty(t_cap, dtype=np.int64)
    t_used = 0
    t_mask = np.uint64(t_cap - 1)

    # adjacency linked lists, append order
    a_cap = 4 * m + 16
    ent_nbr = np.empty(a_cap, dtype=np.int64)
    ent_pidx = np.empty(a_cap, dtype=np.int64)
    ent_next = np.empty(a_cap, dtype=np.int64)
    adj_head = np.full(n, -1, dtype=np.int64)
    adj_tail = np.full(n, -1, dtype=np.int64)
    ne = 0

    degree = np.zeros(n, dtype=np.int64)
    alive = np.ones(n, dtype=np.uint8)

    # bucket queue
    q_cap = 4 * n + 4 * m + 16
    q_v = np.empty(q_cap, dtype=np.int64)
    q_stamp = np.empty(q_cap, dtype=np.int64)
    q_next = np.empty(q_cap, dtype=np.int64)
    q_head = np.full(66, -1, dtype=np.int64)
    latest = np.zeros(n, dtype=np.int64)
    nq = 0
    serial = 0
    min_b = 0

    # initial graph
    for e in range(m):
        u = e_u[e]
        v = e_v[e]
        key = (np.uint64(u) << np.uint64(32)) | np.uint64(v)
        h = _mix64(key) & t_mask
        while t_keys[h] != _EMPTY:
            h = (h + np.uint64(1)) & t_mask
        t_keys[h] = key
        t_vals[h] = ns
        t_used += 1
        pw[ns] = e_w[e]
        pcnt[ns] = k_split
        palive[ns] = 1
        for end in range(2):
            a = u if end == 0 else v
            b = v if end == 0 else u
            ent_nbr[ne] = b
            ent_pidx[ne] = ns
            ent_next[ne] = -1
            if adj_tail[a] < 0:
                adj_head[a] = ne
            else:
                ent_next[adj_tail[a]] = ne
            adj_tail[a] = ne
            ne += 1
        ns += 1
        degree[u] += 1
        degree[v] += 1

    perm_rand = np.empty(0, dtype=np.int64)
    if order_mode == 1:
        perm_rand = _random_perm(n, seed)
    else:
        for v in range(n):
            serial += 1
            latest[v] = serial
            b = _bucket(degree[v])
            q_v[nq] = v
            q_stamp[nq] = serial
            q_next[nq] = q_head[b]
            q_head[b] = nq
            nq += 1

    # outputs
    perm = np.empty(n, dtype=np.int64)
    col_ptr = np.zeros(n + 1, dtype=np.int64)
    c_cap = 4 * m + 16
    col_idx = np.empty(c_cap, dtype=np.int64)
    col_w = np.empty(c_cap, dtype=np.float64)
    col_d = np.zeros(n, dtype=np.float64)

    # star scratch
    sc_cap = 64
    s_nbr = np.empty(sc_cap, dtype=np.int64)
    s_w = np.empty(sc_cap, dtype=np.float64)
    s_cnt = np.empty(sc_cap, dtype=np.int64)
    ts_nbr = np.empty(sc_cap, dtype=np.int64)
    ts_w = np.empty(sc_cap, dtype=np.float64)
    ts_cnt = np.empty(sc_cap, dtype=np.int64)
    pfx = np.empty(sc_cap + 1, dtype=np.float64)

    underflow = 0
    mono_viol = 0

    for pos in range(n):
        # ---- choose the vertex ----
        if order_mode == 1:
            v = perm_rand[pos]
        else:
            b = min_b
            v = -1
            while v < 0:
                e = q_head[b]
                while e >= 0:
                    cand = q_v[e]
                    st = q_stamp[e]
                    q_head[b] = q_next[e]
                    if alive[cand] == 1 and st == latest[cand]:
                        v = cand
                        break
                    e = q_head[b]
                if v >= 0:
                    min_b = b
                    break
                b += 1
        perm[pos] = v
        alive[v] = 0

        # ---- collect the live star, retiring its pairs ----
        deg = 0
        e = adj_head[v]
        while e >= 0:
            s = ent_pidx[e]
            if palive[s] == 1:
                u = ent_nbr[e]
                if deg == sc_cap:
                    sc_cap *= 2
                    s_nbr = np.concatenate((s_nbr, np.empty(deg, dtype=np.int64)))
                    s_w = np.concatenate((s_w, np.empty(deg, dtype=np.float64)))
                    s_cnt = np.concatenate((s_cnt, np.empty(deg, dtype=np.int64)))
                    ts_nbr = np.empty(sc_cap, dtype=np.int64)
                    ts_w = np.empty(sc_cap, dtype=np.float64)
                    ts_cnt = np.empty(sc_cap, dtype=np.int64)
                    pfx = np.empty(sc_cap + 1, dtype=np.float64)
                s_nbr[deg] = u
                s_w[deg] = pw[s]
                s_cnt[deg] = pcnt[s]
                deg += 1
                palive[s] = 0
                degree[u] -= 1
                if order_mode == 0:
                    serial += 1
                    latest[u] = serial
                    bb = _bucket(degree[u])
                    if nq == q_cap:
                        q_cap *= 2
                        q_v = np.concatenate((q_v, np.empty(nq, dtype=np.int64)))
                        q_stamp = np.concatenate((q_stamp, np.empty(nq, dtype=np.int64)))
                        q_next = np.concatenate((q_next, np.empty(nq, dtype=np.int64)))
                    q_v[nq] = u
                    q_stamp[nq] = serial
                    q_next[nq] = q_head[bb]
                    q_head[bb] = nq
                    nq += 1
                    if bb < min_b:
                        min_b = bb
            e = ent_next[e]
        adj_head[v] = -1
        adj_tail[v] = -1

        col_ptr[pos + 1] = col_ptr[pos]
        if deg == 0:
            continue

        _merge_sort_star(s_nbr, s_w, s_cnt, deg, ts_nbr, ts_w, ts_cnt)
        d = 0.0
        for t in range(deg):
            d += s_w[t]
        if not (d > 0.0):
            underflow += 1
            continue

        # record the column
        while col_ptr[pos] + deg > c_cap:
            c_cap *= 2
            col_idx = np.concatenate((col_idx, np.empty(col_idx.shape[0], dtype=np.int64)))
            col_w = np.concatenate((col_w, np.empty(col_w.shape[0], dtype=np.float64)))
        base = col_ptr[pos]
        for t in range(deg):
            col_idx[base + t] = s_nbr[t]
            col_w[base + t] = s_w[t]
        col_ptr[pos + 1] = base + deg
        col_d[pos] = d

        pfx[0] = 0.0
        for t in range(deg):
            pfx[t + 1] = pfx[t] + s_w[t]

        removed_multi = 0
        for t in range(deg):
            removed_multi += s_cnt[t]
        added_multi = 0

        # ---- sample one tree edge (or t merged copies) per star ----
        for t in range(deg - 1):
            c = s_cnt[t]
            tc = c if l_merge == 0 else min(c, l_merge)
            wbar = s_w[t] / tc
            rw = pfx[deg] - pfx[t + 1]
            wnew = (wbar * rw) / d
            iv = s_nbr[t]
            for h in range(tc):
                u01v = _u01(useed, uint64(pos), uint64(t), uint64(h))
                target = pfx[t + 1] + u01v * rw
                lo = t + 1
                hi = deg - 1
                while lo < hi:
                    mid = (lo + hi) >> 1
                    if pfx[mid + 1] > target:
                        hi = mid
                    else:
                        lo = mid + 1
                jv = s_nbr[lo]
                added_multi += 1
                # upsert the pair (iv, jv)
                a = iv if iv < jv else jv
                bvx = jv if iv < jv else iv
                key = (np.uint64(a) << np.uint64(32)) | np.uint64(bvx)
                hsl = _mix64(key) & t_mask
                sidx = -1
                while t_keys[hsl] != _EMPTY:
                    if t_keys[hsl] == key:
                        sidx = t_vals[hsl]
                        break
                    hsl = (hsl + np.uint64(1)) & t_mask
                if sidx >= 0 and palive[sidx] == 1:
                    pw[sidx] += wnew
                    pcnt[sidx] += 1
                else:
                    if ns == s_cap:
                        s_cap *= 2
                        pw = np.concatenate((pw, np.empty(ns, dtype=np.float64)))
                        pcnt = np.concatenate((pcnt, np.empty(ns, dtype=np.int64)))
                        palive = np.concatenate((palive, np.empty(ns, dtype=np.uint8)))
                    pw[ns] = wnew
                    pcnt[ns] = 1
                    palive[ns] = 1
                    t_keys[hsl] = key
                    t_vals[hsl] = ns
                    t_used += 1
                    if 2 * t_used > t_cap:
                        # rebuild at double capacity
                        t_cap *= 2
                        t_mask = np.uint64(t_cap - 1)
                        old_keys = t_keys
                        old_vals = t_vals
                        t_keys = np.full(t_cap, _EMPTY, dtype=np.uint64)
                        t_vals = np.empty(t_cap, dtype=np.int64)
                        for oi in range(old_keys.shape[0]):
                            ok = old_keys[oi]
                            if ok != _EMPTY:
                                hh = _mix64(ok) & t_mask
                                while t_keys[hh] != _EMPTY:
                                    hh = (hh + np.uint64(1)) & t_mask
                                t_keys[hh] = ok
                                t_vals[hh] = old_vals[oi]
                    if ne + 2 > a_cap:
                        a_cap *= 2
                        ent_nbr = np.concatenate((ent_nbr, np.empty(ne, dtype=np.int64)))
                        ent_pidx = np.concatenate((ent_pidx, np.empty(ne, dtype=np.int64)))
                        ent_next = np.concatenate((ent_next, np.empty(ne, dtype=np.int64)))
                    for end in range(2):
                        aa = iv if end == 0 else jv
                        bb2 = jv if end == 0 else iv
                        ent_nbr[ne] = bb2
                        ent_pidx[ne] = ns
                        ent_next[ne] = -1
                        if adj_tail[aa] < 0:
                            adj_head[aa] = ne
                        else:
                            ent_next[adj_tail[aa]] = ne
                        adj_tail[aa] = ne
                        ne += 1
                    ns += 1
                    for vert in (iv, jv):
                        degree[vert] += 1
                        if order_mode == 0:
                            serial += 1
                            latest[vert] = serial
                            bb = _bucket(degree[vert])
                            if nq == q_cap:
                                q_cap *= 2
                                q_v = np.concatenate((q_v, np.empty(nq, dtype=np.int64)))
                                q_stamp = np.concatenate((q_stamp, np.empty(nq, dtype=np.int64)))
                                q_next = np.concatenate((q_next, np.empty(nq, dtype=np.int64)))
                            q_v[nq] = vert
                            q_stamp[nq] = serial
                            q_next[nq] = q_head[bb]
                            q_head[bb] = nq
                            nq += 1
                            if bb < min_b:
                                min_b = bb

        if added_multi > removed_multi:
            mono_viol += 1

    stats = np.empty(2, dtype=np.int64)
    stats[0] = underflow
    stats[1] = mono_viol
    return (perm, col_ptr, col_idx[: col_ptr[n]].copy(),
            col_w[: col_ptr[n]].copy(), col_d, stats)


@njit(cache=True)
def build_rowops(n, perm, col_ptr, col_idx, col_w, col_d):
    """Shift/attach operation stream and diagonal from elimination columns."""
    n_ops = col_ptr[n]
    op_kind = np.empty(n_ops, dtype=np.uint8)
    op_v = np.empty(n_ops, dtype=np.int64)
    op_o = np.empty(n_ops, dtype=np.int64)
    op_theta = np.empty(n_ops, dtype=np.float64)
    phi = np.zeros(n, dtype=np.float64)
    k = 0
    for pos in range(n):
        lo = col_ptr[pos]
        hi = col_ptr[pos + 1]
        deg = hi - lo
        if deg == 0:
            continue
        v = perm[pos]
        d = col_d[pos]
        rem = d
        for t in range(deg - 1):
            w = col_w[lo + t]
            op_kind[k] = OP_SHIFT
            op_v[k] = v
            op_o[k] = col_idx[lo + t]
            op_theta[k] = w / rem
            rem -= w
            k += 1
        wlast = col_w[hi - 1]
        op_kind[k] = OP_ATTACH
        op_v[k] = v
        op_o[k] = col_idx[hi - 1]
        op_theta[k] = 0.0
        k += 1
        phi[v] = (wlast * wlast) / d
    return op_kind, op_v, op_o, op_theta, phi


@njit(cache=True)
def rowop_solve(op_kind, op_v, op_o, op_theta, phi, x):
    """x <- L'^{-T} Phi^+ L'^{-1} x, in place, O(#ops)."""
    n_ops = op_kind.shape[0]
    for k in range(n_ops):
        v = op_v[k]
        o = op_o[k]
        if op_kind[k] == OP_SHIFT:
            th = op_theta[k]
            t = x[v]
            x[v] = (1.0 - th) * t
            x[o] += th * t
        else:
            x[o] += x[v]
    for i in range(x.shape[0]):
        if phi[i] > 0.0:
            x[i] /= phi[i]
        else:
            x[i] = 0.0
    for k in range(n_ops - 1, -1, -1):
        v = op_v[k]
        o = op_o[k]
        if op_kind[k] == OP_SHIFT:
            th = op_theta[k]
            x[v] = (1.0 - th) * x[v] + th * x[o]
        else:
            x[v] += x[o]


@njit(cache=True)
def rowop_apply(op_kind, op_v, op_o, op_theta, phi, x):
    """x <- (Pi ops) Phi (Pi ops)^T x, in place (the preconditioner itself).

    The first emitted operation is the leftmost factor, so the transpose
    pass runs in emission order and the plain pass in reverse.
    """
    n_ops = op_kind.shape[0]
    for k in range(n_ops):
        v = op_v[k]
        o = op_o[k]
        if op_kind[k] == OP_SHIFT:
            th = op_theta[k]
            c = th / (1.0 - th)
            x[v] += c * (x[v] - x[o])
        else:
            x[v] -= x[o]
    for i in range(x.shape[0]):
        x[i] *= phi[i]
    for k in range(n_ops - 1, -1, -1):
        v = op_v[k]
        o = op_o[k]
        if op_kind[k] == OP_SHIFT:
            th = op_theta[k]
            c = th / (1.0 - th)
            t = x[v]
            x[v] = t + c * t
            x[o] -= c * t
        else:
            x[o] -= x[v]


@njit(cache=True)
def mc_mean_llt(n, e_u, e_v, e_w, k_split, l_merge, seeds, order_mode):
    """Sum and centered sum of squares of L L^T entries across seeds.

    Dense accumulation, intended for the small-graph unbiasedness checks.
    """
    acc = np.zeros((n, n), dtype=np.float64)
    acc2 = np.zeros((n, n), dtype=np.float64)
    low = np.zeros((n, n), dtype=np.float64)
    llt = np.zeros((n, n), dtype=np.float64)
    for si in range(seeds.shape[0]):
        perm, col_ptr, col_idx, col_w, col_d, _ = factorize_kernel(
            n, e_u, e_v, e_w, k_split, l_merge, seeds[si], order_mode)
        for i in range(n):
            for j in range(n):
                low[i, j] = 0.0
        for pos in range(n):
            v = perm[pos]
            d = col_d[pos]
            if d <= 0.0:
                continue
            rd = np.sqrt(d)
            low[v, pos] = rd
            for t in range(col_ptr[pos], col_ptr[pos + 1]):
                low[col_idx[t], pos] = -col_w[t] / rd
        for i in range(n):
            for j in range(n):
                s = 0.0
                for t in range(n):
                    s += low[i, t] * low[j, t]
                llt[i, j] = s
        acc += llt
        acc2 += llt * llt
    return acc, acc2
