"""Hot loops of the search-game solvers.

Every kernel is written in the subset of Python that numba compiles.  With
``IIPG_DISABLE_NUMBA=1`` the same functions run as plain Python over numpy
arrays, which is slow but handy for debugging and for the benchmark.

Vertex sets are int64 bitmasks, so graphs have at most 62 vertices (31 for
the kernels that pack two sets into one key).
"""
from __future__ import annotations

import os

import numpy as np

NUMBA_DISABLED = os.environ.get("IIPG_DISABLE_NUMBA", "").strip() not in ("", "0")

if NUMBA_DISABLED:
    def jit(fn):
        return fn

    def new_map():
        return {}
else:
    from numba import njit, types
    from numba.typed import Dict

    def jit(fn):
        return njit(cache=True)(fn)

    @njit(cache=True)
    def new_map():
        return Dict.empty(types.int64, types.int64)


@jit
def popcount(x):
    c = 0
    while x != 0:
        x &= x - 1
        c += 1
    return c


@jit
def lowest(x):
    i = 0
    while (x >> i) & 1 == 0:
        i += 1
    return i


@jit
def out_union(adj, mask):
    out = adj[0] & 0
    v = 0
    while mask != 0:
        if mask & 1:
            out |= adj[v]
        mask >>= 1
        v += 1
    return out


@jit
def reach(adj, src, blk):
    seen = src & ~blk
    frontier = seen
    while frontier != 0:
        frontier = out_union(adj, frontier) & ~seen & ~blk
        seen |= frontier
    return seen


@jit
def source_flaps(succ, pred, region, out):
    """Write the source SCCs of G[region] into ``out``; return how many."""
    blk = ~region
    rest = region
    cnt = 0
    while rest != 0:
        v = lowest(rest)
        one = rest & 0
        one |= 1
        comp = reach(succ, one << v, blk) & reach(pred, one << v, blk)
        rest &= ~comp
        if out_union(pred, comp) & region & ~comp == 0:
            out[cnt] = comp
            cnt += 1
    return cnt


@jit
def push(arr, size, val):
    if size == arr.shape[0]:
        grown = np.empty(2 * arr.shape[0], np.int64)
        grown[:size] = arr[:size]
        arr = grown
    arr[size] = val
    return arr


@jit
def territories(succ, pred, region, r, flaps, out):
    """Maximal robber territories inside ``region`` for ``r`` robbers.

    With at most ``r`` source flaps the robbers cover all of ``region``;
    otherwise every choice of ``r`` source flaps gives the union of their
    closures.  Returns the count and the (possibly regrown) output buffer.
    """
    cnt = source_flaps(succ, pred, region, flaps)
    if cnt <= r:
        out[0] = region
        return 1, out
    blk = ~region
    closures = np.empty(cnt, np.int64)
    for i in range(cnt):
        closures[i] = reach(succ, flaps[i], blk)
    c = np.arange(r)
    m = 0
    while True:
        z = closures[c[0]]
        for i in range(1, r):
            z |= closures[c[i]]
        dup = False
        for j in range(m):
            if out[j] == z:
                dup = True
                break
        if not dup:
            out = push(out, m, z)
            m += 1
        i = r - 1
        while i >= 0 and c[i] == cnt - r + i:
            i -= 1
        if i < 0:
            break
        c[i] += 1
        for j in range(i + 1, r):
            c[j] = c[j - 1] + 1
    return m, out


# -- exploration of the monotone game over robber territories ------------------

@jit
def explore_monotone(succ, pred, n, k, r, flap_only, inits):
    """Monotone k-cops / r-robbers game with the state reduced to the territory Z.

    Cops sit on the front N+(Z) \\ Z, which they can never vacate, so an option is
    a nonempty set N of new cops inside Z with |front| + |N| <= k.
    """
    index = new_map()
    states = np.empty(64, np.int64)
    ns = 0
    for z in inits:
        if z not in index:
            index[z] = ns
            states = push(states, ns, z)
            ns += 1
    opt_ptr = np.zeros(64, np.int64)
    opt_move = np.empty(64, np.int64)
    succ_ptr = np.zeros(64, np.int64)
    succ_idx = np.empty(64, np.int64)
    no = 0
    ne = 0
    flaps = np.empty(n + 1, np.int64)
    terr = np.empty(16, np.int64)
    elems = np.empty(n + 1, np.int64)
    head = 0
    while head < ns:
        z = states[head]
        front = out_union(succ, z) & ~z
        budget = k - popcount(front)
        allowed = z
        if flap_only:
            cnt = source_flaps(succ, pred, z, flaps)
            allowed = z & 0
            for i in range(cnt):
                allowed |= flaps[i]
        m = 0
        rest = allowed
        while rest != 0:
            low = rest & -rest
            elems[m] = low
            m += 1
            rest ^= low
        top = min(budget, m)
        for size in range(1, top + 1):
            c = np.arange(size)
            while True:
                nmask = z & 0
                for i in range(size):
                    nmask |= elems[c[i]]
                x = z & ~nmask
                opt_move = push(opt_move, no, nmask)
                if x != 0:
                    t, terr = territories(succ, pred, x, r, flaps, terr)
                    for j in range(t):
                        z2 = terr[j]
                        if z2 not in index:
                            index[z2] = ns
                            states = push(states, ns, z2)
                            ns += 1
                        succ_idx = push(succ_idx, ne, index[z2])
                        ne += 1
                no += 1
                succ_ptr = push(succ_ptr, no, ne)
                i = size - 1
                while i >= 0 and c[i] == m - size + i:
                    i -= 1
                if i < 0:
                    break
                c[i] += 1
                for j in range(i + 1, size):
                    c[j] = c[j - 1] + 1
        head += 1
        opt_ptr = push(opt_ptr, head, no)
    return states[:ns].copy(), opt_ptr[:ns + 1].copy(), opt_move[:no].copy(), \
        succ_ptr[:no + 1].copy(), succ_idx[:ne].copy()


# -- exploration of the general (U, Z) game ------------------------------------

@jit
def explore_general(succ, pred, n, r, monotone, restrict, cop_sets, inits):
    """States are keys ``U << 32 | Z``; options are all cop sets in ``cop_sets``.

    ``restrict``: 0 free placement, 1 new cops inside Z, 2 new cops inside the
    source flaps of Z.  In monotone mode an option that lets the robbers reach
    a vacated vertex is dropped (it would lose for the cops on the spot).
    """
    index = new_map()
    states = np.empty(64, np.int64)
    ns = 0
    for key in inits:
        if key not in index:
            index[key] = ns
            states = push(states, ns, key)
            ns += 1
    opt_ptr = np.zeros(64, np.int64)
    opt_move = np.empty(64, np.int64)
    succ_ptr = np.zeros(64, np.int64)
    succ_idx = np.empty(64, np.int64)
    no = 0
    ne = 0
    flaps = np.empty(n + 1, np.int64)
    terr = np.empty(16, np.int64)
    low32 = (states[0] & 0) | 0xFFFFFFFF
    head = 0
    while head < ns:
        key = states[head]
        u = key >> 32
        z = key & low32
        allowed = ~(z & 0)
        if restrict == 1:
            allowed = z
        elif restrict == 2:
            cnt = source_flaps(succ, pred, z, flaps)
            allowed = z & 0
            for i in range(cnt):
                allowed |= flaps[i]
        for ci in range(cop_sets.shape[0]):
            u2 = cop_sets[ci]
            if u2 & ~u & ~allowed != 0:
                continue
            shared = u & u2
            xr = reach(succ, z, shared)
            if monotone and xr & u & ~u2 != 0:
                continue
            x = xr & ~u2
            opt_move = push(opt_move, no, u2)
            if x != 0:
                t, terr = territories(succ, pred, x, r, flaps, terr)
                for j in range(t):
                    key2 = (u2 << 32) | terr[j]
                    if key2 not in index:
                        index[key2] = ns
                        states = push(states, ns, key2)
                        ns += 1
                    succ_idx = push(succ_idx, ne, index[key2])
                    ne += 1
            no += 1
            succ_ptr = push(succ_ptr, no, ne)
        head += 1
        opt_ptr = push(opt_ptr, head, no)
    return states[:ns].copy(), opt_ptr[:ns + 1].copy(), opt_move[:no].copy(), \
        succ_ptr[:no + 1].copy(), succ_idx[:ne].copy()


# -- entanglement ---------------------------------------------------------------

@jit
def explore_entanglement(succ, n, k):
    """States ``U * 64 + v``: cops on U, robber on v (v not in U)."""
    index = new_map()
    states = np.empty(64, np.int64)
    ns = 0
    for v in range(n):
        key = states[0] * 0 + v
        index[key] = ns
        states = push(states, ns, key)
        ns += 1
    opt_ptr = np.zeros(64, np.int64)
    opt_move = np.empty(64, np.int64)
    succ_ptr = np.zeros(64, np.int64)
    succ_idx = np.empty(64, np.int64)
    no = 0
    ne = 0
    cand = np.empty(n + 2, np.int64)
    head = 0
    while head < ns:
        key = states[head]
        u = key >> 6
        v = key & 63
        bit = (u & 0) | 1
        bit <<= v
        nc = 0
        cand[nc] = u
        nc += 1
        if popcount(u) < k:
            cand[nc] = u | bit
            nc += 1
        rest = u
        while rest != 0:
            low = rest & -rest
            cand[nc] = (u & ~low) | bit
            nc += 1
            rest ^= low
        for ci in range(nc):
            u2 = cand[ci]
            opt_move = push(opt_move, no, u2)
            moves = succ[v] & ~u2
            w = 0
            while moves != 0:
                if moves & 1:
                    key2 = u2 * 64 + w
                    if key2 not in index:
                        index[key2] = ns
                        states = push(states, ns, key2)
                        ns += 1
                    succ_idx = push(succ_idx, ne, index[key2])
                    ne += 1
                moves >>= 1
                w += 1
            no += 1
            succ_ptr = push(succ_ptr, no, ne)
        head += 1
        opt_ptr = push(opt_ptr, head, no)
    return states[:ns].copy(), opt_ptr[:ns + 1].copy(), opt_move[:no].copy(), \
        succ_ptr[:no + 1].copy(), succ_idx[:ne].copy()


# -- directed path-width (invisible robber) -----------------------------------

@jit
def explore_dpw_monotone(succ, n, k, full):
    """State = contaminated set R; cops hold its front and add one vertex of R."""
    index = new_map()
    states = np.empty(64, np.int64)
    states[0] = full
    index[full] = 0
    ns = 1
    opt_ptr = np.zeros(64, np.int64)
    opt_move = np.empty(64, np.int64)
    succ_ptr = np.zeros(64, np.int64)
    succ_idx = np.empty(64, np.int64)
    no = 0
    ne = 0
    head = 0
    while head < ns:
        rset = states[head]
        front = out_union(succ, rset) & ~rset
        base = popcount(front)
        if base < k:
            rest = rset
            while rest != 0:
                low = rest & -rest
                rest ^= low
                opt_move = push(opt_move, no, front | low)
                r2 = rset & ~low
                if r2 != 0:
                    if r2 not in index:
                        index[r2] = ns
                        states = push(states, ns, r2)
                        ns += 1
                    succ_idx = push(succ_idx, ne, index[r2])
                    ne += 1
                no += 1
                succ_ptr = push(succ_ptr, no, ne)
        head += 1
        opt_ptr = push(opt_ptr, head, no)
    return states[:ns].copy(), opt_ptr[:ns + 1].copy(), opt_move[:no].copy(), \
        succ_ptr[:no + 1].copy(), succ_idx[:ne].copy()


@jit
def explore_dpw_general(succ, n, cop_sets, full):
    """States ``U << 32 | R``; any cop set may be announced."""
    index = new_map()
    states = np.empty(64, np.int64)
    states[0] = full
    index[full] = 0
    ns = 1
    opt_ptr = np.zeros(64, np.int64)
    opt_move = np.empty(64, np.int64)
    succ_ptr = np.zeros(64, np.int64)
    succ_idx = np.empty(64, np.int64)
    no = 0
    ne = 0
    low32 = (full & 0) | 0xFFFFFFFF
    head = 0
    while head < ns:
        key = states[head]
        u = key >> 32
        rset = key & low32
        for ci in range(cop_sets.shape[0]):
            u2 = cop_sets[ci]
            r2 = reach(succ, rset, u & u2) & ~u2
            opt_move = push(opt_move, no, u2)
            if r2 != 0:
                key2 = (u2 << 32) | r2
                if key2 not in index:
                    index[key2] = ns
                    states = push(states, ns, key2)
                    ns += 1
                succ_idx = push(succ_idx, ne, index[key2])
                ne += 1
            no += 1
            succ_ptr = push(succ_ptr, no, ne)
        head += 1
        opt_ptr = push(opt_ptr, head, no)
    return states[:ns].copy(), opt_ptr[:ns + 1].copy(), opt_move[:no].copy(), \
        succ_ptr[:no + 1].copy(), succ_idx[:ne].copy()


# -- backward induction ----------------------------------------------------------

@jit
def solve_andor(opt_ptr, succ_ptr, succ_idx):
    """Cop player picks an option, the robber any successor of it.

    Returns (won, choice, rank): ``choice[s]`` is the first option of ``s`` all
    of whose successors were won earlier, so following choices strictly
    decreases ``rank`` and ends in capture.
    """
    ns = opt_ptr.shape[0] - 1
    no = succ_ptr.shape[0] - 1
    owner = np.empty(no, np.int64)
    count = np.empty(no, np.int64)
    for s in range(ns):
        for o in range(opt_ptr[s], opt_ptr[s + 1]):
            owner[o] = s
    for o in range(no):
        count[o] = succ_ptr[o + 1] - succ_ptr[o]
    rev_ptr = np.zeros(ns + 1, np.int64)
    for e in range(succ_idx.shape[0]):
        rev_ptr[succ_idx[e] + 1] += 1
    for s in range(ns):
        rev_ptr[s + 1] += rev_ptr[s]
    fill = rev_ptr[:ns].copy()
    rev = np.empty(succ_idx.shape[0], np.int64)
    for o in range(no):
        for e in range(succ_ptr[o], succ_ptr[o + 1]):
            t = succ_idx[e]
            rev[fill[t]] = o
            fill[t] += 1
    won = np.zeros(ns, np.bool_)
    choice = np.full(ns, -1, np.int64)
    rank = np.full(ns, -1, np.int64)
    queue = np.empty(ns, np.int64)
    qt = 0
    for o in range(no):
        if count[o] == 0:
            s = owner[o]
            if not won[s]:
                won[s] = True
                choice[s] = o
                rank[s] = 0
                queue[qt] = s
                qt += 1
    qh = 0
    while qh < qt:
        s = queue[qh]
        qh += 1
        for i in range(rev_ptr[s], rev_ptr[s + 1]):
            o = rev[i]
            count[o] -= 1
            if count[o] == 0:
                t = owner[o]
                if not won[t]:
                    won[t] = True
                    choice[t] = o
                    rank[t] = rank[s] + 1
                    queue[qt] = t
                    qt += 1
    return won, choice, rank
