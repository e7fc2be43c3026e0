"""Compiled array kernels shared by the encoding, sampling and map code.

All kernels take dense int64 arrays over forest vertices 0..n-1 in
lexicographic (depth-first, left-to-right) order. Parent ``-1`` marks a
tree root; the extra root above the trees is never stored.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def forest_structure(k):
    """Parent, sibling rank (1-based), tree index, height and last child per vertex.

    Tree roots get the rank of their tree among the roots. ``k`` must be a
    valid forest word; callers validate it before.
    """
    n = k.shape[0]
    parent = np.full(n, -1, np.int64)
    rank = np.zeros(n, np.int64)
    tree = np.zeros(n, np.int64)
    height = np.zeros(n, np.int64)
    last = np.full(n, -1, np.int64)
    used = np.zeros(n, np.int64)
    stack = np.empty(n, np.int64)
    top = -1
    t = -1
    for v in range(n):
        if top < 0:
            t += 1
            rank[v] = t + 1
        else:
            p = stack[top]
            parent[v] = p
            used[p] += 1
            rank[v] = used[p]
            height[v] = height[p] + 1
            if used[p] == k[p]:
                last[p] = v
                top -= 1
        tree[v] = t
        if k[v] > 0:
            top += 1
            stack[top] = v
    return parent, rank, tree, height, last


@njit(cache=True)
def rightmost_leaf(k, last):
    """Leaf reached from each vertex by repeatedly moving to the last child."""
    n = k.shape[0]
    phi = np.empty(n, np.int64)
    for v in range(n - 1, -1, -1):
        if k[v] == 0:
            phi[v] = v
        else:
            phi[v] = phi[last[v]]
    return phi


@njit(cache=True)
def bridge_from_uniforms(k, u, out, start):
    """Write a uniform increment bridge for k children into out[start:start+k].

    Stars and bars: k-1 bars are placed among 2k-1 slots by sequential
    selection, using u[0:2k-1]; the k gaps g_i give increments g_i - 1.
    """
    bars_left = k - 1
    cur = 0
    part = 0
    idx = 0
    slots = 2 * k - 1
    for s in range(slots):
        rem = slots - s
        if u[s] * rem < bars_left:
            cur += part - 1
            out[start + idx] = cur
            idx += 1
            part = 0
            bars_left -= 1
        else:
            part += 1
    cur += part - 1
    out[start + idx] = cur


@njit(cache=True)
def labels_from_uniforms(k, parent, rank, u):
    """Vertex labels from uniform variates; ``u`` holds 2k-1 draws per internal vertex
    (lexicographic order) after the 2*rho-1 draws for the bridge of tree roots."""
    n = k.shape[0]
    rho = 0
    for v in range(n):
        if parent[v] < 0:
            rho += 1
    inc = np.empty(n, np.int64)  # increment bridge values, one slot per child
    root_bridge = np.empty(rho, np.int64)
    bridge_from_uniforms(rho, u[0:2 * rho - 1], root_bridge, 0)
    pos = 2 * rho - 1
    off = np.zeros(n, np.int64)
    nxt = 0
    for v in range(n):
        if k[v] > 0:
            off[v] = nxt
            bridge_from_uniforms(k[v], u[pos:pos + 2 * k[v] - 1], inc, nxt)
            nxt += k[v]
            pos += 2 * k[v] - 1
    labels = np.empty(n, np.int64)
    for v in range(n):
        p = parent[v]
        if p < 0:
            labels[v] = root_bridge[rank[v] - 1]
        else:
            labels[v] = labels[p] + inc[off[p] + rank[v] - 1]
    return labels


@njit(cache=True)
def chain_successor(k, parent, rank):
    """For each vertex z, the next white-corner half-edge owner around phi(z), or -1.

    Moving up from a leaf, the mobile edges incident to that leaf are those of
    the leaf itself and of every ancestor reached through last-child steps.
    """
    n = k.shape[0]
    up = np.full(n, -1, np.int64)
    for z in range(n):
        p = parent[z]
        if p >= 0 and rank[z] == k[p]:
            up[z] = p
    return up


@njit(cache=True)
def close_mobile(k, parent, rank, phi, labels):
    """Build the pointed bipartite map of a labelled forest by corner closure.

    Returns (twin, nxt, origin, root, star, leaf_of_vertex). Half-edges 2t and
    2t+1 are the outgoing and incoming ends of the arc leaving white corner t
    of the clockwise contour. Raises (returns root=-1) if a corner finds no
    successor, which can only come from an orientation error.
    """
    n = k.shape[0]
    up = chain_successor(k, parent, rank)
    # children in CSR layout; the extra root (index n) owns the tree roots
    cstart = np.zeros(n + 2, np.int64)
    for v in range(n):
        cstart[v + 1] = cstart[v] + k[v]
    rho = 0
    for v in range(n):
        if parent[v] < 0:
            rho += 1
    cstart[n + 1] = cstart[n] + rho
    clist = np.empty(cstart[n + 1], np.int64)
    for v in range(n):
        p = parent[v]
        if p < 0:
            clist[cstart[n] + rank[v] - 1] = v
        else:
            clist[cstart[p] + rank[v] - 1] = v
    # mobile rotation: half-edge 2v at the black end of edge v, 2v+1 at its white end
    sig = np.empty(2 * n, np.int64)
    for x in range(n + 1):
        a, b = cstart[x], cstart[x + 1]
        deg = b - a
        if deg == 0:
            continue
        for i in range(deg):
            c = clist[a + i]
            prv = clist[a + (i - 1) % deg]
            sig[2 * c] = 2 * prv
    for y in range(n):
        if k[y] != 0:
            continue
        z = y
        while True:
            w = up[z]
            if w < 0:
                sig[2 * z + 1] = 2 * y + 1
                break
            sig[2 * z + 1] = 2 * w + 1
            z = w
    # walk the single face of the mobile, collecting white corners
    corners = np.empty(n, np.int64)
    nc = 0
    h = 0
    for _ in range(2 * n):
        a = h ^ 1
        if a & 1:
            corners[nc] = a
            nc += 1
        h = sig[a]
    corners = corners[::-1].copy()
    lab = np.empty(n, np.int64)
    for t in range(n):
        lab[t] = labels[phi[corners[t] >> 1]]
    m = lab.min()
    first_min = 0
    for t in range(n):
        if lab[t] == m:
            first_min = t
            break
    order = np.empty(n, np.int64)
    for t in range(n):
        order[t] = corners[(first_min + 1 + t) % n]
    corners = order
    pos = np.empty(2 * n, np.int64)
    for t in range(n):
        lab[t] = labels[phi[corners[t] >> 1]]
        pos[corners[t]] = t
    span = lab.max() - m + 1
    next_pos = np.full(span + 1, -1, np.int64)
    succ = np.empty(n, np.int64)
    for t in range(n - 1, -1, -1):
        l = lab[t] - m
        if l == 0:
            succ[t] = -1
        else:
            s = next_pos[l - 1]
            if s < 0:
                return (np.empty(0, np.int64), np.empty(0, np.int64),
                        np.empty(0, np.int64), -1, -1, np.empty(0, np.int64))
            succ[t] = s
        next_pos[l] = t
    # map vertices: leaves in lexicographic order, then the pointed vertex
    vid = np.full(n, -1, np.int64)
    nleaf = 0
    for v in range(n):
        if k[v] == 0:
            vid[v] = nleaf
            nleaf += 1
    leaf_of_vertex = np.empty(nleaf, np.int64)
    for v in range(n):
        if k[v] == 0:
            leaf_of_vertex[vid[v]] = v
    star = nleaf
    twin = np.empty(2 * n, np.int64)
    origin = np.empty(2 * n, np.int64)
    for t in range(n):
        twin[2 * t] = 2 * t + 1
        twin[2 * t + 1] = 2 * t
        origin[2 * t] = vid[phi[corners[t] >> 1]]
        s = succ[t]
        origin[2 * t + 1] = star if s < 0 else vid[phi[corners[s] >> 1]]
    # incoming arcs per corner, ascending source position
    icount = np.zeros(n + 1, np.int64)
    nstar = 0
    for t in range(n):
        if succ[t] >= 0:
            icount[succ[t] + 1] += 1
        else:
            nstar += 1
    for t in range(n):
        icount[t + 1] += icount[t]
    ilist = np.empty(icount[n], np.int64)
    fill = icount[:n].copy()
    starlist = np.empty(nstar, np.int64)
    ns = 0
    for t in range(n):
        s = succ[t]
        if s >= 0:
            ilist[fill[s]] = 2 * t + 1
            fill[s] += 1
        else:
            starlist[ns] = 2 * t + 1
            ns += 1
    nxt = np.empty(2 * n, np.int64)
    for y in range(n):
        if k[y] != 0:
            continue
        # corners around leaf y in counterclockwise order: chain y, up(y), ...
        first_h = -1
        prev_h = -1
        z = y
        while z >= 0:
            t = pos[2 * z + 1]
            block_first = 2 * t
            if prev_h >= 0:
                nxt[prev_h] = block_first
            else:
                first_h = block_first
            prev_h = block_first
            for j in range(icount[t], icount[t + 1]):
                nxt[prev_h] = ilist[j]
                prev_h = ilist[j]
            z = up[z]
        nxt[prev_h] = first_h
    for j in range(nstar):
        nxt[starlist[j]] = starlist[(j + 1) % nstar]
    last_root = clist[cstart[n] + rho - 1]
    root = 2 * pos[2 * last_root + 1]
    return twin, nxt, origin, root, star, leaf_of_vertex


@njit(cache=True)
def face_orbits(twin, nxt):
    """Face id per half-edge: orbits of h -> nxt[twin[h]]."""
    m = twin.shape[0]
    face = np.full(m, -1, np.int64)
    nf = 0
    for h0 in range(m):
        if face[h0] >= 0:
            continue
        h = h0
        while face[h] < 0:
            face[h] = nf
            h = nxt[twin[h]]
        nf += 1
    return face, nf


@njit(cache=True)
def first_child_event(k, parent, rank, height, two_v, two_v_minus_leaves, max_gap):
    """True iff no branch of more than ``max_gap`` edges has a first-child share above c.

    With c = (2v - d0) / (2v), G(v) = 2v*F(v) - (2v - d0)*|v| where F counts the
    first children on the path from the tree root. A branch from x down to y
    violates the event exactly when G(y) > G(x) and |y| - |x| > max_gap.
    """
    n = k.shape[0]
    hmax = 0
    for v in range(n):
        if height[v] > hmax:
            hmax = height[v]
    g_at = np.zeros(hmax + 1, np.int64)
    run_min = np.zeros(hmax + 1, np.int64)
    fcount = np.zeros(n, np.int64)
    for v in range(n):
        p = parent[v]
        h = height[v]
        if p < 0:
            fcount[v] = 0
        else:
            fcount[v] = fcount[p] + (1 if rank[v] == 1 else 0)
        g = two_v * fcount[v] - two_v_minus_leaves * h
        g_at[h] = g
        run_min[h] = g if h == 0 else min(run_min[h - 1], g)
        # deepest admissible ancestor depth D with h - D > max_gap
        d = h - max_gap
        di = int(np.ceil(d)) - 1
        if di >= 0 and g > run_min[di]:
            return False
    return True


@njit(cache=True)
def dl_batch(L, pre_min, suf_min, ii, jj):
    """D_L(i, j) for index pairs on an integer-time path (i <= j)."""
    out = np.empty(ii.shape[0], np.int64)
    for q in range(ii.shape[0]):
        i, j = ii[q], jj[q]
        inner = L[i]
        for r in range(i, j + 1):
            if L[r] < inner:
                inner = L[r]
        outer = min(pre_min[i], suf_min[j])
        out[q] = L[i] + L[j] - 2 * max(inner, outer)
    return out
