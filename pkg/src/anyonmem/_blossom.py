"""Exact minimum-weight perfect matching on general graphs.

Array-based port of the Galil / van Rantwijk primal-dual blossom algorithm
(O(n^3)), compiled with numba so that syndromes with >10^3 anyons decode in
milliseconds. Semantics follow the classic formulation: a "stage" grows
alternating trees from unmatched vertices until an augmenting path is found;
"substages" adjust dual variables, shrink odd cycles into blossoms and
expand exhausted ones.

Integer weights only. All internal weights are pre-multiplied by two so
that every dual quantity stays integral; the result is exact, with no
floating-point comparisons anywhere.

Vertices are ids 0..n-1 and double as trivial blossoms; nontrivial blossoms
use ids n..2n-1. An edge k between eu[k] and ev[k] is handled through its
two half-edges 2k (eu -> ev) and 2k+1 (ev -> eu); for a half-edge h,
``h ^ 1`` is the reverse and ``h >> 1`` the edge id.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_I32 = np.int32
_I64 = np.int64

_FREE = 0
_S = 1
_T = 2
_BREADCRUMB = 4


class MatchingInfeasibleError(ValueError):
    """The graph admits no perfect matching."""


@njit(cache=True, inline="always")
def _edge_slack(k, eu, ev, wt, dualvar):
    return dualvar[eu[k]] + dualvar[ev[k]] - 2 * wt[k]


@njit(cache=True)
def _leaves_of(b, nv, cstart, clen, cbuf, stack, out):
    """Collect leaf vertices of blossom b into out; returns the count."""
    if b < nv:
        out[0] = b
        return 1
    ns = 0
    cnt = 0
    stack[ns] = b
    ns += 1
    while ns > 0:
        ns -= 1
        t = stack[ns]
        if t < nv:
            out[cnt] = t
            cnt += 1
        else:
            s0 = cstart[t]
            for i in range(clen[t]):
                stack[ns] = cbuf[s0 + i]
                ns += 1
    return cnt


@njit(cache=True)
def _compact_ring(nv, cptr, cstart, clen, cbuf, ebuf):
    """Slide live child/edge segments left; returns the new bump pointer."""
    nb = 0
    order = np.empty(nv, dtype=_I32)
    for b in range(nv, 2 * nv):
        if clen[b] > 0:
            order[nb] = b
            nb += 1
    # insertion sort by segment start (nb is small)
    for i in range(1, nb):
        key = order[i]
        j = i - 1
        while j >= 0 and cstart[order[j]] > cstart[key]:
            order[j + 1] = order[j]
            j -= 1
        order[j + 1] = key
    ptr = 0
    for idx in range(nb):
        b = order[idx]
        s0 = cstart[b]
        ln = clen[b]
        if s0 != ptr:
            for i in range(ln):
                cbuf[ptr + i] = cbuf[s0 + i]
                ebuf[ptr + i] = ebuf[s0 + i]
            cstart[b] = ptr
        ptr += ln
    return ptr


@njit(cache=True)
def _compact_best(nv, bptr, bstart, blen, bbuf):
    nb = 0
    order = np.empty(2 * nv, dtype=_I32)
    for b in range(2 * nv):
        if blen[b] > 0:
            order[nb] = b
            nb += 1
    for i in range(1, nb):
        key = order[i]
        j = i - 1
        while j >= 0 and bstart[order[j]] > bstart[key]:
            order[j + 1] = order[j]
            j -= 1
        order[j + 1] = key
    ptr = 0
    for idx in range(nb):
        b = order[idx]
        s0 = bstart[b]
        ln = blen[b]
        if s0 != ptr:
            for i in range(ln):
                bbuf[ptr + i] = bbuf[s0 + i]
            bstart[b] = ptr
        ptr += ln
    return ptr


@njit(cache=True)
def _assign_label(w, t, h, nv, src, dst, mate_he, label, le, inblossom,
                  base, bestedge, cstart, clen, cbuf, lstack, lbuf,
                  queue, qn):
    """Label the top-level blossom of w; returns the new queue length."""
    while True:
        b = inblossom[w]
        label[w] = t
        label[b] = t
        le[w] = h
        le[b] = h
        bestedge[w] = -1
        bestedge[b] = -1
        if t == _S:
            cnt = _leaves_of(b, nv, cstart, clen, cbuf, lstack, lbuf)
            if qn + cnt > queue.shape[0]:
                raise RuntimeError("scan queue overflow")
            for i in range(cnt):
                queue[qn] = lbuf[i]
                qn += 1
            return qn
        # t == T: the base's mate becomes an S-vertex
        bv = base[b]
        h = mate_he[bv]
        w = dst[h]
        t = _S
    return qn


@njit(cache=True)
def _scan_blossom(v, w, mate_he, label, le, inblossom, base, src):
    """Trace back from v and w; return a new blossom's base vertex or -1."""
    path = np.empty(2048, dtype=_I32)
    np_ = 0
    found = -1
    while v >= 0:
        b = inblossom[v]
        if label[b] & _BREADCRUMB:
            found = base[b]
            break
        if np_ >= path.shape[0]:
            tmp = np.empty(2 * path.shape[0], dtype=_I32)
            tmp[:np_] = path[:np_]
            path = tmp
        path[np_] = b
        np_ += 1
        label[b] = _S | _BREADCRUMB
        if le[b] == -1:
            v = -1
        else:
            v = src[le[b]]
            b = inblossom[v]
            v = src[le[b]]
        if w >= 0:
            tmp2 = v
            v = w
            w = tmp2
    for i in range(np_):
        label[path[i]] = _S
    return found


@njit(cache=True)
def _augment_blossom(b_in, v_in, nv, src, dst, mate_he, parent, base,
                     cstart, clen, cbuf, ebuf, tstack):
    """Swap matched edges inside blossom b so that v becomes its base."""
    tn = 0
    tstack[tn, 0] = b_in
    tstack[tn, 1] = v_in
    tn += 1
    while tn > 0:
        tn -= 1
        b = tstack[tn, 0]
        v = tstack[tn, 1]
        # bubble up to the immediate child of b containing v
        t = v
        while parent[t] != b:
            t = parent[t]
        if t >= nv:
            tstack[tn, 0] = t
            tstack[tn, 1] = v
            tn += 1
        ln = clen[b]
        s0 = cstart[b]
        i = -1
        for idx in range(ln):
            if cbuf[s0 + idx] == t:
                i = idx
                break
        j = i
        if i & 1:
            j -= ln
            jstep = 1
        else:
            jstep = -1
        while j != 0:
            j += jstep
            if jstep == 1:
                h = ebuf[s0 + (j % ln)]
                wv = src[h]
                xv = dst[h]
            else:
                h = ebuf[s0 + ((j - 1) % ln)]
                xv = src[h]
                wv = dst[h]
            t2 = cbuf[s0 + (j % ln)]
            if t2 >= nv:
                tstack[tn, 0] = t2
                tstack[tn, 1] = wv
                tn += 1
            j += jstep
            t3 = cbuf[s0 + (j % ln)]
            if t3 >= nv:
                tstack[tn, 0] = t3
                tstack[tn, 1] = xv
                tn += 1
            if jstep == 1:
                mate_he[wv] = h
                mate_he[xv] = h ^ 1
            else:
                mate_he[wv] = h ^ 1
                mate_he[xv] = h
        # rotate childs/edges so the child containing v comes first
        if i > 0:
            tmpc = np.empty(ln, dtype=_I32)
            tmpe = np.empty(ln, dtype=_I32)
            for idx in range(ln):
                tmpc[idx] = cbuf[s0 + (i + idx) % ln]
                tmpe[idx] = ebuf[s0 + (i + idx) % ln]
            for idx in range(ln):
                cbuf[s0 + idx] = tmpc[idx]
                ebuf[s0 + idx] = tmpe[idx]
        # the deferred child task for childs[0] will align its own base to v,
        # so the new base of b is v regardless of task processing order
        base[b] = v


@njit(cache=True)
def _augment_matching(h0, nv, src, dst, mate_he, parent, base, label, le,
                      inblossom, cstart, clen, cbuf, ebuf, tstack):
    """Flip matched/unmatched edges along the augmenting path through h0."""
    for side in range(2):
        if side == 0:
            s = src[h0]
            cur_h = h0
        else:
            s = dst[h0]
            cur_h = h0 ^ 1
        while True:
            bs = inblossom[s]
            if bs >= nv:
                _augment_blossom(bs, s, nv, src, dst, mate_he, parent, base,
                                 cstart, clen, cbuf, ebuf, tstack)
            mate_he[s] = cur_h
            if le[bs] == -1:
                break
            t = src[le[bs]]
            bt = inblossom[t]
            h_bt = le[bt]
            s_next = src[h_bt]
            j = dst[h_bt]
            if bt >= nv:
                _augment_blossom(bt, j, nv, src, dst, mate_he, parent, base,
                                 cstart, clen, cbuf, ebuf, tstack)
            mate_he[j] = h_bt ^ 1
            s = s_next
            cur_h = h_bt


@njit(cache=True)
def _mwpm_core(nv, eu, ev, wt, adj_off, adj_he, src, dst):  # noqa: C901
    """Maximum-cardinality maximum-weight matching; returns mate half-edges."""
    m = eu.shape[0]
    nb = 2 * nv

    maxweight = _I64(0)
    for k in range(m):
        if wt[k] > maxweight:
            maxweight = wt[k]

    mate_he = np.full(nv, -1, dtype=_I32)
    # warm start: with uniform duals = maxweight, exactly the maximum-weight
    # edges are tight, so greedily matching a disjoint subset of them keeps
    # every primal-dual invariant intact while skipping that many stages
    for k in range(m):
        if wt[k] == maxweight and mate_he[eu[k]] == -1 \
                and mate_he[ev[k]] == -1:
            mate_he[eu[k]] = 2 * k
            mate_he[ev[k]] = 2 * k + 1
    label = np.zeros(nb, dtype=np.uint8)
    le = np.full(nb, -1, dtype=_I32)
    inblossom = np.arange(nv, dtype=_I32)
    parent = np.full(nb, -1, dtype=_I32)
    base = np.full(nb, -1, dtype=_I32)
    for v in range(nv):
        base[v] = v
    dualvar = np.full(nv, maxweight, dtype=_I64)
    blossomdual = np.zeros(nb, dtype=_I64)
    bestedge = np.full(nb, -1, dtype=_I32)
    allowedge = np.zeros(m, dtype=np.uint8)

    # ring buffers: children and connecting half-edges of nontrivial blossoms
    ccap = 16 * nv + 64
    cbuf = np.zeros(ccap, dtype=_I32)
    ebuf = np.zeros(ccap, dtype=_I32)
    cstart = np.zeros(nb, dtype=_I32)
    clen = np.zeros(nb, dtype=_I32)
    cptr = 0

    # least-slack edge lists toward other S-blossoms (-1 length = unset)
    bcap = 4 * m + 2 * nv + 64
    bbuf = np.zeros(bcap, dtype=_I32)
    bstart = np.zeros(nb, dtype=_I32)
    blen = np.full(nb, -1, dtype=_I32)
    bptr = 0

    unused = np.empty(nv, dtype=_I32)
    for i in range(nv):
        unused[i] = nb - 1 - i  # pop() yields nv, nv+1, ...
    nunused = nv

    queue = np.empty(8 * nv + 4 * m + 1024, dtype=_I32)
    qn = 0
    lstack = np.empty(nb, dtype=_I32)
    lbuf = np.empty(nv, dtype=_I32)
    tstack = np.empty((2 * nv + 8, 2), dtype=_I32)
    best_to = np.full(nb, -1, dtype=_I32)
    touched = np.empty(nb, dtype=_I32)

    while True:  # stages
        label[:] = _FREE
        le[:] = -1
        bestedge[:] = -1
        blen[:] = -1
        bptr = 0
        allowedge[:] = 0
        qn = 0

        for v in range(nv):
            if mate_he[v] == -1 and label[inblossom[v]] == _FREE:
                qn = _assign_label(v, _S, -1, nv, src, dst, mate_he, label,
                                   le, inblossom, base, bestedge, cstart,
                                   clen, cbuf, lstack, lbuf, queue, qn)

        augmented = False
        while True:  # substages
            while qn > 0 and not augmented:
                qn -= 1
                v = queue[qn]
                for hi in range(adj_off[v], adj_off[v + 1]):
                    h = adj_he[hi]
                    w = dst[h]
                    k = h >> 1
                    bv = inblossom[v]
                    bw = inblossom[w]
                    if bv == bw:
                        continue
                    kslack = _I64(0)
                    if allowedge[k] == 0:
                        kslack = _edge_slack(k, eu, ev, wt, dualvar)
                        if kslack <= 0:
                            allowedge[k] = 1
                    if allowedge[k] == 1:
                        if label[bw] == _FREE:
                            qn = _assign_label(w, _T, h, nv, src, dst,
                                               mate_he, label, le, inblossom,
                                               base, bestedge, cstart, clen,
                                               cbuf, lstack, lbuf, queue, qn)
                        elif label[bw] == _S:
                            base_v = _scan_blossom(v, w, mate_he, label, le,
                                                   inblossom, base, src)
                            if base_v >= 0:
                                # --- addBlossom(base_v, h) ---
                                bb = inblossom[base_v]
                                b = unused[nunused - 1]
                                nunused -= 1
                                base[b] = base_v
                                parent[b] = -1
                                parent[bb] = b

                                # collect ring: trace v side, then w side
                                path1 = np.empty(nv, dtype=_I32)
                                edgs1 = np.empty(nv, dtype=_I32)
                                n1 = 0
                                vv = v
                                bv2 = inblossom[vv]
                                while bv2 != bb:
                                    parent[bv2] = b
                                    path1[n1] = bv2
                                    edgs1[n1] = le[bv2]
                                    n1 += 1
                                    vv = src[le[bv2]]
                                    bv2 = inblossom[vv]
                                path2 = np.empty(nv, dtype=_I32)
                                edgs2 = np.empty(nv, dtype=_I32)
                                n2 = 0
                                ww = w
                                bw2 = inblossom[ww]
                                while bw2 != bb:
                                    parent[bw2] = b
                                    path2[n2] = bw2
                                    edgs2[n2] = le[bw2] ^ 1
                                    n2 += 1
                                    ww = src[le[bw2]]
                                    bw2 = inblossom[ww]

                                ln = 1 + n1 + n2
                                if cptr + ln > ccap:
                                    cptr = _compact_ring(nv, cptr, cstart,
                                                         clen, cbuf, ebuf)
                                    if cptr + ln > ccap:
                                        raise RuntimeError(
                                            "blossom ring buffer overflow")
                                s0 = cptr
                                cptr += ln
                                cstart[b] = s0
                                clen[b] = ln
                                # childs = [bb, reversed(path1), path2]
                                # edges[i] joins childs[i] -> childs[i+1]
                                cbuf[s0] = bb
                                for i in range(n1):
                                    cbuf[s0 + 1 + i] = path1[n1 - 1 - i]
                                    ebuf[s0 + i] = edgs1[n1 - 1 - i]
                                ebuf[s0 + n1] = h
                                for i in range(n2):
                                    cbuf[s0 + 1 + n1 + i] = path2[i]
                                    ebuf[s0 + n1 + 1 + i] = edgs2[i]

                                label[b] = _S
                                le[b] = le[bb]
                                blossomdual[b] = 0

                                # relabel leaves; former T-vertices join queue
                                for ci in range(ln):
                                    child = cbuf[s0 + ci]
                                    was_t = label[child] == _T
                                    cnt = _leaves_of(child, nv, cstart, clen,
                                                     cbuf, lstack, lbuf)
                                    if was_t and qn + cnt > queue.shape[0]:
                                        raise RuntimeError(
                                            "scan queue overflow")
                                    for li in range(cnt):
                                        leaf = lbuf[li]
                                        if was_t:
                                            queue[qn] = leaf
                                            qn += 1
                                        inblossom[leaf] = b

                                # merge least-slack edge lists of children
                                ntouch = 0
                                for ci in range(ln):
                                    child = cbuf[s0 + ci]
                                    if child >= nv and blen[child] >= 0:
                                        cs = bstart[child]
                                        cl = blen[child]
                                        for xi in range(cl):
                                            hh = bbuf[cs + xi]
                                            if inblossom[dst[hh]] == b:
                                                hh = hh ^ 1
                                            bj = inblossom[dst[hh]]
                                            if bj != b and label[bj] == _S:
                                                kk = hh >> 1
                                                cur = best_to[bj]
                                                if cur == -1 or _edge_slack(
                                                        kk, eu, ev, wt,
                                                        dualvar) < _edge_slack(
                                                        cur >> 1, eu, ev, wt,
                                                        dualvar):
                                                    if cur == -1:
                                                        touched[ntouch] = bj
                                                        ntouch += 1
                                                    best_to[bj] = hh
                                        blen[child] = -1
                                    else:
                                        cnt = _leaves_of(child, nv, cstart,
                                                         clen, cbuf, lstack,
                                                         lbuf)
                                        for li in range(cnt):
                                            leaf = lbuf[li]
                                            for hj in range(adj_off[leaf],
                                                            adj_off[leaf + 1]):
                                                hh = adj_he[hj]
                                                if inblossom[dst[hh]] == b:
                                                    continue
                                                bj = inblossom[dst[hh]]
                                                if bj != b and label[bj] == _S:
                                                    kk = hh >> 1
                                                    cur = best_to[bj]
                                                    if cur == -1 or \
                                                            _edge_slack(
                                                                kk, eu, ev,
                                                                wt, dualvar
                                                            ) < _edge_slack(
                                                                cur >> 1, eu,
                                                                ev, wt,
                                                                dualvar):
                                                        if cur == -1:
                                                            touched[ntouch] = bj
                                                            ntouch += 1
                                                        best_to[bj] = hh
                                    bestedge[child] = -1

                                if bptr + ntouch > bcap:
                                    bptr = _compact_best(nv, bptr, bstart,
                                                         blen, bbuf)
                                    if bptr + ntouch > bcap:
                                        raise RuntimeError(
                                            "best-edge buffer overflow")
                                bstart[b] = bptr
                                blen[b] = ntouch
                                best_h = -1
                                best_s = _I64(0)
                                for xi in range(ntouch):
                                    bj = touched[xi]
                                    hh = best_to[bj]
                                    bbuf[bptr + xi] = hh
                                    best_to[bj] = -1
                                    sl = _edge_slack(hh >> 1, eu, ev, wt,
                                                     dualvar)
                                    if best_h == -1 or sl < best_s:
                                        best_h = hh
                                        best_s = sl
                                bptr += ntouch
                                bestedge[b] = best_h
                                # --- end addBlossom ---
                            else:
                                _augment_matching(h, nv, src, dst, mate_he,
                                                  parent, base, label, le,
                                                  inblossom, cstart, clen,
                                                  cbuf, ebuf, tstack)
                                augmented = True
                                break
                        elif label[w] == _FREE:
                            label[w] = _T
                            le[w] = h
                    elif label[bw] == _S:
                        if bestedge[bv] == -1 or kslack < _edge_slack(
                                bestedge[bv] >> 1, eu, ev, wt, dualvar):
                            bestedge[bv] = h
                    elif label[w] == _FREE:
                        if bestedge[w] == -1 or kslack < _edge_slack(
                                bestedge[w] >> 1, eu, ev, wt, dualvar):
                            bestedge[w] = h

            if augmented:
                break

            # dual adjustment (maximum-cardinality mode: delta1 unused)
            deltatype = -1
            delta = _I64(0)
            delta_h = -1
            delta_b = -1

            for v in range(nv):
                if label[inblossom[v]] == _FREE and bestedge[v] != -1:
                    d = _edge_slack(bestedge[v] >> 1, eu, ev, wt, dualvar)
                    if deltatype == -1 or d < delta:
                        delta = d
                        deltatype = 2
                        delta_h = bestedge[v]
            for b in range(nb):
                if parent[b] == -1 and label[b] == _S and bestedge[b] != -1:
                    if b >= nv and clen[b] == 0:
                        continue
                    ks = _edge_slack(bestedge[b] >> 1, eu, ev, wt, dualvar)
                    d = ks // 2
                    if deltatype == -1 or d < delta:
                        delta = d
                        deltatype = 3
                        delta_h = bestedge[b]
            for b in range(nv, nb):
                if clen[b] > 0 and parent[b] == -1 and label[b] == _T:
                    if deltatype == -1 or blossomdual[b] < delta:
                        delta = blossomdual[b]
                        deltatype = 4
                        delta_b = b

            if deltatype == -1:
                # no further improvement: maximum cardinality reached
                deltatype = 1
                mn = dualvar[0]
                for v in range(1, nv):
                    if dualvar[v] < mn:
                        mn = dualvar[v]
                delta = mn if mn > 0 else _I64(0)

            for v in range(nv):
                lb = label[inblossom[v]]
                if lb == _S:
                    dualvar[v] -= delta
                elif lb == _T:
                    dualvar[v] += delta
            for b in range(nv, nb):
                if clen[b] > 0 and parent[b] == -1:
                    if label[b] == _S:
                        blossomdual[b] += delta
                    elif label[b] == _T:
                        blossomdual[b] -= delta

            if deltatype == 1:
                break
            elif deltatype == 2 or deltatype == 3:
                allowedge[delta_h >> 1] = 1
                queue[qn] = src[delta_h]
                qn += 1
            elif deltatype == 4:
                qn, nunused = _expand_blossom(
                    delta_b, False, nv, src, dst, mate_he, parent, base,
                    label, le, inblossom, bestedge, blossomdual, allowedge,
                    cstart, clen, cbuf, ebuf, blen, lstack, lbuf, queue, qn,
                    unused, nunused)

        if not augmented:
            break

        # end of stage: expand S-blossoms whose dual dropped to zero
        for b in range(nv, nb):
            if clen[b] > 0 and parent[b] == -1 and label[b] == _S \
                    and blossomdual[b] == 0:
                qn, nunused = _expand_blossom(
                    b, True, nv, src, dst, mate_he, parent, base, label, le,
                    inblossom, bestedge, blossomdual, allowedge, cstart,
                    clen, cbuf, ebuf, blen, lstack, lbuf, queue, qn, unused,
                    nunused)

    return mate_he


@njit(cache=True)
def _expand_blossom(b_in, endstage, nv, src, dst, mate_he, parent, base,
                    label, le, inblossom, bestedge, blossomdual, allowedge,
                    cstart, clen, cbuf, ebuf, blen, lstack, lbuf, queue, qn,
                    unused, nunused):
    """Dissolve blossom b (recursively for zero-dual children at stage end)."""
    work = np.empty(nv + 8, dtype=_I32)
    nw = 0
    work[nw] = b_in
    nw += 1
    while nw > 0:
        nw -= 1
        b = work[nw]
        s0 = cstart[b]
        ln = clen[b]
        for ci in range(ln):
            s = cbuf[s0 + ci]
            parent[s] = -1
            if s < nv:
                inblossom[s] = s
            elif endstage and blossomdual[s] == 0:
                work[nw] = s
                nw += 1
            else:
                cnt = _leaves_of(s, nv, cstart, clen, cbuf, lstack, lbuf)
                for li in range(cnt):
                    inblossom[lbuf[li]] = s

        if (not endstage) and label[b] == _T:
            # relabel the even-length path around the former blossom
            entry_v = dst[le[b]]
            entrychild = inblossom[entry_v]
            j = -1
            for ci in range(ln):
                if cbuf[s0 + ci] == entrychild:
                    j = ci
                    break
            jstep = 1 if (j & 1) else -1
            if j & 1:
                j -= ln
            cur_h = le[b]
            vv = src[cur_h]
            wv = dst[cur_h]
            while j != 0:
                if jstep == 1:
                    h_pq = ebuf[s0 + (j % ln)]
                    qv = dst[h_pq]
                else:
                    h_pq = ebuf[s0 + ((j - 1) % ln)]
                    qv = src[h_pq]
                label[wv] = _FREE
                label[qv] = _FREE
                qn = _assign_label(wv, _T, cur_h, nv, src, dst, mate_he,
                                   label, le, inblossom, base, bestedge,
                                   cstart, clen, cbuf, lstack, lbuf, queue,
                                   qn)
                allowedge[h_pq >> 1] = 1
                j += jstep
                if jstep == 1:
                    h_vw = ebuf[s0 + (j % ln)]
                    vv = src[h_vw]
                    wv = dst[h_vw]
                    cur_h = h_vw
                else:
                    h_vw = ebuf[s0 + ((j - 1) % ln)]
                    wv = src[h_vw]
                    vv = dst[h_vw]
                    cur_h = h_vw ^ 1
                allowedge[h_vw >> 1] = 1
                j += jstep
            bw_child = cbuf[s0]
            label[wv] = _T
            label[bw_child] = _T
            le[wv] = cur_h
            le[bw_child] = cur_h
            bestedge[bw_child] = -1
            j += jstep
            while cbuf[s0 + (j % ln)] != entrychild:
                bv = cbuf[s0 + (j % ln)]
                if label[bv] == _S:
                    j += jstep
                    continue
                vfound = -1
                cnt = _leaves_of(bv, nv, cstart, clen, cbuf, lstack, lbuf)
                for li in range(cnt):
                    if label[lbuf[li]] != _FREE:
                        vfound = lbuf[li]
                        break
                if vfound >= 0:
                    label[vfound] = _FREE
                    label[dst[mate_he[base[bv]]]] = _FREE
                    qn = _assign_label(vfound, _T, le[vfound], nv, src, dst,
                                       mate_he, label, le, inblossom, base,
                                       bestedge, cstart, clen, cbuf, lstack,
                                       lbuf, queue, qn)
                j += jstep

        # retire b
        label[b] = _FREE
        le[b] = -1
        bestedge[b] = -1
        blen[b] = -1
        clen[b] = 0
        parent[b] = -1
        base[b] = -1
        blossomdual[b] = 0
        unused[nunused] = b
        nunused += 1
    return qn, nunused


def _build_half_edges(n, eu, ev):
    m = eu.shape[0]
    src = np.empty(2 * m, dtype=_I32)
    dst = np.empty(2 * m, dtype=_I32)
    src[0::2] = eu
    dst[0::2] = ev
    src[1::2] = ev
    dst[1::2] = eu
    order = np.argsort(src, kind="stable").astype(_I32)
    counts = np.bincount(src, minlength=n)
    adj_off = np.zeros(n + 1, dtype=_I32)
    np.cumsum(counts, out=adj_off[1:])
    return src, dst, adj_off.astype(_I32), order


def min_weight_perfect_matching_arrays(
    n: int,
    eu: np.ndarray,
    ev: np.ndarray,
    weights: np.ndarray,
    lex_tiebreak: bool = True,
) -> np.ndarray:
    """Exact minimum-weight perfect matching.

    Parameters are the vertex count and parallel edge arrays (endpoints and
    non-negative integer weights). Ties between optimal matchings are broken
    deterministically, preferring pairings of low-index vertices, by folding
    a secondary pair-rank objective into the weights.

    Returns an (n/2, 2) array of matched vertex pairs, sorted. Raises
    MatchingInfeasibleError when no perfect matching exists.
    """
    if n == 0:
        return np.empty((0, 2), dtype=_I32)
    if n % 2 != 0:
        raise MatchingInfeasibleError(f"odd vertex count {n}")
    eu = np.asarray(eu, dtype=_I32)
    ev = np.asarray(ev, dtype=_I32)
    w = np.asarray(weights, dtype=_I64)
    if eu.shape != ev.shape or eu.shape != w.shape:
        raise ValueError("edge arrays must have identical shapes")
    if eu.size and (w < 0).any():
        raise ValueError("edge weights must be non-negative integers")
    if eu.size == 0:
        raise MatchingInfeasibleError("graph has no edges")
    lo = np.minimum(eu, ev)
    hi = np.maximum(eu, ev)
    if (lo == hi).any():
        raise ValueError("self-loops are not allowed")

    wmax = int(w.max())
    span = n * n
    if lex_tiebreak and (wmax + 1) * (span + 1) * (n // 2 + 1) < 2**60:
        # secondary objective: sum of pair ranks, dominated by true weight
        scale = span * (n // 2) + 1
        eff = w * scale + (lo.astype(_I64) * n + hi.astype(_I64))
    else:
        eff = w.copy()
    effmax = int(eff.max())
    # minimization -> maximum-cardinality maximization of (max + 1 - w),
    # doubled so all dual arithmetic stays integral
    wt = 2 * (effmax + 1 - eff)

    src, dst, adj_off, adj_he = _build_half_edges(n, lo, hi)
    mate_he = _mwpm_core(n, lo, hi, wt, adj_off, adj_he, src, dst)

    if (mate_he < 0).any():
        raise MatchingInfeasibleError(
            "graph admits no perfect matching on the given edges"
        )
    partner = dst[mate_he]
    pairs = np.sort(
        np.stack([np.arange(n, dtype=_I32), partner.astype(_I32)], axis=1),
        axis=1,
    )
    pairs = np.unique(pairs, axis=0)
    if pairs.shape[0] != n // 2:
        raise MatchingInfeasibleError("matching extraction failed")
    return pairs


def matching_total_weight(pairs: np.ndarray, weight_lookup) -> int:
    """Sum of weight_lookup(i, j) over matched pairs."""
    return sum(int(weight_lookup(int(i), int(j))) for i, j in pairs)
