"""Compiled single-source shortest-path kernels.

Graphs are passed in CSR form (indptr, indices, weights) with each row
sorted by neighbour index. The heap orders entries by (distance, vertex)
so the settlement order is fully determined by the input, and equal-length
relaxations keep the smaller predecessor index.
"""

import numba
import numpy as np
from numba import njit, prange

# skip the TBB probe; OpenMP or the built-in queue are enough here
numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]


@njit(cache=True, inline="always")
def _less(d1, v1, d2, v2):
    return d1 < d2 or (d1 == d2 and v1 < v2)


@njit(cache=True)
def _heap_push(hd, hv, size, d, v):
    i = size
    hd[i] = d
    hv[i] = v
    while i > 0:
        p = (i - 1) // 2
        if _less(hd[i], hv[i], hd[p], hv[p]):
            hd[i], hd[p] = hd[p], hd[i]
            hv[i], hv[p] = hv[p], hv[i]
            i = p
        else:
            break
    return size + 1


@njit(cache=True)
def _heap_pop(hd, hv, size):
    d = hd[0]
    v = hv[0]
    size -= 1
    hd[0] = hd[size]
    hv[0] = hv[size]
    i = 0
    while True:
        left = 2 * i + 1
        if left >= size:
            break
        c = left
        right = left + 1
        if right < size and _less(hd[right], hv[right], hd[left], hv[left]):
            c = right
        if _less(hd[c], hv[c], hd[i], hv[i]):
            hd[i], hd[c] = hd[c], hd[i]
            hv[i], hv[c] = hv[c], hv[i]
            i = c
        else:
            break
    return d, v, size


@njit(cache=True)
def sssp(indptr, indices, weights, source, dist, pred, pred_slot, order):
    """Dijkstra from `source`; fills dist/pred/pred_slot/order in place.

    Returns the number of settled vertices. `order` receives vertices in
    settlement order. Unreached vertices keep dist=inf, pred=-1.
    """
    n = indptr.shape[0] - 1
    m = indices.shape[0]
    settled = np.zeros(n, dtype=np.bool_)
    for i in range(n):
        dist[i] = np.inf
        pred[i] = -1
        pred_slot[i] = -1
    hd = np.empty(m + 1, dtype=np.float64)
    hv = np.empty(m + 1, dtype=np.int64)
    size = 0
    dist[source] = 0.0
    size = _heap_push(hd, hv, size, 0.0, source)
    count = 0
    while size > 0:
        d, r, size = _heap_pop(hd, hv, size)
        if settled[r] or d > dist[r]:
            continue
        settled[r] = True
        order[count] = r
        count += 1
        for s in range(indptr[r], indptr[r + 1]):
            j = indices[s]
            if settled[j]:
                continue
            t = d + weights[s]
            if t < dist[j]:
                dist[j] = t
                pred[j] = r
                pred_slot[j] = s
                size = _heap_push(hd, hv, size, t, j)
            elif t == dist[j] and r < pred[j]:
                pred[j] = r
                pred_slot[j] = s
    return count


@njit(cache=True)
def _transport_row(indptr, indices, weights, edge_vec, edge_rot, source,
                   span, dist, hops):
    """Parallel-transport Dijkstra from one source.

    edge_vec[s] is the projection T_q^t (x_r - x_q) of CSR slot s = (q -> r)
    expressed in frame q; edge_rot[s] is the connection R_{q,r} carrying
    frame-r coordinates into frame q.
    """
    n = indptr.shape[0] - 1
    d = edge_vec.shape[1]
    pred = np.empty(n, dtype=np.int64)
    pred_slot = np.empty(n, dtype=np.int64)
    order = np.empty(n, dtype=np.int64)
    count = sssp(indptr, indices, weights, source, dist, pred, pred_slot, order)
    rot = np.zeros((n, d, d))
    vec = np.zeros((n, d))
    for i in range(n):
        span[i] = np.inf
        hops[i] = -1
    for a in range(d):
        rot[source, a, a] = 1.0
    span[source] = 0.0
    hops[source] = 0
    for c in range(1, count):
        r = order[c]
        q = pred[r]
        s = pred_slot[r]
        # R[r] = R[q] R_{q,r};  v[r] = v[q] + R[q] T_q^t (x_r - x_q)
        for a in range(d):
            acc = vec[q, a]
            for b in range(d):
                acc += rot[q, a, b] * edge_vec[s, b]
            vec[r, a] = acc
            for b in range(d):
                t = 0.0
                for e in range(d):
                    t += rot[q, a, e] * edge_rot[s, e, b]
                rot[r, a, b] = t
        acc = 0.0
        for a in range(d):
            acc += vec[r, a] * vec[r, a]
        span[r] = np.sqrt(acc)
        hops[r] = hops[q] + 1
    return count


@njit(cache=True, parallel=True)
def transport_rows(indptr, indices, weights, edge_vec, edge_rot, sources):
    m = sources.shape[0]
    n = indptr.shape[0] - 1
    spans = np.empty((m, n))
    dists = np.empty((m, n))
    hops = np.empty((m, n), dtype=np.int32)
    for p in prange(m):
        span = np.empty(n)
        dist = np.empty(n)
        hop = np.empty(n, dtype=np.int64)
        _transport_row(indptr, indices, weights, edge_vec, edge_rot,
                       sources[p], span, dist, hop)
        spans[p, :] = span
        dists[p, :] = dist
        for i in range(n):
            hops[p, i] = hop[i]
    return spans, dists, hops


@njit(cache=True, parallel=True)
def dijkstra_rows(indptr, indices, weights, sources):
    m = sources.shape[0]
    n = indptr.shape[0] - 1
    dists = np.empty((m, n))
    hops = np.empty((m, n), dtype=np.int32)
    for p in prange(m):
        dist = np.empty(n)
        pred = np.empty(n, dtype=np.int64)
        pred_slot = np.empty(n, dtype=np.int64)
        order = np.empty(n, dtype=np.int64)
        count = sssp(indptr, indices, weights, sources[p], dist, pred, pred_slot, order)
        for i in range(n):
            hops[p, i] = -1
        hops[p, sources[p]] = 0
        for c in range(1, count):
            r = order[c]
            hops[p, r] = hops[p, pred[r]] + 1
        dists[p, :] = dist
    return dists, hops


def set_threads(threads: int) -> None:
    """Cap kernel parallelism; 0 means every available core."""
    limit = numba.config.NUMBA_NUM_THREADS
    numba.set_num_threads(limit if threads <= 0 else min(threads, limit))
