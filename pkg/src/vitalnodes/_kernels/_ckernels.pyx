# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: graph traversal sweeps, SIR Monte Carlo, and skip-gram
training. Mirrors ``_pykernels`` exactly; see that module for the contract.
"""

import numpy as np

from libc.stdint cimport int8_t, int32_t, int64_t, uint8_t, uint64_t
from libc.stdlib cimport qsort
from libc.math cimport exp, log1p

BACKEND = "compiled"

cdef uint64_t GAMMA = 0x9E3779B97F4A7C15ULL
cdef uint64_t DERIVE_GAMMA = 0xD1B54A32D192ED03ULL
cdef double INV_2_53 = 1.0 / 9007199254740992.0


cdef inline uint64_t _mix64(uint64_t z) noexcept nogil:
    z ^= z >> 30
    z *= <uint64_t>0xBF58476D1CE4E5B9ULL
    z ^= z >> 27
    z *= <uint64_t>0x94D049BB133111EBULL
    z ^= z >> 31
    return z


cdef inline uint64_t _derive_seed(uint64_t base, uint64_t index) noexcept nogil:
    return _mix64(base + (index + 1) * DERIVE_GAMMA)


cdef inline double _stream_double(uint64_t seed, uint64_t* count) noexcept nogil:
    count[0] += 1
    cdef uint64_t bits = _mix64(seed + count[0] * GAMMA)
    return <double>(bits >> 11) * INV_2_53


cdef int _cmp_i32(const void* a, const void* b) noexcept nogil:
    cdef int32_t x = (<const int32_t*>a)[0]
    cdef int32_t y = (<const int32_t*>b)[0]
    return (x > y) - (x < y)


def bfs_sigma(const int64_t[::1] indptr, const int32_t[::1] indices, int source):
    """Hop distances and shortest-path counts from one source."""
    cdef int n = indptr.shape[0] - 1
    dist_arr = np.full(n, -1, dtype=np.int32)
    sigma_arr = np.zeros(n, dtype=np.float64)
    cdef int32_t[::1] dist = dist_arr
    cdef double[::1] sigma = sigma_arr
    queue_arr = np.empty(n, dtype=np.int32)
    cdef int32_t[::1] queue = queue_arr
    cdef int head = 0, qlen = 0
    cdef int32_t u, v
    cdef int64_t e
    dist[source] = 0
    sigma[source] = 1.0
    queue[qlen] = source
    qlen += 1
    with nogil:
        while head < qlen:
            u = queue[head]
            head += 1
            for e in range(indptr[u], indptr[u + 1]):
                v = indices[e]
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    queue[qlen] = v
                    qlen += 1
                if dist[v] == dist[u] + 1:
                    sigma[v] += sigma[u]
    return dist_arr, sigma_arr


def betweenness_counts(const int64_t[::1] indptr, const int32_t[::1] indices):
    """Per-node counts of shortest paths passing through the node, plus the
    total shortest-path count over ordered pairs."""
    cdef int n = indptr.shape[0] - 1
    through_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] through = through_arr
    dist_arr = np.full(n, -1, dtype=np.int32)
    cdef int32_t[::1] dist = dist_arr
    sigma_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] sigma = sigma_arr
    w_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] w = w_arr
    queue_arr = np.empty(n, dtype=np.int32)
    cdef int32_t[::1] queue = queue_arr
    cdef double denom = 0.0, acc, wv
    cdef int s, head, qlen, idx
    cdef int32_t u, v
    cdef int64_t e
    with nogil:
        for s in range(n):
            head = 0
            qlen = 0
            dist[s] = 0
            sigma[s] = 1.0
            queue[qlen] = s
            qlen += 1
            while head < qlen:
                u = queue[head]
                head += 1
                for e in range(indptr[u], indptr[u + 1]):
                    v = indices[e]
                    if dist[v] < 0:
                        dist[v] = dist[u] + 1
                        queue[qlen] = v
                        qlen += 1
                    if dist[v] == dist[u] + 1:
                        sigma[v] += sigma[u]
            acc = 0.0
            for idx in range(qlen - 1, -1, -1):
                v = queue[idx]
                wv = 0.0
                for e in range(indptr[v], indptr[v + 1]):
                    u = indices[e]
                    if dist[u] == dist[v] + 1:
                        wv += 1.0 + w[u]
                w[v] = wv
                if v != s:
                    through[v] += sigma[v] * wv
                acc += sigma[v]
            denom += acc - 1.0
            for idx in range(qlen):
                v = queue[idx]
                dist[v] = -1
                sigma[v] = 0.0
                w[v] = 0.0
    return through_arr, denom


def distance_stats(const int64_t[::1] indptr, const int32_t[::1] indices,
                   const uint8_t[::1] alive):
    """Per-node distance sums over the alive-induced subgraph."""
    cdef int n = indptr.shape[0] - 1
    sum_d_arr = np.zeros(n, dtype=np.float64)
    reach_arr = np.zeros(n, dtype=np.int64)
    sum_inv_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] sum_d = sum_d_arr
    cdef int64_t[::1] reach = reach_arr
    cdef double[::1] sum_inv = sum_inv_arr
    dist_arr = np.full(n, -1, dtype=np.int32)
    cdef int32_t[::1] dist = dist_arr
    queue_arr = np.empty(n, dtype=np.int32)
    cdef int32_t[::1] queue = queue_arr
    cdef int s, head, qlen, idx, run_start
    cdef int32_t u, v, d
    cdef int64_t e, r
    cdef double sd, si
    cdef int cnt
    with nogil:
        for s in range(n):
            if not alive[s]:
                continue
            head = 0
            qlen = 0
            dist[s] = 0
            queue[qlen] = s
            qlen += 1
            while head < qlen:
                u = queue[head]
                head += 1
                for e in range(indptr[u], indptr[u + 1]):
                    v = indices[e]
                    if alive[v] and dist[v] < 0:
                        dist[v] = dist[u] + 1
                        queue[qlen] = v
                        qlen += 1
            # accumulate per level (queue is sorted by distance) so the
            # floating-point sums match the NumPy backend bit for bit
            sd = 0.0
            si = 0.0
            r = 0
            idx = 1
            while idx < qlen:
                d = dist[queue[idx]]
                run_start = idx
                while idx < qlen and dist[queue[idx]] == d:
                    idx += 1
                cnt = idx - run_start
                sd += cnt * <double>d
                si += cnt / <double>d
                r += cnt
            sum_d[s] = sd
            reach[s] = r
            sum_inv[s] = si
            for idx in range(qlen):
                dist[queue[idx]] = -1
    return sum_d_arr, reach_arr, sum_inv_arr


cdef void _sir_step(const int64_t[::1] indptr, const int32_t[::1] indices,
                    int8_t* status, int32_t* cur, int ncur,
                    int32_t* newbuf, uint8_t* newmark, int32_t* recbuf,
                    uint64_t seed, uint64_t* count,
                    double beta, double gamma,
                    int* n_new, int* n_rec) noexcept nogil:
    """One synchronous step; same draw order as the NumPy backend."""
    cdef int idx, nnew = 0, nrec = 0
    cdef int32_t u, v
    cdef int64_t e
    for idx in range(ncur):
        u = cur[idx]
        for e in range(indptr[u], indptr[u + 1]):
            v = indices[e]
            if status[v] == 0:
                if _stream_double(seed, count) < beta:
                    if not newmark[v]:
                        newmark[v] = 1
                        newbuf[nnew] = v
                        nnew += 1
    for idx in range(ncur):
        if _stream_double(seed, count) < gamma:
            recbuf[nrec] = cur[idx]
            nrec += 1
    for idx in range(nnew):
        status[newbuf[idx]] = 1
        newmark[newbuf[idx]] = 0
    for idx in range(nrec):
        status[recbuf[idx]] = 2
    if nnew > 1:
        qsort(newbuf, nnew, sizeof(int32_t), _cmp_i32)
    n_new[0] = nnew
    n_rec[0] = nrec


cdef int _merge_survivors(int32_t* cur, int ncur, int8_t* status,
                          int32_t* newbuf, int nnew,
                          int32_t* out) noexcept nogil:
    """Merge still-infectious nodes of ``cur`` with sorted new infections;
    both inputs ascending, output ascending."""
    cdef int i = 0, j = 0, k = 0
    while i < ncur and status[cur[i]] != 1:
        i += 1
    while i < ncur and j < nnew:
        if cur[i] < newbuf[j]:
            out[k] = cur[i]
            k += 1
            i += 1
            while i < ncur and status[cur[i]] != 1:
                i += 1
        else:
            out[k] = newbuf[j]
            k += 1
            j += 1
    while i < ncur:
        if status[cur[i]] == 1:
            out[k] = cur[i]
            k += 1
        i += 1
    while j < nnew:
        out[k] = newbuf[j]
        k += 1
        j += 1
    return k


def sir_single(const int64_t[::1] indptr, const int32_t[::1] indices,
               const int32_t[::1] seeds, double beta, double gamma,
               uint64_t seed, int max_steps):
    """One recorded trajectory; returns per-step (S, I, R) count arrays.

    ``seeds`` must be sorted and unique.
    """
    cdef int n = indptr.shape[0] - 1
    cdef int nseeds = seeds.shape[0]
    status_arr = np.zeros(n, dtype=np.int8)
    cdef int8_t[::1] status = status_arr
    buf_a = np.empty(n, dtype=np.int32)
    buf_b = np.empty(n, dtype=np.int32)
    newbuf_arr = np.empty(n, dtype=np.int32)
    recbuf_arr = np.empty(n, dtype=np.int32)
    mark_arr = np.zeros(n, dtype=np.uint8)
    cdef int32_t[::1] cur = buf_a
    cdef int32_t[::1] nxt = buf_b
    cdef int32_t[::1] newbuf = newbuf_arr
    cdef int32_t[::1] recbuf = recbuf_arr
    cdef uint8_t[::1] newmark = mark_arr
    cdef int ncur = nseeds, idx, nnew = 0, nrec = 0
    cdef int s_count = n - nseeds, i_count = nseeds, r_count = 0
    cdef uint64_t count = 0
    for idx in range(nseeds):
        cur[idx] = seeds[idx]
        status[seeds[idx]] = 1
    s_hist = [s_count]
    i_hist = [i_count]
    r_hist = [r_count]
    cdef int steps = 0
    while ncur > 0 and steps < max_steps:
        _sir_step(indptr, indices, &status[0], &cur[0], ncur,
                  &newbuf[0], &newmark[0], &recbuf[0],
                  seed, &count, beta, gamma, &nnew, &nrec)
        ncur = _merge_survivors(&cur[0], ncur, &status[0], &newbuf[0], nnew,
                                &nxt[0])
        cur, nxt = nxt, cur
        s_count -= nnew
        r_count += nrec
        i_count = n - s_count - r_count
        s_hist.append(s_count)
        i_hist.append(i_count)
        r_hist.append(r_count)
        steps += 1
    return (np.array(s_hist, dtype=np.int64),
            np.array(i_hist, dtype=np.int64),
            np.array(r_hist, dtype=np.int64))


def sir_final_mean(const int64_t[::1] indptr, const int32_t[::1] indices,
                   double beta, double gamma, int runs, uint64_t base_seed,
                   int max_steps):
    """Mean final outbreak size over ``runs`` single-seed epidemics per node."""
    cdef int n = indptr.shape[0] - 1
    scores_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] scores = scores_arr
    status_arr = np.zeros(n, dtype=np.int8)
    cdef int8_t[::1] status = status_arr
    buf_a = np.empty(n, dtype=np.int32)
    buf_b = np.empty(n, dtype=np.int32)
    newbuf_arr = np.empty(n, dtype=np.int32)
    recbuf_arr = np.empty(n, dtype=np.int32)
    mark_arr = np.zeros(n, dtype=np.uint8)
    touched_arr = np.empty(n, dtype=np.int32)
    cdef int32_t[::1] cur = buf_a
    cdef int32_t[::1] nxt = buf_b
    cdef int32_t[::1] newbuf = newbuf_arr
    cdef int32_t[::1] recbuf = recbuf_arr
    cdef uint8_t[::1] newmark = mark_arr
    cdef int32_t[::1] touched = touched_arr
    cdef int node, run, ncur, steps, idx, nnew = 0, nrec = 0, ntouched, infected
    cdef uint64_t seed, count
    cdef double acc
    with nogil:
        for node in range(n):
            acc = 0.0
            for run in range(runs):
                seed = _derive_seed(base_seed,
                                    <uint64_t>node * <uint64_t>runs + <uint64_t>run)
                count = 0
                cur[0] = node
                status[node] = 1
                touched[0] = node
                ntouched = 1
                infected = 1
                ncur = 1
                steps = 0
                while ncur > 0 and steps < max_steps:
                    _sir_step(indptr, indices, &status[0], &cur[0], ncur,
                              &newbuf[0], &newmark[0], &recbuf[0],
                              seed, &count, beta, gamma, &nnew, &nrec)
                    for idx in range(nnew):
                        touched[ntouched] = newbuf[idx]
                        ntouched += 1
                    infected += nnew
                    ncur = _merge_survivors(&cur[0], ncur, &status[0],
                                            &newbuf[0], nnew, &nxt[0])
                    # swap cur/nxt pointers via memoryview objects requires gil;
                    # copy instead (outbreaks are small, so this is cheap)
                    for idx in range(ncur):
                        cur[idx] = nxt[idx]
                    steps += 1
                acc += infected
                for idx in range(ntouched):
                    status[touched[idx]] = 0
            scores[node] = acc / runs
    return scores_arr


def sir_curve(const int64_t[::1] indptr, const int32_t[::1] indices,
              const int32_t[::1] seeds, double beta, double gamma, int runs,
              uint64_t base_seed, int max_steps):
    """Mean I(t)+R(t) over ``runs`` epidemics from a fixed sorted seed set,
    padded with each run's terminal value out to the longest run."""
    cdef int n = indptr.shape[0] - 1
    cdef int nseeds = seeds.shape[0]
    curve_arr = np.zeros(max_steps + 2, dtype=np.float64)
    tail_arr = np.zeros(max_steps + 2, dtype=np.float64)
    cdef double[::1] curve_sum = curve_arr
    cdef double[::1] tail_add = tail_arr
    status_arr = np.zeros(n, dtype=np.int8)
    cdef int8_t[::1] status = status_arr
    buf_a = np.empty(n, dtype=np.int32)
    buf_b = np.empty(n, dtype=np.int32)
    newbuf_arr = np.empty(n, dtype=np.int32)
    recbuf_arr = np.empty(n, dtype=np.int32)
    mark_arr = np.zeros(n, dtype=np.uint8)
    touched_arr = np.empty(n, dtype=np.int32)
    cdef int32_t[::1] cur = buf_a
    cdef int32_t[::1] nxt = buf_b
    cdef int32_t[::1] newbuf = newbuf_arr
    cdef int32_t[::1] recbuf = recbuf_arr
    cdef uint8_t[::1] newmark = mark_arr
    cdef int32_t[::1] touched = touched_arr
    cdef int run, ncur, t, idx, nnew = 0, nrec = 0, ntouched, infected
    cdef int t_max = 0
    cdef uint64_t seed, count
    with nogil:
        for run in range(runs):
            seed = _derive_seed(base_seed, <uint64_t>run)
            count = 0
            ncur = nseeds
            for idx in range(nseeds):
                cur[idx] = seeds[idx]
                status[seeds[idx]] = 1
                touched[idx] = seeds[idx]
            ntouched = nseeds
            infected = nseeds
            curve_sum[0] += infected
            t = 0
            while ncur > 0 and t < max_steps:
                _sir_step(indptr, indices, &status[0], &cur[0], ncur,
                          &newbuf[0], &newmark[0], &recbuf[0],
                          seed, &count, beta, gamma, &nnew, &nrec)
                for idx in range(nnew):
                    touched[ntouched] = newbuf[idx]
                    ntouched += 1
                infected += nnew
                ncur = _merge_survivors(&cur[0], ncur, &status[0],
                                        &newbuf[0], nnew, &nxt[0])
                for idx in range(ncur):
                    cur[idx] = nxt[idx]
                t += 1
                curve_sum[t] += infected
            tail_add[t + 1] += infected
            if t > t_max:
                t_max = t
            for idx in range(ntouched):
                status[touched[idx]] = 0
    total = curve_arr + np.cumsum(tail_arr)
    return total[:t_max + 1] / runs


def sgns_train(const int32_t[::1] tokens, const int64_t[::1] offsets,
               double[:, ::1] w_in, double[:, ::1] w_out,
               const double[::1] neg_cdf, int window, int negatives,
               int epochs, double lr_start, double lr_min, uint64_t seed,
               int64_t total_updates):
    """Skip-gram negative-sampling training over a walk corpus.

    Updates ``w_in`` and ``w_out`` in place; returns the mean pair loss per
    epoch.
    """
    cdef int n = neg_cdf.shape[0]
    cdef int d = w_in.shape[1]
    cdef int nwalks = offsets.shape[0] - 1
    losses_arr = np.zeros(epochs, dtype=np.float64)
    cdef double[::1] losses = losses_arr
    e_arr = np.zeros(d, dtype=np.float64)
    cdef double[::1] ebuf = e_arr
    cdef uint64_t count = 0
    cdef int64_t t_upd = 0, pair_count, a, b
    cdef int ep, wk, c, j, k, lo_p, hi_p, length, center, target, v, lo, hi, mid
    cdef int neg_i
    cdef double loss_acc, lr, score, cl, f, g, u
    with nogil:
        for ep in range(epochs):
            loss_acc = 0.0
            pair_count = 0
            for wk in range(nwalks):
                a = offsets[wk]
                b = offsets[wk + 1]
                length = <int>(b - a)
                for c in range(length):
                    center = tokens[a + c]
                    lo_p = c - window
                    if lo_p < 0:
                        lo_p = 0
                    hi_p = c + window
                    if hi_p > length - 1:
                        hi_p = length - 1
                    for j in range(lo_p, hi_p + 1):
                        if j == c:
                            continue
                        target = tokens[a + j]
                        lr = lr_start * (1.0 - <double>t_upd / <double>total_updates)
                        if lr < lr_min:
                            lr = lr_min
                        for k in range(d):
                            ebuf[k] = 0.0
                        # positive sample
                        score = 0.0
                        for k in range(d):
                            score += w_in[center, k] * w_out[target, k]
                        cl = score
                        if cl > 60.0:
                            cl = 60.0
                        elif cl < -60.0:
                            cl = -60.0
                        f = 1.0 / (1.0 + exp(-cl))
                        loss_acc += log1p(exp(-cl))
                        g = (1.0 - f) * lr
                        for k in range(d):
                            ebuf[k] += g * w_out[target, k]
                        for k in range(d):
                            w_out[target, k] += g * w_in[center, k]
                        # negative samples
                        for neg_i in range(negatives):
                            u = _stream_double(seed, &count)
                            lo = 0
                            hi = n
                            while lo < hi:
                                mid = (lo + hi) >> 1
                                if neg_cdf[mid] <= u:
                                    lo = mid + 1
                                else:
                                    hi = mid
                            v = lo
                            if v == target:
                                continue
                            score = 0.0
                            for k in range(d):
                                score += w_in[center, k] * w_out[v, k]
                            cl = score
                            if cl > 60.0:
                                cl = 60.0
                            elif cl < -60.0:
                                cl = -60.0
                            f = 1.0 / (1.0 + exp(-cl))
                            loss_acc += cl + log1p(exp(-cl))
                            g = (0.0 - f) * lr
                            for k in range(d):
                                ebuf[k] += g * w_out[v, k]
                            for k in range(d):
                                w_out[v, k] += g * w_in[center, k]
                        for k in range(d):
                            w_in[center, k] += ebuf[k]
                        t_upd += 1
                        pair_count += 1
            if pair_count > 0:
                losses[ep] = loss_acc / pair_count
    return losses_arr
