"""Pure NumPy implementations of the hot kernels.

This is the fallback backend used when the compiled extension is not
available. Each function mirrors its compiled twin exactly: stochastic
kernels consume the same splitmix64 streams in the same order, so the two
backends produce bit-identical trajectories; deterministic kernels agree
up to floating-point reassociation on non-integer accumulations (distance
reciprocal sums) and exactly everywhere else.
"""

from __future__ import annotations

import math

import numpy as np

from ..rng import Stream, derive_seed

BACKEND = "python"


def _expand(indptr, indices, frontier):
    """All (source, target) directed edges leaving ``frontier``."""
    starts = indptr[frontier]
    counts = indptr[frontier + 1] - starts
    total = int(counts.sum())
    if total == 0:
        return (np.empty(0, dtype=indices.dtype),
                np.empty(0, dtype=frontier.dtype))
    shift = np.zeros(len(frontier), dtype=np.int64)
    np.cumsum(counts[:-1], out=shift[1:])
    idx = np.arange(total, dtype=np.int64) + np.repeat(starts - shift, counts)
    return indices[idx], np.repeat(frontier, counts)


def bfs_sigma(indptr, indices, source):
    """Hop distances and shortest-path counts from one source.

    Unreachable nodes get dist -1 and sigma 0.
    """
    n = len(indptr) - 1
    dist = np.full(n, -1, dtype=np.int32)
    sigma = np.zeros(n, dtype=np.float64)
    dist[source] = 0
    sigma[source] = 1.0
    frontier = np.array([source], dtype=np.int64)
    d = 0
    while frontier.size:
        targets, srcs = _expand(indptr, indices, frontier)
        fresh = np.unique(targets[dist[targets] == -1]).astype(np.int64)
        dist[fresh] = d + 1
        step = dist[targets] == d + 1
        np.add.at(sigma, targets[step], sigma[srcs[step]])
        frontier = fresh
        d += 1
    return dist, sigma


def betweenness_counts(indptr, indices):
    """Per-node counts of shortest paths passing through the node, plus the
    total shortest-path count over ordered pairs."""
    n = len(indptr) - 1
    through = np.zeros(n, dtype=np.float64)
    denom = 0.0
    for s in range(n):
        dist = np.full(n, -1, dtype=np.int32)
        sigma = np.zeros(n, dtype=np.float64)
        dist[s] = 0
        sigma[s] = 1.0
        levels = [np.array([s], dtype=np.int64)]
        d = 0
        while levels[-1].size:
            targets, srcs = _expand(indptr, indices, levels[-1])
            fresh = np.unique(targets[dist[targets] == -1]).astype(np.int64)
            dist[fresh] = d + 1
            step = dist[targets] == d + 1
            np.add.at(sigma, targets[step], sigma[srcs[step]])
            levels.append(fresh)
            d += 1
        # w[v]: number of shortest-path continuations from v to any node
        # strictly below it in the BFS dag
        w = np.zeros(n, dtype=np.float64)
        for lvl in reversed(levels[:-1]):
            targets, srcs = _expand(indptr, indices, lvl)
            down = dist[targets] == dist[srcs] + 1
            np.add.at(w, srcs[down], 1.0 + w[targets[down]])
        contrib = sigma * w
        contrib[s] = 0.0
        through += contrib
        denom += sigma.sum() - 1.0
    return through, denom


def distance_stats(indptr, indices, alive):
    """Per-node distance sums over the alive-induced subgraph.

    Returns (sum of distances, count of reachable nodes excluding self,
    sum of reciprocal distances). Dead nodes have all-zero rows.
    """
    n = len(indptr) - 1
    sum_d = np.zeros(n, dtype=np.float64)
    reach = np.zeros(n, dtype=np.int64)
    sum_inv = np.zeros(n, dtype=np.float64)
    alive = alive.astype(bool)
    for s in range(n):
        if not alive[s]:
            continue
        dist = np.full(n, -1, dtype=np.int32)
        dist[s] = 0
        frontier = np.array([s], dtype=np.int64)
        d = 0
        sd = 0.0
        si = 0.0
        r = 0
        while frontier.size:
            targets, _ = _expand(indptr, indices, frontier)
            cand = targets[(dist[targets] == -1) & alive[targets]]
            fresh = np.unique(cand).astype(np.int64)
            dist[fresh] = d + 1
            k = fresh.size
            sd += k * float(d + 1)
            si += k / float(d + 1)
            r += k
            frontier = fresh
            d += 1
        sum_d[s] = sd
        reach[s] = r
        sum_inv[s] = si
    return sum_d, reach, sum_inv


def _sir_step(indptr, indices, status, cur, stream, beta, gamma):
    """One synchronous SIR step; returns (new infections, recoveries).

    Draw order (shared with the compiled backend): one uniform per
    (infectious node ascending, susceptible neighbor in adjacency order)
    attempt, then one uniform per infectious node ascending for recovery.
    """
    targets, _ = _expand(indptr, indices, cur)
    sus = targets[status[targets] == 0]
    u = stream.doubles(sus.size)
    fresh = np.unique(sus[u < beta]).astype(np.int64)
    ur = stream.doubles(cur.size)
    rec = cur[ur < gamma]
    status[fresh] = 1
    status[rec] = 2
    return fresh, rec


def sir_single(indptr, indices, seeds, beta, gamma, seed, max_steps):
    """One recorded trajectory; returns per-step (S, I, R) count arrays."""
    n = len(indptr) - 1
    status = np.zeros(n, dtype=np.int8)
    cur = np.unique(np.asarray(seeds, dtype=np.int64))
    status[cur] = 1
    stream = Stream(seed)
    s_hist = [n - cur.size]
    i_hist = [cur.size]
    r_hist = [0]
    steps = 0
    while cur.size and steps < max_steps:
        fresh, rec = _sir_step(indptr, indices, status, cur, stream, beta, gamma)
        cur = np.union1d(np.setdiff1d(cur, rec, assume_unique=True), fresh)
        s_hist.append(s_hist[-1] - fresh.size)
        r_hist.append(r_hist[-1] + rec.size)
        i_hist.append(n - s_hist[-1] - r_hist[-1])
        steps += 1
    return (np.array(s_hist, dtype=np.int64),
            np.array(i_hist, dtype=np.int64),
            np.array(r_hist, dtype=np.int64))


def sir_final_mean(indptr, indices, beta, gamma, runs, base_seed, max_steps):
    """Mean final outbreak size (I+R) over ``runs`` single-seed epidemics
    per node; substream (node, run) is derived as node*runs + run."""
    n = len(indptr) - 1
    scores = np.zeros(n, dtype=np.float64)
    status = np.zeros(n, dtype=np.int8)
    for node in range(n):
        acc = 0.0
        for run in range(runs):
            stream = Stream(derive_seed(base_seed, node * runs + run))
            cur = np.array([node], dtype=np.int64)
            status[node] = 1
            touched = [cur]
            infected = 1
            steps = 0
            while cur.size and steps < max_steps:
                fresh, rec = _sir_step(indptr, indices, status, cur, stream,
                                       beta, gamma)
                cur = np.union1d(np.setdiff1d(cur, rec, assume_unique=True),
                                 fresh)
                touched.append(fresh)
                infected += fresh.size
                steps += 1
            acc += infected
            for arr in touched:
                status[arr] = 0
        scores[node] = acc / runs
    return scores


def sir_curve(indptr, indices, seeds, beta, gamma, runs, base_seed, max_steps):
    """Mean I(t)+R(t) over ``runs`` epidemics from a fixed seed set, padded
    with each run's terminal value out to the longest run."""
    n = len(indptr) - 1
    curve_sum = np.zeros(max_steps + 2, dtype=np.float64)
    tail_add = np.zeros(max_steps + 2, dtype=np.float64)
    seeds = np.unique(np.asarray(seeds, dtype=np.int64))
    t_max = 0
    status = np.zeros(n, dtype=np.int8)
    for run in range(runs):
        stream = Stream(derive_seed(base_seed, run))
        cur = seeds.copy()
        status[cur] = 1
        touched = [cur]
        infected_ever = cur.size
        curve_sum[0] += infected_ever
        t = 0
        while cur.size and t < max_steps:
            fresh, rec = _sir_step(indptr, indices, status, cur, stream,
                                   beta, gamma)
            cur = np.union1d(np.setdiff1d(cur, rec, assume_unique=True), fresh)
            touched.append(fresh)
            infected_ever += fresh.size
            t += 1
            curve_sum[t] += infected_ever
        tail_add[t + 1] += infected_ever
        t_max = max(t_max, t)
        for arr in touched:
            status[arr] = 0
    total = curve_sum + np.cumsum(tail_add)
    return total[:t_max + 1] / runs


def _sigmoid(x: float) -> float:
    return 1.0 / (1.0 + math.exp(-x))


def sgns_train(tokens, offsets, w_in, w_out, neg_cdf, window, negatives,
               epochs, lr_start, lr_min, seed, total_updates):
    """Skip-gram negative-sampling training over a walk corpus.

    Updates ``w_in`` and ``w_out`` in place; returns the mean pair loss per
    epoch. One sequential splitmix64 stream supplies every negative draw.
    """
    stream = Stream(seed)
    losses = np.zeros(epochs, dtype=np.float64)
    nwalks = len(offsets) - 1
    t_upd = 0
    for ep in range(epochs):
        loss_acc = 0.0
        pair_count = 0
        for wk in range(nwalks):
            a, b = int(offsets[wk]), int(offsets[wk + 1])
            length = b - a
            for c in range(length):
                center = int(tokens[a + c])
                lo = max(0, c - window)
                hi = min(length - 1, c + window)
                for j in range(lo, hi + 1):
                    if j == c:
                        continue
                    target = int(tokens[a + j])
                    lr = lr_start * (1.0 - t_upd / total_updates)
                    if lr < lr_min:
                        lr = lr_min
                    vi = w_in[center]
                    e = np.zeros_like(vi)
                    score = float(vi @ w_out[target])
                    cl = min(60.0, max(-60.0, score))
                    f = _sigmoid(cl)
                    loss_acc += math.log1p(math.exp(-cl))
                    g = (1.0 - f) * lr
                    e += g * w_out[target]
                    w_out[target] += g * vi
                    for _ in range(negatives):
                        u = stream.double()
                        v = int(np.searchsorted(neg_cdf, u, side="right"))
                        if v == target:
                            continue
                        score = float(vi @ w_out[v])
                        cl = min(60.0, max(-60.0, score))
                        f = _sigmoid(cl)
                        loss_acc += cl + math.log1p(math.exp(-cl))
                        g = (0.0 - f) * lr
                        e += g * w_out[v]
                        w_out[v] += g * vi
                    w_in[center] += e
                    t_upd += 1
                    pair_count += 1
        losses[ep] = loss_acc / max(pair_count, 1)
    return losses
