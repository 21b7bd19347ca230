"""Hot numeric kernels with two interchangeable backends.

Each kernel exists twice: a loop-oriented version compiled with numba's
``@njit`` and a vectorized pure-numpy version. The public names
(``lstm_grads``, ``best_numeric_split``, ``forest_apply``) dispatch to the
compiled version when numba is importable, unless the environment variable
``SEEDMIX_NUMBA`` is set to ``0``/``false``/``off``/``no``, which forces the
numpy path. ``benchmarks/bench_kernels.py`` times both.

Both backends implement identical arithmetic; results agree to float64
round-off (integer-exact for the split scan). Determinism is guaranteed
within a backend.
"""

from __future__ import annotations

import math
import os

import numpy as np


def _numba_wanted() -> bool:
    flag = os.environ.get("SEEDMIX_NUMBA", "auto").strip().lower()
    return flag not in ("0", "false", "off", "no")


try:
    from numba import njit as _njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def _njit(*args, **kwargs):
        def deco(fn):
            return fn

        return deco


USING_NUMBA = HAVE_NUMBA and _numba_wanted()


# ---------------------------------------------------------------------------
# Recurrent-cell loss + gradients (full batch, scalar input per step).
#
# Gate layout along the 4H axis: [input, forget, candidate, output].
# Loss is the mean squared error of the linear readout of the final hidden
# state against the targets.
# ---------------------------------------------------------------------------


def lstm_grads_numpy(wx, wh, b, wy, by, x, y):
    """Batched forward/backward pass; returns (loss, dwx, dwh, db, dwy, dby)."""
    B, T = x.shape
    H = wy.shape[0]

    gates = np.empty((T, B, 4 * H))  # post-activation i, f, g, o
    cells = np.empty((T, B, H))
    tanhc = np.empty((T, B, H))
    hidden = np.empty((T, B, H))

    h = np.zeros((B, H))
    c = np.zeros((B, H))
    for t in range(T):
        z = x[:, t, None] * wx[None, :] + h @ wh.T + b[None, :]
        i = 1.0 / (1.0 + np.exp(-z[:, :H]))
        f = 1.0 / (1.0 + np.exp(-z[:, H : 2 * H]))
        g = np.tanh(z[:, 2 * H : 3 * H])
        o = 1.0 / (1.0 + np.exp(-z[:, 3 * H :]))
        c = f * c + i * g
        h = o * np.tanh(c)
        gates[t, :, :H] = i
        gates[t, :, H : 2 * H] = f
        gates[t, :, 2 * H : 3 * H] = g
        gates[t, :, 3 * H :] = o
        cells[t] = c
        tanhc[t] = np.tanh(c)
        hidden[t] = h

    pred = hidden[T - 1] @ wy + by
    err = pred - y
    loss = float(np.mean(err * err))

    dpred = 2.0 * err / B
    dwy = hidden[T - 1].T @ dpred
    dby = float(np.sum(dpred))

    dwx = np.zeros_like(wx)
    dwh = np.zeros_like(wh)
    db = np.zeros_like(b)
    dh = dpred[:, None] * wy[None, :]
    dc = np.zeros((B, H))
    for t in range(T - 1, -1, -1):
        i = gates[t, :, :H]
        f = gates[t, :, H : 2 * H]
        g = gates[t, :, 2 * H : 3 * H]
        o = gates[t, :, 3 * H :]
        tc = tanhc[t]
        do = dh * tc
        dc = dc + dh * o * (1.0 - tc * tc)
        c_prev = cells[t - 1] if t > 0 else np.zeros((B, H))
        df = dc * c_prev
        di = dc * g
        dg = dc * i
        dz = np.empty((B, 4 * H))
        dz[:, :H] = di * i * (1.0 - i)
        dz[:, H : 2 * H] = df * f * (1.0 - f)
        dz[:, 2 * H : 3 * H] = dg * (1.0 - g * g)
        dz[:, 3 * H :] = do * o * (1.0 - o)
        dwx += dz.T @ x[:, t]
        h_prev = hidden[t - 1] if t > 0 else np.zeros((B, H))
        dwh += dz.T @ h_prev
        db += dz.sum(axis=0)
        dh = dz @ wh
        dc = dc * f
    return loss, dwx, dwh, db, dwy, dby


def _lstm_grads_loops(wx, wh, b, wy, by, x, y):
    B, T = x.shape
    H = wy.shape[0]

    gates = np.empty((T, B, 4 * H))
    cells = np.empty((T, B, H))
    tanhc = np.empty((T, B, H))
    hidden = np.empty((T, B, H))

    for bi in range(B):
        h = np.zeros(H)
        c = np.zeros(H)
        for t in range(T):
            xv = x[bi, t]
            for k in range(H):
                zi = wx[k] * xv + b[k]
                zf = wx[H + k] * xv + b[H + k]
                zg = wx[2 * H + k] * xv + b[2 * H + k]
                zo = wx[3 * H + k] * xv + b[3 * H + k]
                for j in range(H):
                    hj = h[j]
                    zi += wh[k, j] * hj
                    zf += wh[H + k, j] * hj
                    zg += wh[2 * H + k, j] * hj
                    zo += wh[3 * H + k, j] * hj
                iv = 1.0 / (1.0 + math.exp(-zi))
                fv = 1.0 / (1.0 + math.exp(-zf))
                gv = math.tanh(zg)
                ov = 1.0 / (1.0 + math.exp(-zo))
                cv = fv * c[k] + iv * gv
                gates[t, bi, k] = iv
                gates[t, bi, H + k] = fv
                gates[t, bi, 2 * H + k] = gv
                gates[t, bi, 3 * H + k] = ov
                cells[t, bi, k] = cv
                tanhc[t, bi, k] = math.tanh(cv)
            for k in range(H):
                c[k] = cells[t, bi, k]
                h[k] = gates[t, bi, 3 * H + k] * tanhc[t, bi, k]
                hidden[t, bi, k] = h[k]

    loss = 0.0
    dpred = np.empty(B)
    for bi in range(B):
        p = by
        for k in range(H):
            p += hidden[T - 1, bi, k] * wy[k]
        e = p - y[bi]
        loss += e * e
        dpred[bi] = 2.0 * e / B
    loss /= B

    dwx = np.zeros_like(wx)
    dwh = np.zeros_like(wh)
    db = np.zeros_like(b)
    dwy = np.zeros_like(wy)
    dby = 0.0
    for bi in range(B):
        dby += dpred[bi]
        for k in range(H):
            dwy[k] += hidden[T - 1, bi, k] * dpred[bi]

    for bi in range(B):
        dh = np.empty(H)
        dc = np.zeros(H)
        for k in range(H):
            dh[k] = dpred[bi] * wy[k]
        for t in range(T - 1, -1, -1):
            dz = np.empty(4 * H)
            for k in range(H):
                iv = gates[t, bi, k]
                fv = gates[t, bi, H + k]
                gv = gates[t, bi, 2 * H + k]
                ov = gates[t, bi, 3 * H + k]
                tc = tanhc[t, bi, k]
                do = dh[k] * tc
                dck = dc[k] + dh[k] * ov * (1.0 - tc * tc)
                c_prev = cells[t - 1, bi, k] if t > 0 else 0.0
                dz[k] = (dck * gv) * iv * (1.0 - iv)
                dz[H + k] = (dck * c_prev) * fv * (1.0 - fv)
                dz[2 * H + k] = (dck * iv) * (1.0 - gv * gv)
                dz[3 * H + k] = do * ov * (1.0 - ov)
                dc[k] = dck * fv
            xv = x[bi, t]
            for r in range(4 * H):
                dwx[r] += dz[r] * xv
                db[r] += dz[r]
            if t > 0:
                for r in range(4 * H):
                    for j in range(H):
                        dwh[r, j] += dz[r] * hidden[t - 1, bi, j]
            for j in range(H):
                acc = 0.0
                for r in range(4 * H):
                    acc += dz[r] * wh[r, j]
                dh[j] = acc
    return loss, dwx, dwh, db, dwy, dby


lstm_grads_numba = _njit(cache=True)(_lstm_grads_loops)


# ---------------------------------------------------------------------------
# Best axis-aligned split of one numeric feature by weighted Gini impurity.
#
# Returns (found, threshold, impurity). Split positions are boundaries
# between distinct sorted values with at least min_leaf samples per side;
# class counts stay integral so both backends agree bit-for-bit and pick the
# first position attaining the minimum.
# ---------------------------------------------------------------------------


def best_numeric_split_numpy(values, labels, n_classes, min_leaf):
    n = values.shape[0]
    if n < 2 * min_leaf:
        return False, 0.0, 1.0
    order = np.argsort(values)
    sv = values[order]
    sl = labels[order]

    onehot = np.zeros((n, n_classes), dtype=np.int64)
    onehot[np.arange(n), sl] = 1
    cum = np.cumsum(onehot, axis=0)  # class counts among the first p samples
    total = cum[-1]

    p = np.arange(min_leaf, n - min_leaf + 1)
    p = p[sv[p - 1] != sv[p]]
    if p.size == 0:
        return False, 0.0, 1.0
    left = cum[p - 1]
    right = total[None, :] - left
    nl = p.astype(np.float64)
    nr = (n - p).astype(np.float64)
    score = (left * left).sum(axis=1) / nl + (right * right).sum(axis=1) / nr
    impurity = 1.0 - score / n
    best = int(np.argmin(impurity))
    pos = int(p[best])
    threshold = 0.5 * (sv[pos - 1] + sv[pos])
    return True, float(threshold), float(impurity[best])


def _best_numeric_split_loops(values, labels, n_classes, min_leaf):
    n = values.shape[0]
    if n < 2 * min_leaf:
        return False, 0.0, 1.0
    order = np.argsort(values)
    sv = values[order]
    sl = labels[order]

    total = np.zeros(n_classes, dtype=np.int64)
    for i in range(n):
        total[sl[i]] += 1

    left = np.zeros(n_classes, dtype=np.int64)
    best_impurity = np.inf
    best_pos = -1
    for p in range(1, n):
        left[sl[p - 1]] += 1
        if p < min_leaf or p > n - min_leaf:
            continue
        if sv[p - 1] == sv[p]:
            continue
        sl2 = 0
        sr2 = 0
        for cls in range(n_classes):
            lc = left[cls]
            rc = total[cls] - lc
            sl2 += lc * lc
            sr2 += rc * rc
        score = sl2 / float(p) + sr2 / float(n - p)
        impurity = 1.0 - score / n
        if impurity < best_impurity:
            best_impurity = impurity
            best_pos = p
    if best_pos < 0:
        return False, 0.0, 1.0
    threshold = 0.5 * (sv[best_pos - 1] + sv[best_pos])
    return True, float(threshold), float(best_impurity)


best_numeric_split_numba = _njit(cache=True)(_best_numeric_split_loops)


# ---------------------------------------------------------------------------
# Forest application: route every sample through every tree to a leaf label.
#
# Trees are stored as flat stacked node arrays with per-tree offsets.
# node_feature < 0 marks a leaf. The feature at index cat_feature splits on
# equality (category code) instead of <= threshold.
# ---------------------------------------------------------------------------


def forest_apply_numpy(
    node_feature, node_value, node_left, node_right, node_label, tree_offset, X, cat_feature
):
    n = X.shape[0]
    n_trees = tree_offset.shape[0] - 1
    out = np.empty((n, n_trees), dtype=np.int64)
    for t in range(n_trees):
        base = tree_offset[t]
        cur = np.zeros(n, dtype=np.int64)
        while True:
            feat = node_feature[base + cur]
            internal = feat >= 0
            if not internal.any():
                break
            idx = np.nonzero(internal)[0]
            f = feat[idx]
            v = node_value[base + cur[idx]]
            xv = X[idx, f]
            go_left = np.where(f == cat_feature, xv == v, xv <= v)
            nxt = np.where(
                go_left, node_left[base + cur[idx]], node_right[base + cur[idx]]
            )
            cur[idx] = nxt
        out[:, t] = node_label[base + cur]
    return out


def _forest_apply_loops(
    node_feature, node_value, node_left, node_right, node_label, tree_offset, X, cat_feature
):
    n = X.shape[0]
    n_trees = tree_offset.shape[0] - 1
    out = np.empty((n, n_trees), dtype=np.int64)
    for i in range(n):
        for t in range(n_trees):
            base = tree_offset[t]
            cur = 0
            while node_feature[base + cur] >= 0:
                f = node_feature[base + cur]
                v = node_value[base + cur]
                if f == cat_feature:
                    go_left = X[i, f] == v
                else:
                    go_left = X[i, f] <= v
                if go_left:
                    cur = node_left[base + cur]
                else:
                    cur = node_right[base + cur]
            out[i, t] = node_label[base + cur]
    return out


forest_apply_numba = _njit(cache=True)(_forest_apply_loops)


if USING_NUMBA:
    lstm_grads = lstm_grads_numba
    best_numeric_split = best_numeric_split_numba
    forest_apply = forest_apply_numba
else:
    lstm_grads = lstm_grads_numpy
    best_numeric_split = best_numeric_split_numpy
    forest_apply = forest_apply_numpy
