"""Float transition tables and the batch walk, in numba and numpy flavours.

Both walks consume the same pre-drawn uniforms and make the same float
comparisons, so for a given uniform matrix they return identical arrays.
"""

from __future__ import annotations

import numpy as np

from ._accel import njit, resolve

# stats columns
FINAL, NCAT, NRET, CUM, WAIT, FIRST = range(6)
NSTATS = 6


def float_table(jumps: np.ndarray, jw: np.ndarray, wq: float, permitted: np.ndarray,
                n: int, start: np.ndarray) -> np.ndarray:
    """Rows T[m][k] (suffix weight of length m from altitude k), each scaled to max 1.

    Only ratios inside a row are ever used, so the per-row scale is harmless
    and keeps everything inside double range.
    """
    W = len(permitted)
    T = np.zeros((n + 1, W))
    T[0] = start
    for m in range(1, n + 1):
        prev = T[m - 1]
        row = np.zeros(W)
        for j, w in zip(jumps.tolist(), jw.tolist()):
            lo, hi = max(0, -j), min(W, W - j)
            row[lo:hi] += w * prev[lo + j: hi + j]
        row[permitted] += wq * prev[0]
        top = row.max()
        T[m] = row / top if top > 0 else row
    return T


@njit(cache=True, nogil=True)
def _walk_numba(T, jumps, jw, wq, permitted, U, stats, hist):
    trials, n = U.shape
    W = T.shape[1]
    nj = jumps.shape[0]
    cum = np.empty(nj + 1)
    for t in range(trials):
        alt = 0
        ncat = 0
        nret = 0
        csum = 0
        wait = 0
        first = 0
        for i in range(n):
            row = n - i - 1
            acc = 0.0
            last = -1
            for a in range(nj):
                k = alt + jumps[a]
                w = 0.0
                if k >= 0 and k < W:
                    w = jw[a] * T[row, k]
                acc += w
                cum[a] = acc
                if w > 0.0:
                    last = a
            w = 0.0
            if permitted[alt]:
                w = wq * T[row, 0]
            acc += w
            cum[nj] = acc
            if w > 0.0:
                last = nj
            thr = U[t, i] * acc
            pick = 0
            while pick <= nj and cum[pick] <= thr:
                pick += 1
            if pick > nj:
                pick = last
            if pick == nj:
                if ncat == 0:
                    wait = i + 1
                    first = alt
                ncat += 1
                csum += alt
                hist[alt] += 1
                alt = 0
            else:
                alt += jumps[pick]
            if alt == 0:
                nret += 1
        stats[t, FINAL] = alt
        stats[t, NCAT] = ncat
        stats[t, NRET] = nret
        stats[t, CUM] = csum
        stats[t, WAIT] = wait
        stats[t, FIRST] = first


def _walk_numpy(T, jumps, jw, wq, permitted, U, stats, hist):
    trials, n = U.shape
    W = T.shape[1]
    nj = len(jumps)
    alt = np.zeros(trials, dtype=np.int64)
    st = np.zeros((trials, NSTATS), dtype=np.int64)
    rows_idx = np.arange(trials)
    wts = np.empty((trials, nj + 1))
    for i in range(n):
        Trow = T[n - i - 1]
        for a in range(nj):
            k = alt + jumps[a]
            ok = (k >= 0) & (k < W)
            wts[:, a] = np.where(ok, jw[a] * Trow[np.clip(k, 0, W - 1)], 0.0)
        wts[:, nj] = np.where(permitted[alt], wq * Trow[0], 0.0)
        cum = np.cumsum(wts, axis=1)
        thr = U[:, i] * cum[:, nj]
        pick = (cum <= thr[:, None]).sum(axis=1)
        over = pick > nj
        if over.any():
            pos = wts[over] > 0
            pick[over] = nj - np.argmax(pos[:, ::-1], axis=1)
        is_cat = pick == nj
        if is_cat.any():
            h = alt[is_cat]
            newcat = is_cat & (st[:, NCAT] == 0)
            st[newcat, WAIT] = i + 1
            st[newcat, FIRST] = alt[newcat]
            st[is_cat, NCAT] += 1
            st[is_cat, CUM] += h
            hist += np.bincount(h, minlength=len(hist)).astype(hist.dtype)
        step = np.where(is_cat, -alt, jumps[np.minimum(pick, nj - 1)])
        alt = alt + step
        st[:, NRET] += alt == 0
    st[:, FINAL] = alt
    stats[rows_idx] = st


def walk_batch(T, jumps, jw, wq, permitted, U, backend: str | None = None):
    """Walk ``len(U)`` paths through the table; returns ``(stats, size_hist)``."""
    U = np.ascontiguousarray(U, dtype=np.float64)
    stats = np.zeros((U.shape[0], NSTATS), dtype=np.int64)
    hist = np.zeros(T.shape[1], dtype=np.int64)
    fn = _walk_numba if resolve(backend) == "numba" else _walk_numpy
    fn(T, np.asarray(jumps, dtype=np.int64), np.asarray(jw, dtype=np.float64), float(wq),
       np.asarray(permitted, dtype=np.bool_), U, stats, hist)
    return stats, hist
