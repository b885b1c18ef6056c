"""Hot integer kernels with a numba path and a pure-numpy fallback.

The backend is picked once at import time.  Set ``TPLKIT_NUMBA=0`` to force
the numpy versions (useful for debugging and for the benchmark).  If numba
cannot be imported the numpy versions are used silently.

All kernels work on small dense 0/1 (or small nonnegative) int64 matrices.
"""
from __future__ import annotations

import os

import numpy as np

_WANT_NUMBA = os.environ.get("TPLKIT_NUMBA", "1").strip().lower() not in ("0", "false", "no", "off")

try:  # pragma: no cover - depends on the environment
    if not _WANT_NUMBA:
        raise ImportError
    import numba as _nb

    njit = _nb.njit(cache=False, nogil=True)
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _nb = None
    HAVE_NUMBA = False

    def njit(fn):
        return fn


BACKEND = "numba" if HAVE_NUMBA else "numpy"

# Matrix powers are only attempted in int64 when every entry of A^k provably
# fits; callers fall back to exact Python integers otherwise.
INT64_SAFE = 2**62


def power_bound_ok(a: np.ndarray, kmax: int) -> bool:
    """True when all entries of A^k (k <= kmax) are guaranteed < 2**62."""
    n = a.shape[0]
    m = int(a.max()) if a.size else 0
    if m == 0:
        return True
    # |(A^k)_ij| <= (n*m)^k
    return (n * m) ** kmax < INT64_SAFE


# ---------------------------------------------------------------------------
# traces of matrix powers


def _power_traces_np(a, kmax):
    out = np.zeros(kmax, dtype=np.int64)
    p = np.eye(a.shape[0], dtype=np.int64)
    for k in range(kmax):
        p = p @ a
        out[k] = np.trace(p)
    return out


@njit
def _power_traces_nb(a, kmax):
    n = a.shape[0]
    out = np.zeros(kmax, dtype=np.int64)
    p = np.eye(n, dtype=np.int64)
    q = np.zeros((n, n), dtype=np.int64)
    for k in range(kmax):
        for i in range(n):
            for j in range(n):
                s = 0
                for l in range(n):
                    s += p[i, l] * a[l, j]
                q[i, j] = s
        t = 0
        for i in range(n):
            t += q[i, i]
            for j in range(n):
                p[i, j] = q[i, j]
        out[k] = t
    return out


# ---------------------------------------------------------------------------
# brute-force closed path enumeration (depth-first, explicit stack)


def _closed_paths_np(a, k):
    n = a.shape[0]
    total = 0
    succ = [np.flatnonzero(a[i]) for i in range(n)]
    for start in range(n):
        # stack of (vertex, depth, multiplicity)
        stack = [(start, 0, 1)]
        while stack:
            v, d, mult = stack.pop()
            if d == k - 1:
                total += mult * int(a[v, start])
                continue
            for w in succ[v]:
                stack.append((int(w), d + 1, mult * int(a[v, w])))
    return total


@njit
def _closed_paths_nb(a, k):
    n = a.shape[0]
    total = 0
    path = np.zeros(k + 1, dtype=np.int64)
    nxt = np.zeros(k + 1, dtype=np.int64)
    mult = np.ones(k + 1, dtype=np.int64)
    for start in range(n):
        path[0] = start
        nxt[0] = 0
        mult[0] = 1
        d = 0
        while d >= 0:
            if d == k - 1:
                total += mult[d] * a[path[d], start]
                d -= 1
                continue
            v = path[d]
            w = nxt[d]
            while w < n and a[v, w] == 0:
                w += 1
            if w == n:
                d -= 1
                continue
            nxt[d] = w + 1
            path[d + 1] = w
            nxt[d + 1] = 0
            mult[d + 1] = mult[d] * a[v, w]
            d += 1
    return total


# ---------------------------------------------------------------------------
# equitable colour refinement for canonical labelling
#
# Colours are cell start positions: a vertex of colour c lives in a cell that
# occupies positions c .. c+size-1 of the ordered partition.  The refined
# colouring depends only on the isomorphism class of (matrix, colouring).


def _refine_np(a, colors):
    n = a.shape[0]
    colors = colors.copy()
    ncells = len(np.unique(colors))
    while True:
        onehot = np.zeros((n, n), dtype=np.int64)
        onehot[np.arange(n), colors] = 1
        outc = a @ onehot  # outc[v, c] = edges v -> cell c
        inc = a.T @ onehot
        keys = np.concatenate([colors[:, None], outc, inc], axis=1)
        order = np.lexsort(keys.T[::-1])
        new = np.empty(n, dtype=np.int64)
        start = 0
        for pos in range(n):
            v = order[pos]
            if pos > 0 and not np.array_equal(keys[v], keys[order[pos - 1]]):
                start = pos
            new[v] = start
        colors = new
        m = len(np.unique(colors))
        if m == ncells:
            return colors
        ncells = m


@njit
def _row_less(keys, x, y):
    for j in range(keys.shape[1]):
        if keys[x, j] < keys[y, j]:
            return True
        if keys[x, j] > keys[y, j]:
            return False
    return False


@njit
def _refine_nb(a, colors):
    n = a.shape[0]
    colors = colors.copy()
    seen = np.zeros(n, dtype=np.int64)
    ncells = 0
    for v in range(n):
        if seen[colors[v]] == 0:
            seen[colors[v]] = 1
            ncells += 1
    keys = np.zeros((n, 2 * n + 1), dtype=np.int64)
    order = np.zeros(n, dtype=np.int64)
    while True:
        keys[:, :] = 0
        for v in range(n):
            keys[v, 0] = colors[v]
            for w in range(n):
                if a[v, w] != 0:
                    keys[v, 1 + colors[w]] += a[v, w]
                    keys[w, 1 + n + colors[v]] += a[v, w]
        # insertion sort of vertices by key rows (stable, n is small)
        for i in range(n):
            order[i] = i
        for i in range(1, n):
            cur = order[i]
            j = i - 1
            while j >= 0 and _row_less(keys, cur, order[j]):
                order[j + 1] = order[j]
                j -= 1
            order[j + 1] = cur
        new = np.zeros(n, dtype=np.int64)
        start = 0
        m = 1
        for pos in range(n):
            v = order[pos]
            if pos > 0:
                u = order[pos - 1]
                same = True
                for j in range(keys.shape[1]):
                    if keys[v, j] != keys[u, j]:
                        same = False
                        break
                if not same:
                    start = pos
                    m += 1
            new[v] = start
        colors = new
        if m == ncells:
            return colors
        ncells = m


def _permuted_key_np(a, perm):
    return a[np.ix_(perm, perm)].ravel()


@njit
def _permuted_key_nb(a, perm):
    n = perm.shape[0]
    out = np.empty(n * n, dtype=np.int64)
    for i in range(n):
        for j in range(n):
            out[i * n + j] = a[perm[i], perm[j]]
    return out


if HAVE_NUMBA:
    power_traces = _power_traces_nb
    closed_path_count = _closed_paths_nb
    refine = _refine_nb
    permuted_key = _permuted_key_nb
else:  # pragma: no cover
    power_traces = _power_traces_np
    closed_path_count = _closed_paths_np
    refine = _refine_np
    permuted_key = _permuted_key_np

NUMPY_KERNELS = {
    "power_traces": _power_traces_np,
    "closed_path_count": _closed_paths_np,
    "refine": _refine_np,
    "permuted_key": _permuted_key_np,
}
NUMBA_KERNELS = (
    {
        "power_traces": _power_traces_nb,
        "closed_path_count": _closed_paths_nb,
        "refine": _refine_nb,
        "permuted_key": _permuted_key_nb,
    }
    if HAVE_NUMBA
    else {}
)


def set_threads(n: int | None = None) -> None:
    """Cap numba worker threads (reads ``TPLKIT_THREADS`` when ``n`` is None)."""
    if n is None:
        raw = os.environ.get("TPLKIT_THREADS")
        if not raw:
            return
        n = int(raw)
    if HAVE_NUMBA and n > 0:
        _nb.set_num_threads(min(n, _nb.config.NUMBA_NUM_THREADS))
