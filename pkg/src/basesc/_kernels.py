"""Hot inner loops, each with a numba and a pure-numpy implementation.

The numba versions are used when numba imports cleanly and the environment
variable ``BASESC_DISABLE_NUMBA`` is unset (or ``0``/``false``). Both
implementations follow the same arithmetic and tie-breaking rules so results
agree to rounding; tests run both regardless of the flag.
"""

from __future__ import annotations

import os

import numpy as np

LINKAGE_CODES = {"single": 0, "complete": 1, "average": 2, "ward": 3}

_flag = os.environ.get("BASESC_DISABLE_NUMBA", "").strip().lower()
NUMBA_DISABLED = _flag not in ("", "0", "false", "no")

try:
    import numba
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not NUMBA_DISABLED
BACKEND = "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------- numpy path

def pairwise_sqeuclidean_np(X):
    n = X.shape[0]
    out = np.zeros((n, n))
    for i in range(n - 1):
        diff = X[i + 1:] - X[i]
        row = (diff * diff).sum(axis=1)
        out[i, i + 1:] = row
        out[i + 1:, i] = row
    return out


def pairwise_correlation_np(Z):
    # Z rows are mean-centered and unit-norm
    n = Z.shape[0]
    out = np.zeros((n, n))
    for i in range(n - 1):
        row = 1.0 - Z[i + 1:] @ Z[i]
        np.clip(row, 0.0, 2.0, out=row)
        out[i, i + 1:] = row
        out[i + 1:, i] = row
    return out


def lloyd_np(X, centers, max_iter):
    n, dim = X.shape
    k = centers.shape[0]
    centers = centers.copy()
    labels = np.full(n, -1, dtype=np.int64)
    history = np.empty(max_iter)
    n_iter = 0
    for it in range(max_iter):
        d2 = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new_labels = np.argmin(d2, axis=1)
        mind = d2[np.arange(n), new_labels]
        history[it] = mind.sum()
        n_iter = it + 1
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
        counts = np.bincount(labels, minlength=k)
        for c in range(k):
            if counts[c] == 0:
                # donors must keep at least one member
                far = int(np.argmax(np.where(counts[labels] > 1, mind, -1.0)))
                counts[labels[far]] -= 1
                labels[far] = c
                counts[c] = 1
                mind[far] = 0.0
        for c in range(k):
            centers[c] = X[labels == c].mean(axis=0)
    inertia = ((X - centers[labels]) ** 2).sum()
    return labels, centers, inertia, history[:n_iter]


def cluster_distance_sums_np(D, labels, k):
    onehot = np.zeros((labels.shape[0], k))
    onehot[np.arange(labels.shape[0]), labels] = 1.0
    return D @ onehot


def _lance_williams_np(code, dak, dbk, dab, na, nb, nk):
    if code == 0:
        return np.minimum(dak, dbk)
    if code == 1:
        return np.maximum(dak, dbk)
    if code == 2:
        return (na * dak + nb * dbk) / (na + nb)
    return ((nk + na) * dak + (nk + nb) * dbk - nk * dab) / (nk + na + nb)


def agglomerate_np(D, k, code):
    D = D.copy()
    n = D.shape[0]
    active = np.ones(n, dtype=bool)
    size = np.ones(n)
    np.fill_diagonal(D, np.inf)
    nn = np.argmin(D, axis=1)
    nnd = D[np.arange(n), nn]
    merges = np.empty((max(n - k, 0), 2), dtype=np.int64)
    n_active = n
    step = 0
    while n_active > k:
        cand = np.where(active, nnd, np.inf)
        a = int(np.argmin(cand))
        b = int(nn[a])
        others = active.copy()
        others[a] = others[b] = False
        idx = np.flatnonzero(others)
        new = _lance_williams_np(code, D[a, idx], D[b, idx], D[a, b], size[a], size[b], size[idx])
        D[a, idx] = new
        D[idx, a] = new
        size[a] += size[b]
        active[b] = False
        D[b, :] = np.inf
        D[:, b] = np.inf
        n_active -= 1
        merges[step] = (a, b)
        step += 1
        for j in np.flatnonzero(active):
            if j == a or nn[j] == a or nn[j] == b:
                row = D[j]
                nn[j] = int(np.argmin(row))
                nnd[j] = row[nn[j]]
            elif D[j, a] < nnd[j] or (D[j, a] == nnd[j] and a < nn[j]):
                nn[j] = a
                nnd[j] = D[j, a]
    return merges


def subset_conductances_np(A, chunk=1 << 14):
    n = A.shape[0]
    deg = A.sum(axis=1)
    half = deg.sum() / 2.0
    slack = 1e-12 * deg.sum()
    total = 1 << n
    phi = np.full(total, np.inf)
    bits = (1 << np.arange(n, dtype=np.int64))
    for start in range(1, total - 1, chunk):
        masks = np.arange(start, min(start + chunk, total - 1), dtype=np.int64)
        M = ((masks[:, None] & bits[None, :]) != 0).astype(np.float64)
        vol = M @ deg
        cut = ((M @ A) * (1.0 - M)).sum(axis=1)
        ok = (vol <= half + slack) & (vol > 0.0)
        phi[masks[ok]] = cut[ok] / vol[ok]
    return phi


# ---------------------------------------------------------------- numba path

if HAVE_NUMBA:
    njit = numba.njit(cache=True, nogil=True)

    @njit
    def pairwise_sqeuclidean_nb(X):
        n, m = X.shape
        out = np.zeros((n, n))
        for i in range(n - 1):
            for j in range(i + 1, n):
                s = 0.0
                for l in range(m):
                    t = X[j, l] - X[i, l]
                    s += t * t
                out[i, j] = s
                out[j, i] = s
        return out

    @njit
    def pairwise_correlation_nb(Z):
        n, m = Z.shape
        out = np.zeros((n, n))
        for i in range(n - 1):
            for j in range(i + 1, n):
                s = 0.0
                for l in range(m):
                    s += Z[j, l] * Z[i, l]
                v = 1.0 - s
                if v < 0.0:
                    v = 0.0
                elif v > 2.0:
                    v = 2.0
                out[i, j] = v
                out[j, i] = v
        return out

    @njit
    def lloyd_nb(X, centers, max_iter):
        n, dim = X.shape
        k = centers.shape[0]
        centers = centers.copy()
        labels = np.full(n, -1, dtype=np.int64)
        new_labels = np.empty(n, dtype=np.int64)
        mind = np.empty(n)
        history = np.empty(max_iter)
        counts = np.zeros(k, dtype=np.int64)
        n_iter = 0
        for it in range(max_iter):
            total = 0.0
            changed = False
            for i in range(n):
                best = np.inf
                bc = 0
                for c in range(k):
                    s = 0.0
                    for l in range(dim):
                        t = X[i, l] - centers[c, l]
                        s += t * t
                    if s < best:
                        best = s
                        bc = c
                new_labels[i] = bc
                mind[i] = best
                total += best
                if bc != labels[i]:
                    changed = True
            history[it] = total
            n_iter = it + 1
            if not changed:
                break
            labels[:] = new_labels
            counts[:] = 0
            for i in range(n):
                counts[labels[i]] += 1
            for c in range(k):
                if counts[c] == 0:
                    far = -1
                    for i in range(n):
                        if counts[labels[i]] > 1 and (far < 0 or mind[i] > mind[far]):
                            far = i
                    counts[labels[far]] -= 1
                    labels[far] = c
                    counts[c] = 1
                    mind[far] = 0.0
            centers[:, :] = 0.0
            for i in range(n):
                for l in range(dim):
                    centers[labels[i], l] += X[i, l]
            for c in range(k):
                for l in range(dim):
                    centers[c, l] /= counts[c]
        inertia = 0.0
        for i in range(n):
            for l in range(dim):
                t = X[i, l] - centers[labels[i], l]
                inertia += t * t
        return labels, centers, inertia, history[:n_iter]

    @njit
    def cluster_distance_sums_nb(D, labels, k):
        n = D.shape[0]
        out = np.zeros((n, k))
        for i in range(n):
            for j in range(n):
                out[i, labels[j]] += D[i, j]
        return out

    @njit
    def _lance_williams_nb(code, dak, dbk, dab, na, nb, nk):
        if code == 0:
            return min(dak, dbk)
        if code == 1:
            return max(dak, dbk)
        if code == 2:
            return (na * dak + nb * dbk) / (na + nb)
        return ((nk + na) * dak + (nk + nb) * dbk - nk * dab) / (nk + na + nb)

    @njit
    def _row_nn(D, active, j):
        n = D.shape[0]
        best = np.inf
        bi = -1
        for i in range(n):
            if active[i] and i != j and D[j, i] < best:
                best = D[j, i]
                bi = i
        if bi < 0:
            bi = j
        return bi, best

    @njit
    def agglomerate_nb(D, k, code):
        D = D.copy()
        n = D.shape[0]
        active = np.ones(n, dtype=np.bool_)
        size = np.ones(n)
        nn = np.empty(n, dtype=np.int64)
        nnd = np.empty(n)
        for j in range(n):
            nn[j], nnd[j] = _row_nn(D, active, j)
        merges = np.empty((max(n - k, 0), 2), dtype=np.int64)
        n_active = n
        step = 0
        while n_active > k:
            a = -1
            best = np.inf
            for i in range(n):
                if active[i] and nnd[i] < best:
                    best = nnd[i]
                    a = i
            if a < 0:
                # all remaining distances infinite; merge lowest indices
                for i in range(n):
                    if active[i]:
                        if a < 0:
                            a = i
                        else:
                            nn[a] = i
                            break
            b = nn[a]
            dab = D[a, b]
            for j in range(n):
                if active[j] and j != a and j != b:
                    v = _lance_williams_nb(code, D[a, j], D[b, j], dab, size[a], size[b], size[j])
                    D[a, j] = v
                    D[j, a] = v
            size[a] += size[b]
            active[b] = False
            n_active -= 1
            merges[step, 0] = a
            merges[step, 1] = b
            step += 1
            for j in range(n):
                if not active[j]:
                    continue
                if j == a or nn[j] == a or nn[j] == b:
                    nn[j], nnd[j] = _row_nn(D, active, j)
                elif D[j, a] < nnd[j] or (D[j, a] == nnd[j] and a < nn[j]):
                    nn[j] = a
                    nnd[j] = D[j, a]
        return merges

    @njit
    def subset_conductances_nb(A):
        n = A.shape[0]
        deg = np.zeros(n)
        for i in range(n):
            s = 0.0
            for j in range(n):
                s += A[i, j]
            deg[i] = s
        volv = 0.0
        for i in range(n):
            volv += deg[i]
        half = volv / 2.0
        slack = 1e-12 * volv
        total = 1 << n
        phi = np.full(total, np.inf)
        inside = np.zeros(n, dtype=np.bool_)
        for mask in range(1, total - 1):
            vol = 0.0
            for i in range(n):
                inside[i] = (mask >> i) & 1
                if inside[i]:
                    vol += deg[i]
            if vol > half + slack or vol <= 0.0:
                continue
            cut = 0.0
            for i in range(n):
                if inside[i]:
                    for j in range(n):
                        if not inside[j]:
                            cut += A[i, j]
            phi[mask] = cut / vol
        return phi


def _pick(name):
    if USE_NUMBA:
        return globals()[name + "_nb"]
    return globals()[name + "_np"]


BACKENDS = ("numpy", "numba") if HAVE_NUMBA else ("numpy",)


def get(name: str, backend: str | None = None):
    """Return kernel ``name`` for ``backend`` (default: the active one)."""
    if backend is None:
        return _pick(name)
    if backend not in BACKENDS:
        raise ValueError(f"unknown or unavailable backend {backend!r}; choose from {BACKENDS}")
    suffix = {"numpy": "_np", "numba": "_nb"}[backend]
    return globals()[name + suffix]


pairwise_sqeuclidean = _pick("pairwise_sqeuclidean")
pairwise_correlation = _pick("pairwise_correlation")
lloyd = _pick("lloyd")
cluster_distance_sums = _pick("cluster_distance_sums")
agglomerate = _pick("agglomerate")
subset_conductances = _pick("subset_conductances")
