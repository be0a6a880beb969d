"""Hot loop for the bootstrap: trimmed quantile-gap integrals of resampled
empirical measures, for every (replicate, direction) pair.

A resample is represented by its multiplicity vector over the original
points.  Per direction the resampled quantile function is recovered by
scattering run starts into a position buffer and taking a running maximum,
which keeps the inner loops branch-light and L1-resident.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f

        return wrap if not (args and callable(args[0])) else args[0]


@njit(cache=True, fastmath=True)
def _boot_integrals_jit(XsT, YsT, CX, CY, permx, permy, xpos, ypos, w, r, out):
    N = XsT.shape[0]
    B = CX.shape[0]
    n = XsT.shape[1]
    m = YsT.shape[1]
    K = xpos.shape[0]
    xmax = xpos[K - 1]
    ymax = ypos[K - 1]
    mx = np.zeros(n + 1, dtype=np.int32)
    my = np.zeros(m + 1, dtype=np.int32)
    for j in range(N):
        Xj = XsT[j]
        Yj = YsT[j]
        pj = permx[j]
        qj = permy[j]
        for b in range(B):
            for k in range(xmax + 1):
                mx[k] = 0
            cum = 0
            for i in range(n):
                if cum > xmax:
                    break
                mx[cum] = i
                cum += CX[b, pj[i]]
            for k in range(ymax + 1):
                my[k] = 0
            cum = 0
            for i in range(m):
                if cum > ymax:
                    break
                my[cum] = i
                cum += CY[b, qj[i]]
            acc = 0.0
            runx = 0
            runy = 0
            px = 0
            py = 0
            if r == 2.0:
                for k in range(K):
                    tx = xpos[k]
                    while px <= tx:
                        if mx[px] > runx:
                            runx = mx[px]
                        px += 1
                    ty = ypos[k]
                    while py <= ty:
                        if my[py] > runy:
                            runy = my[py]
                        py += 1
                    d = Xj[runx] - Yj[runy]
                    acc += w[k] * d * d
            elif r == 1.0:
                for k in range(K):
                    tx = xpos[k]
                    while px <= tx:
                        if mx[px] > runx:
                            runx = mx[px]
                        px += 1
                    ty = ypos[k]
                    while py <= ty:
                        if my[py] > runy:
                            runy = my[py]
                        py += 1
                    acc += w[k] * abs(Xj[runx] - Yj[runy])
            else:
                for k in range(K):
                    tx = xpos[k]
                    while px <= tx:
                        if mx[px] > runx:
                            runx = mx[px]
                        px += 1
                    ty = ypos[k]
                    while py <= ty:
                        if my[py] > runy:
                            runy = my[py]
                        py += 1
                    acc += w[k] * abs(Xj[runx] - Yj[runy]) ** r
            out[b, j] = acc


def _boot_integrals_numpy(XsT, YsT, CX, CY, permx, permy, xpos, ypos, w, r, out):
    """Reference implementation; also the fallback when numba is absent."""
    N, n = XsT.shape
    m = YsT.shape[1]
    B = CX.shape[0]
    for b in range(B):
        cxm = CX[b][permx]  # (N, n) counts in per-direction sorted order
        cym = CY[b][permy]
        xs = np.repeat(XsT.ravel(), cxm.ravel()).reshape(N, n)
        ys = np.repeat(YsT.ravel(), cym.ravel()).reshape(N, m)
        gaps = np.abs(xs[:, xpos] - ys[:, ypos])
        out[b] = gaps**r @ w


def boot_integrals(XsT, YsT, CX, CY, permx, permy, xpos, ypos, w, r):
    """Trimmed integrals int |F*^{-1} - G*^{-1}|^r du for B resamples along N
    directions; returns a (B, N) array (no 1/(1-2*delta) prefactor).

    ``XsT``/``YsT`` are (N, n)/(N, m) row-sorted projections, ``permx``/``permy``
    the matching argsort permutations, ``CX``/``CY`` (B, n)/(B, m) resample
    multiplicities indexed by original point, and ``(xpos, ypos, w)`` the
    shared trimmed segment grid.
    """
    B, N = CX.shape[0], XsT.shape[0]
    out = np.empty((B, N))
    args = (
        np.ascontiguousarray(XsT),
        np.ascontiguousarray(YsT),
        np.ascontiguousarray(CX, dtype=np.int32),
        np.ascontiguousarray(CY, dtype=np.int32),
        np.ascontiguousarray(permx, dtype=np.int32),
        np.ascontiguousarray(permy, dtype=np.int32),
        np.ascontiguousarray(xpos, dtype=np.int64),
        np.ascontiguousarray(ypos, dtype=np.int64),
        np.ascontiguousarray(w),
        float(r),
        out,
    )
    if HAVE_NUMBA:
        _boot_integrals_jit(*args)
    else:
        _boot_integrals_numpy(*args)
    return out
