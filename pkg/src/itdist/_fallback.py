"""Pure numpy versions of the hot kernels.

These are used when the compiled extension is missing, or when the
environment variable ``ITDIST_PURE`` is set.  Both versions must agree
bit for bit; the benchmark in ``benchmarks/`` compares their speed.
"""

import numpy as np


def rref_inplace(A, p):
    """Row reduce ``A`` (int64, entries in [0, p)) in place.

    Returns ``(rank, pivots)`` where ``pivots`` is a list of pivot columns.
    After the call the first ``rank`` rows hold the reduced echelon form
    and the remaining rows are zero.
    """
    rows, cols = A.shape
    r = 0
    pivots = []
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(A[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            A[[r, i]] = A[[i, r]]
        inv = pow(int(A[r, c]), p - 2, p)
        A[r, c:] = (A[r, c:] * inv) % p
        col = A[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            A[np.ix_(hit, np.arange(c, cols))] = (
                A[np.ix_(hit, np.arange(c, cols))]
                - np.outer(col[hit], A[r, c:])
            ) % p
        pivots.append(c)
        r += 1
    return r, pivots
