"""Small dense simplex for problems  max c.x  s.t.  A x <= b, x >= 0  with
b >= 0, so the origin is a basic feasible start (no phase 1). Bland's rule
keeps the tableau from cycling; unboundedness is reported when an improving
column has no positive pivot entries."""

from __future__ import annotations

import numpy as np

OPTIMAL = "optimal"
UNBOUNDED = "unbounded"


def simplex_max(c, a, b, tol: float = 1e-9, max_pivots: int = 100_000):
    """Returns (status, x, value); x is None when unbounded."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    m, n = a.shape
    if np.any(b < -tol):
        raise ValueError("simplex_max expects b >= 0")
    # tableau: [A | I | b] with objective row [-c | 0 | 0]
    tab = np.zeros((m + 1, n + m + 1))
    tab[:m, :n] = a
    tab[:m, n:n + m] = np.eye(m)
    tab[:m, -1] = b
    tab[m, :n] = -c
    basis = list(range(n, n + m))
    for _ in range(max_pivots):
        reduced = tab[m, :-1]
        enter = -1
        for j in range(n + m):  # Bland: smallest improving index
            if reduced[j] < -tol:
                enter = j
                break
        if enter < 0:
            x = np.zeros(n + m)
            x[basis] = tab[:m, -1]
            return OPTIMAL, x[:n], float(tab[m, -1])
        col = tab[:m, enter]
        mask = col > tol
        if not mask.any():
            return UNBOUNDED, None, float("inf")
        ratios = np.full(m, np.inf)
        ratios[mask] = tab[:m, -1][mask] / col[mask]
        best = np.min(ratios)
        # Bland tie-break: smallest basis index among the minimal ratios
        cand = [i for i in range(m) if ratios[i] <= best + tol]
        leave = min(cand, key=lambda i: basis[i])
        piv = tab[leave, enter]
        tab[leave] /= piv
        for i in range(m + 1):
            if i != leave and abs(tab[i, enter]) > 0:
                tab[i] -= tab[i, enter] * tab[leave]
        basis[leave] = enter
    raise RuntimeError("simplex did not terminate (pivot cap reached)")
