"""Pure-numpy implementations of the hot kernels.

These mirror the compiled versions in ``_speedups`` operation for operation:
identical arithmetic expressions, identical tie-breaking (first maximum),
identical consumption of the pre-drawn uniforms. Either backend must produce
bit-identical results for the same inputs.
"""
from __future__ import annotations

import numpy as np


def scan_best_case(row_loc, row_time, row_soc, case_loc, case_time, case_soc):
    """Index and value of the case maximizing mean per-dimension concept similarity.

    ``row_*`` are similarity-matrix rows for the query concepts; ``case_*`` are
    the per-case concept indices. Ties go to the lowest case index.
    """
    sims = (row_loc[case_loc] + row_time[case_time] + row_soc[case_soc]) / 3.0
    i = int(np.argmax(sims))
    return i, float(sims[i])


def select_slate(clicks, recoms, log_t, use_bonus, eps, qs, us, out):
    """Fill ``out`` with document indices chosen one slot at a time.

    Per slot k: if qs[k] > eps take the argmax of the selection index over the
    remaining pool, otherwise take the us[k]-quantile position of the remaining
    pool. The selection index is mean reward (clicks/recoms, 0 when untried)
    plus, when use_bonus is set, sqrt(2*log_t/recoms) with untried documents
    forced to +inf. Returns the number of exploration slots taken.
    """
    n = clicks.shape[0]
    slots = out.shape[0]
    b = np.zeros(n)
    tried = recoms > 0.0
    b[tried] = clicks[tried] / recoms[tried]
    if use_bonus:
        b[tried] += np.sqrt(2.0 * log_t / recoms[tried])
        b[~tried] = np.inf
    avail = np.ones(n, dtype=bool)
    explored = 0
    for k in range(slots):
        if qs[k] > eps:
            masked = np.where(avail, b, -np.inf)
            pick = int(np.argmax(masked))
        else:
            idx = np.flatnonzero(avail)
            j = int(us[k] * idx.shape[0])
            if j >= idx.shape[0]:
                j = idx.shape[0] - 1
            pick = int(idx[j])
            explored += 1
        out[k] = pick
        avail[pick] = False
    return explored
