"""Pure-Python fraction-free sparse row echelon kernel.

Rows are integer sparse vectors ``(cols, vals)`` with strictly increasing
``cols``.  Each incoming row is reduced against the pivot rows found so far
(pivot column = lowest nonzero column of the reduced row), then kept as a new
pivot, dropped as redundant, or reported as the first *bad* row.  A row is bad
when its lowest surviving column equals ``pivot_limit`` (the right-hand-side
column of an augmented system).  Rows whose lowest column lies beyond
``pivot_limit`` are redundant; callers use those columns for bookkeeping tags.

Every stored row is primitive (content 1) with a positive leading entry, so
the output is independent of how intermediate scaling was done.  The compiled
kernel in ``_echelon.pyx`` follows the same contract and returns identical
results.
"""

from __future__ import annotations

from math import gcd

__all__ = ["echelon"]


def _normalize(row: dict[int, int]) -> dict[int, int]:
    g = gcd(*row.values())
    lead = row[min(row)]
    if lead < 0:
        g = -g
    if g != 1:
        row = {k: v // g for k, v in row.items()}
    return row


def echelon(rows, pivot_limit: int, ncols_total: int | None = None):
    """Row-reduce ``rows`` in order.

    Returns ``(pivots, sources, bad_index, bad_row)`` where ``pivots`` is the
    list of pivot rows as ``(cols, vals)`` in discovery order, ``sources`` the
    input index of each, and ``bad_index`` is -1 unless a bad row stopped the
    scan.  ``ncols_total`` is accepted for signature parity with the compiled
    kernel.
    """
    by_col: dict[int, dict[int, int]] = {}
    pivots = []
    sources = []
    for idx, (cols, vals) in enumerate(rows):
        row = {c: v for c, v in zip(cols, vals) if v}
        while row:
            c = min(row)
            if c >= pivot_limit:
                break
            piv = by_col.get(c)
            if piv is None:
                break
            a = row[c]
            p = piv[c]
            g = gcd(a, p)
            pa, aa = p // g, a // g
            if pa != 1:
                row = {k: v * pa for k, v in row.items()}
            for k, v in piv.items():
                nv = row.get(k, 0) - aa * v
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
            if row:
                g = gcd(*row.values())
                if g != 1:
                    row = {k: v // g for k, v in row.items()}
        if not row:
            continue
        row = _normalize(row)
        c = min(row)
        if c < pivot_limit:
            by_col[c] = row
            keys = sorted(row)
            pivots.append((keys, [row[k] for k in keys]))
            sources.append(idx)
        elif c == pivot_limit:
            keys = sorted(row)
            return pivots, sources, idx, (keys, [row[k] for k in keys])
    return pivots, sources, -1, None
