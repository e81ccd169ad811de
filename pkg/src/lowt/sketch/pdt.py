"""Brute-force non-adaptive parity decision tree depth."""

from __future__ import annotations

from itertools import combinations, product
from typing import Iterator

import numpy as np

from ..boolfn import BooleanFunction
from ..errors import ResourceError

PDT_MAX_ARITY = 6


def rref_bases(n: int, k: int) -> Iterator[tuple[int, ...]]:
    """Every k-dimensional subspace of F_2^n, once, as its reduced row-echelon basis.

    Row i has its pivot at bit ``p_i``, is zero on the other pivots, and is
    free on the non-pivot bits below ``p_i``.
    """
    for pivots in combinations(range(n), k):
        pivot_set = set(pivots)
        free = [[b for b in range(p) if b not in pivot_set] for p in pivots]
        choices = [range(1 << len(fb)) for fb in free]
        for picks in product(*choices):
            rows = []
            for p, fb, pick in zip(pivots, free, picks):
                row = 1 << p
                for j, b in enumerate(fb):
                    if pick >> j & 1:
                        row |= 1 << b
                rows.append(row)
            yield tuple(rows)


def determined_by(f: BooleanFunction, masks: tuple[int, ...]) -> bool:
    """True iff f(x) is a function of (XOR_{S}(x) for S in masks)."""
    xs = np.arange(f.size, dtype=np.int64)
    code = np.zeros(f.size, dtype=np.int64)
    for i, S in enumerate(masks):
        code |= (np.bitwise_count(xs & S) & 1).astype(np.int64) << i
    classes = 1 << len(masks)
    ones = np.bincount(code, weights=f.table, minlength=classes)
    sizes = np.bincount(code, minlength=classes)
    return bool(((ones == 0) | (ones == sizes)).all())


def pdt_min_depth(f: BooleanFunction) -> int:
    """Least k such that some k parities determine f (searched in increasing k)."""
    if f.n > PDT_MAX_ARITY:
        raise ResourceError(f"brute-force PDT search supports n <= {PDT_MAX_ARITY}, got {f.n}")
    for k in range(f.n + 1):
        if any(determined_by(f, basis) for basis in rref_bases(f.n, k)):
            return k
    raise AssertionError("unreachable: the full basis determines any function")
