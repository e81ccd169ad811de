"""Slow, obviously-correct reference implementations used only by the tests."""

from __future__ import annotations

from fractions import Fraction
from itertools import product


def parity(S: int, x: int) -> int:
    return bin(S & x).count("1") % 2


def fourier_coeff(table, n: int, S: int) -> Fraction:
    return Fraction(sum(v * (-1) ** parity(S, x) for x, v in enumerate(table)), 2**n)


def one_norm(table, n: int) -> Fraction:
    return sum((abs(fourier_coeff(table, n, S)) for S in range(2**n)), Fraction(0))


def rank_gf2(rows) -> int:
    rows = list(rows)
    rank = 0
    width = max((r.bit_length() for r in rows), default=0)
    for col in range(width):
        pivot = next((i for i in range(rank, len(rows)) if rows[i] >> col & 1), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i] >> col & 1:
                rows[i] ^= rows[rank]
        rank += 1
    return rank


def pdt_depth(table, n: int) -> int:
    """Smallest k with some k masks whose parities determine f (plain itertools search)."""
    for k in range(n + 1):
        for masks in product(range(2**n), repeat=k):
            seen = {}
            ok = True
            for x in range(2**n):
                key = tuple(parity(S, x) for S in masks)
                if seen.setdefault(key, table[x]) != table[x]:
                    ok = False
                    break
            if ok:
                return k
    return n


def sketch_error_by_enumeration(n, k, x, truth, weights, inner):
    """Sum of weight over all k-tuples drawn from ``weights`` (mask -> prob) where inner errs."""
    err = Fraction(0)
    items = list(weights.items())
    for combo in product(items, repeat=k):
        p = Fraction(1)
        for _, w in combo:
            p *= w
        bits = [parity(S, x) for S, _ in combo]
        if inner(bits, [S for S, _ in combo]) != truth:
            err += p
    return err
