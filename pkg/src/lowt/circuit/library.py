"""Reversible building blocks: Toffoli ladders, population counters, comparators."""

from __future__ import annotations

import heapq
from collections import deque
from functools import lru_cache
from typing import Sequence

from ..errors import ParameterError
from .ir import Circuit, Gate, TOFFOLI_T_COST, toffoli3_gates

# A control literal: (wire, active_low). active_low means the control fires on |0>.
Control = tuple[int, bool]


class CircuitBuilder:
    """Appends gates and hands out scratch wires.

    Wires ``0..fixed-1`` are reserved by the caller. Scratch wires come from a
    free list, lowest index first, so equal inputs always give equal layouts.
    Every scratch wire must be back in |0> when released.
    """

    def __init__(self, fixed: int):
        self.num_qubits = fixed
        self.fixed = fixed
        self.gates: list[Gate] = []
        self._free: list[int] = []

    def alloc(self) -> int:
        if self._free:
            return heapq.heappop(self._free)
        w = self.num_qubits
        self.num_qubits += 1
        return w

    def release(self, *wires: int) -> None:
        for w in wires:
            if w < self.fixed:
                raise ParameterError(f"wire {w} is not a scratch wire")
            heapq.heappush(self._free, w)

    @property
    def mark(self) -> int:
        return len(self.gates)

    def x(self, q: int) -> None:
        self.gates.append(Gate("X", (q,)))

    def cx(self, c: int, t: int) -> None:
        self.gates.append(Gate("CX", (c, t)))

    def toff(self, a: int, b: int, t: int) -> None:
        self.gates.append(Gate("TOFF3", (a, b, t)))

    def replay_inverse(self, start: int, stop: int | None = None) -> None:
        """Append the inverse of gates[start:stop] (all self-inverse reversible gates)."""
        seg = self.gates[start:stop]
        if any(g.kind not in ("X", "CX", "SWAP", "TOFF3") for g in seg):
            raise ParameterError("replay_inverse only handles self-inverse gates")
        self.gates.extend(reversed(seg))

    def build(self, registers: dict[str, Sequence[int]] | None = None) -> Circuit:
        regs = dict(registers or {})
        used = {w for ws in regs.values() for w in ws}
        scratch = [w for w in range(self.fixed, self.num_qubits) if w not in used]
        if scratch:
            regs["ancilla"] = scratch
        return Circuit(self.num_qubits, tuple(self.gates), regs)


def mcx(b: CircuitBuilder, controls: Sequence[Control], target: int) -> None:
    """``target ^= AND_i [wire_i == (0 if active_low else 1)]``.

    Linear ladder with clean scratch: ``2m-3`` TOFF3 for m >= 2 controls.
    Active-low controls are conjugated by X.
    """
    seen: dict[int, bool] = {}
    for w, low in controls:
        if w == target:
            raise ParameterError("control and target coincide")
        if w in seen and seen[w] != low:
            return  # x AND NOT x: never fires
        seen[w] = low
    lits = list(seen.items())
    lows = [w for w, low in lits if low]
    for w in lows:
        b.x(w)
    wires = [w for w, _ in lits]
    m = len(wires)
    if m == 0:
        b.x(target)
    elif m == 1:
        b.cx(wires[0], target)
    elif m == 2:
        b.toff(wires[0], wires[1], target)
    else:
        anc = [b.alloc() for _ in range(m - 2)]
        start = b.mark
        b.toff(wires[0], wires[1], anc[0])
        for i in range(1, m - 2):
            b.toff(anc[i - 1], wires[i + 1], anc[i])
        stop = b.mark
        b.toff(anc[-1], wires[-1], target)
        b.replay_inverse(start, stop)
        b.release(*anc)
    for w in lows:
        b.x(w)


def toffoli3() -> Circuit:
    """Toff_3 on wires (0, 1; target 2) as an explicit 7-T Clifford+T circuit."""
    return Circuit(3, toffoli3_gates(0, 1, 2), {"controls": (0, 1), "target": (2,)})


def toffoli_ladder(m: int) -> Circuit:
    """C^m X on controls ``0..m-1`` and target ``m`` using ``max(m-2, 0)`` clean ancillas."""
    if m < 1:
        raise ParameterError("toffoli_ladder needs at least one control")
    b = CircuitBuilder(m + 1)
    mcx(b, [(w, False) for w in range(m)], m)
    return b.build({"controls": range(m), "target": (m,)})


def ladder_toffoli_count(m: int) -> int:
    return 0 if m < 2 else 2 * m - 3


# -- population count ------------------------------------------------------------

def popcount(b: CircuitBuilder, bits: Sequence[int]) -> tuple[list[int | None], list[int]]:
    """Carry-save adder tree.

    Returns the binary count, LSB first (None = constant 0), and the scratch
    wires it allocated.

    The input wires are overwritten with intermediate sums. Full adder on
    (a, b, c) with fresh z leaves the sum in c and the carry in z; half adder
    on (a, b) leaves the sum in b.
    """
    if len(set(bits)) != len(bits):
        raise ParameterError("popcount inputs must be distinct wires")
    columns: list[deque[int]] = [deque(bits)]
    carries: list[int] = []
    w = 0
    while w < len(columns):
        col = columns[w]
        while len(col) >= 2:
            if w + 1 == len(columns):
                columns.append(deque())
            z = b.alloc()
            carries.append(z)
            if len(col) >= 3:
                x, y, s = col.popleft(), col.popleft(), col.popleft()
                b.toff(x, y, z)
                b.cx(x, y)
                b.toff(y, s, z)
                b.cx(y, s)
                col.append(s)
            else:
                x, s = col.popleft(), col.popleft()
                b.toff(x, s, z)
                b.cx(x, s)
                col.append(s)
            columns[w + 1].append(z)
        w += 1
    return [col[0] if col else None for col in columns], carries


def popcount_shape(k: int) -> tuple[int, list[bool]]:
    """TOFF3 count of :func:`popcount` on k bits and which output columns hold a wire."""
    sizes = [k]
    total = 0
    w = 0
    while w < len(sizes):
        while sizes[w] >= 2:
            if w + 1 == len(sizes):
                sizes.append(0)
            if sizes[w] >= 3:
                sizes[w] -= 2
                total += 2
            else:
                sizes[w] -= 1
                total += 1
            sizes[w + 1] += 1
        w += 1
    return total, [s > 0 for s in sizes]


def _comparator_terms(count: Sequence[int | None], cutoff: int) -> list[list[Control]]:
    """Disjoint product terms whose XOR is ``[count >= cutoff]``."""
    width = max(len(count), cutoff.bit_length())
    bits = list(count) + [None] * (width - len(count))
    terms: list[list[Control]] = []
    candidates = [j for j in range(width) if not cutoff >> j & 1] + [None]
    for j in candidates:
        # Higher bits equal to the cutoff, bit j set where the cutoff has 0.
        term: list[Control] | None = []
        lo = 0 if j is None else j + 1
        want = [(i, cutoff >> i & 1) for i in range(lo, width)]
        if j is not None:
            want.append((j, 1))
        for i, v in want:
            if bits[i] is None:
                if v:
                    term = None
                    break
            else:
                term.append((bits[i], not v))
        if term is not None:
            terms.append(term)
    return terms


def compare_geq(b: CircuitBuilder, count: Sequence[int | None], cutoff: int, target: int) -> None:
    """``target ^= [count >= cutoff]`` over the binary count wires."""
    if cutoff <= 0:
        b.x(target)
        return
    for term in _comparator_terms(count, cutoff):
        mcx(b, term, target)


def comparator_toffoli_count(k: int, cutoff: int) -> int:
    _, occupied = popcount_shape(k)
    count = [i if occ else None for i, occ in enumerate(occupied)]  # stand-in wires
    return sum(ladder_toffoli_count(len(t)) for t in _comparator_terms(count, cutoff))


def threshold_toffoli_count(k: int, cutoff: int) -> int:
    if cutoff <= 0 or cutoff > k:
        return 0
    return 2 * popcount_shape(k)[0] + comparator_toffoli_count(k, cutoff)


@lru_cache(maxsize=None)
def threshold_t_constant(max_k: int = 4096) -> float:
    """Smallest C with ``T(threshold on k bits) <= C k`` for every k and cutoff up to max_k.

    For each k the worst cutoff is searched; comparator cost depends only on
    the cutoff's bit pattern, and is checked exhaustively for k <= 256 and on
    the all-zero-low-bits worst case beyond.
    """
    best = 0.0
    for k in range(1, max_k + 1):
        toffs, occupied = popcount_shape(k)
        pc = 2 * toffs
        if k <= 256:
            cmp_worst = max(comparator_toffoli_count(k, c) for c in range(1, k + 1))
        else:
            width = len(occupied)
            cmp_worst = (width + 1) * ladder_toffoli_count(width)
        best = max(best, TOFFOLI_T_COST * (pc + cmp_worst) / k)
    return best
