"""Clifford+T circuit values and T-count accounting."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from ..errors import ParameterError

GATE_ARITY = {
    "H": 1, "S": 1, "SDG": 1, "X": 1, "Y": 1, "Z": 1, "T": 1, "TDG": 1,
    "CX": 2, "CZ": 2, "SWAP": 2,
    "TOFF3": 3,
}
CLIFFORD_KINDS = frozenset({"H", "S", "SDG", "X", "Y", "Z", "CX", "CZ", "SWAP"})
REVERSIBLE_KINDS = frozenset({"X", "CX", "SWAP", "TOFF3"})
T_KINDS = frozenset({"T", "TDG"})
TOFFOLI_T_COST = 7


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]

    def __post_init__(self):
        arity = GATE_ARITY.get(self.kind)
        if arity is None:
            raise ParameterError(f"unknown gate kind {self.kind!r}")
        if len(self.qubits) != arity:
            raise ParameterError(f"{self.kind} takes {arity} qubit(s), got {len(self.qubits)}")
        if len(set(self.qubits)) != arity:
            raise ParameterError(f"{self.kind} qubits must be distinct: {self.qubits}")
        if any(q < 0 for q in self.qubits):
            raise ParameterError("qubit indices must be non-negative")

    def __str__(self) -> str:
        return f"{self.kind} {','.join(map(str, self.qubits))}"


@dataclass(frozen=True)
class Circuit:
    """Immutable gate list on ``num_qubits`` wires with named registers.

    ``registers`` maps a label (``input``, ``target``, ``parity``, ...) to a
    tuple of wire indices; labels are disjoint.
    """

    num_qubits: int
    gates: tuple[Gate, ...] = ()
    registers: Mapping[str, tuple[int, ...]] = field(default_factory=dict)

    def __post_init__(self):
        if self.num_qubits < 0:
            raise ParameterError("num_qubits must be non-negative")
        for g in self.gates:
            if max(g.qubits) >= self.num_qubits:
                raise ParameterError(f"gate {g} exceeds {self.num_qubits} wires")
        seen: set[int] = set()
        regs = {}
        for name, wires in self.registers.items():
            wires = tuple(int(w) for w in wires)
            if any(not 0 <= w < self.num_qubits for w in wires):
                raise ParameterError(f"register {name!r} has out-of-range wires")
            if seen.intersection(wires) or len(set(wires)) != len(wires):
                raise ParameterError(f"register {name!r} overlaps another register")
            seen.update(wires)
            regs[name] = wires
        object.__setattr__(self, "registers", regs)

    @property
    def macro_expanded(self) -> bool:
        return all(g.kind != "TOFF3" for g in self.gates)

    def __len__(self) -> int:
        return len(self.gates)

    def inverse(self) -> "Circuit":
        flip = {"S": "SDG", "SDG": "S", "T": "TDG", "TDG": "T"}
        gates = tuple(Gate(flip.get(g.kind, g.kind), g.qubits) for g in reversed(self.gates))
        return Circuit(self.num_qubits, gates, self.registers)

    def with_gates(self, gates: Iterable[Gate]) -> "Circuit":
        return Circuit(self.num_qubits, tuple(gates), self.registers)

    def remap(self, wires: Mapping[int, int] | list[int]) -> tuple[Gate, ...]:
        """Gates with each wire q replaced by ``wires[q]``."""
        return tuple(Gate(g.kind, tuple(wires[q] for q in g.qubits)) for g in self.gates)


@dataclass(frozen=True)
class TCountReport:
    t_count: int
    toff3_count: int
    cx_count: int
    clifford_count: int
    gate_count: int

    def to_json(self) -> dict:
        return {"t_count": self.t_count, "toff3_count": self.toff3_count, "cx_count": self.cx_count,
                "clifford_count": self.clifford_count, "gate_count": self.gate_count}


def t_count(c: Circuit) -> TCountReport:
    """Actual T-count: ``#T + #TDG + 7 #TOFF3`` (macros priced by their 7-T expansion)."""
    tally = Counter(g.kind for g in c.gates)
    toff = tally["TOFF3"]
    return TCountReport(
        t_count=tally["T"] + tally["TDG"] + TOFFOLI_T_COST * toff,
        toff3_count=toff,
        cx_count=tally["CX"],
        clifford_count=sum(v for k, v in tally.items() if k in CLIFFORD_KINDS),
        gate_count=len(c.gates),
    )


def toffoli3_gates(a: int, b: int, t: int) -> tuple[Gate, ...]:
    """Phase-exact 7-T Toffoli on controls a, b and target t (15 gates)."""
    seq = [
        ("H", t), ("CX", b, t), ("TDG", t), ("CX", a, t), ("T", t), ("CX", b, t),
        ("TDG", t), ("CX", a, t), ("T", b), ("T", t), ("H", t), ("CX", a, b),
        ("T", a), ("TDG", b), ("CX", a, b),
    ]
    return tuple(Gate(s[0], tuple(s[1:])) for s in seq)


def expand_macros(c: Circuit) -> Circuit:
    """Replace each TOFF3 by its 15-gate Clifford+T decomposition."""
    if c.macro_expanded:
        return c
    out: list[Gate] = []
    for g in c.gates:
        if g.kind == "TOFF3":
            out.extend(toffoli3_gates(*g.qubits))
        else:
            out.append(g)
    return c.with_gates(out)
