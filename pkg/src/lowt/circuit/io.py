"""Circuit serialization: text gate list, JSON, and a QASM-like export."""

from __future__ import annotations

import json
import re
from typing import Any

from ..errors import CircuitSyntaxError, ParameterError
from .ir import GATE_ARITY, Circuit, Gate

FORMAT_TAG = "lowt-circuit"
FORMAT_VERSION = 1

_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_\-]*$")


def _ranges(wires: tuple[int, ...]) -> str:
    parts = []
    i = 0
    while i < len(wires):
        j = i
        while j + 1 < len(wires) and wires[j + 1] == wires[j] + 1:
            j += 1
        parts.append(str(wires[i]) if i == j else f"{wires[i]}-{wires[j]}")
        i = j + 1
    return ",".join(parts)


def to_text(c: Circuit) -> str:
    lines = [f"qubits {c.num_qubits}"]
    for name, wires in c.registers.items():
        lines.append(f"register {name} {_ranges(wires)}".rstrip())
    lines.extend(str(g) for g in c.gates)
    return "\n".join(lines) + "\n"


def _parse_int(tok: str, lineno: int) -> int:
    if not tok.isdigit():
        raise CircuitSyntaxError(f"expected a wire index, got {tok!r}", lineno)
    return int(tok)


def _parse_wires(spec: str, lineno: int) -> tuple[int, ...]:
    out: list[int] = []
    for part in spec.split(","):
        part = part.strip()
        if "-" in part:
            lo, _, hi = part.partition("-")
            a, b = _parse_int(lo, lineno), _parse_int(hi, lineno)
            if b < a:
                raise CircuitSyntaxError(f"empty range {part!r}", lineno)
            out.extend(range(a, b + 1))
        else:
            out.append(_parse_int(part, lineno))
    return tuple(out)


def parse_text(text: str) -> Circuit:
    num_qubits: int | None = None
    registers: dict[str, tuple[int, ...]] = {}
    gates: list[Gate] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "qubits":
            if num_qubits is not None:
                raise CircuitSyntaxError("duplicate qubits header", lineno)
            if gates or registers:
                raise CircuitSyntaxError("qubits header must come first", lineno)
            num_qubits = _parse_int(rest, lineno)
            continue
        if num_qubits is None:
            raise CircuitSyntaxError("missing 'qubits N' header", lineno)
        if head == "register":
            if gates:
                raise CircuitSyntaxError("register lines must precede gates", lineno)
            name, _, spec = rest.partition(" ")
            if not _NAME.match(name):
                raise CircuitSyntaxError(f"bad register name {name!r}", lineno)
            if name in registers:
                raise CircuitSyntaxError(f"duplicate register {name!r}", lineno)
            registers[name] = _parse_wires(spec, lineno) if spec.strip() else ()
            continue
        kind = head.upper()
        if kind not in GATE_ARITY or head != kind:
            raise CircuitSyntaxError(f"unknown gate {head!r}", lineno)
        if not rest:
            raise CircuitSyntaxError(f"{kind} needs qubit operands", lineno)
        qubits = tuple(_parse_int(t.strip(), lineno) for t in rest.split(","))
        try:
            g = Gate(kind, qubits)
        except ParameterError as exc:
            raise CircuitSyntaxError(str(exc), lineno) from None
        if max(qubits) >= num_qubits:
            raise CircuitSyntaxError(f"wire {max(qubits)} exceeds {num_qubits} qubits", lineno)
        gates.append(g)
    if num_qubits is None:
        raise CircuitSyntaxError("missing 'qubits N' header", 1)
    try:
        return Circuit(num_qubits, tuple(gates), registers)
    except ParameterError as exc:
        raise CircuitSyntaxError(str(exc), 0) from None


def to_json(c: Circuit) -> dict[str, Any]:
    return {
        "format": FORMAT_TAG,
        "version": FORMAT_VERSION,
        "num_qubits": c.num_qubits,
        "registers": {k: list(v) for k, v in c.registers.items()},
        "gates": [[g.kind, *g.qubits] for g in c.gates],
    }


def from_json(data: dict[str, Any]) -> Circuit:
    if data.get("format") != FORMAT_TAG:
        raise ParameterError("not a circuit document")
    gates = tuple(Gate(str(g[0]), tuple(int(q) for q in g[1:])) for g in data["gates"])
    regs = {k: tuple(v) for k, v in data.get("registers", {}).items()}
    return Circuit(int(data["num_qubits"]), gates, regs)


_QASM_NAMES = {"H": "h", "S": "s", "SDG": "sdg", "X": "x", "Y": "y", "Z": "z", "T": "t",
               "TDG": "tdg", "CX": "cx", "CZ": "cz", "SWAP": "swap", "TOFF3": "ccx"}


def to_qasm_like(c: Circuit) -> str:
    """OpenQASM-2-flavoured listing (export only)."""
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{c.num_qubits}];"]
    for name, wires in c.registers.items():
        lines.append(f"// register {name}: {_ranges(wires)}")
    for g in c.gates:
        lines.append(f"{_QASM_NAMES[g.kind]} {','.join(f'q[{q}]' for q in g.qubits)};")
    return "\n".join(lines) + "\n"


def serialize(c: Circuit, fmt: str = "text") -> bytes:
    if fmt == "text":
        return to_text(c).encode()
    if fmt == "json":
        return (json.dumps(to_json(c), sort_keys=True) + "\n").encode()
    if fmt == "qasm-like":
        return to_qasm_like(c).encode()
    raise ParameterError(f"unknown circuit format {fmt!r}")


def parse(data: bytes | str, fmt: str = "text") -> Circuit:
    text = data.decode() if isinstance(data, bytes) else data
    if fmt == "text":
        return parse_text(text)
    if fmt == "json":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CircuitSyntaxError(exc.msg, exc.lineno) from None
        return from_json(doc)
    raise ParameterError(f"cannot parse circuit format {fmt!r}")
