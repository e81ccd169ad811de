"""Compile parity sketches into reversible Clifford+T circuits.

Wire layout: ``[inputs (n) | target | parity (k) | scratch]``. Parities are
computed by CX fan-in, the inner function is XORed into the target, and the
parities are uncomputed by replaying the fan-in backwards.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from ..errors import ArityError, ParameterError
from ..sketch.core import (
    FormulaInner,
    Lit,
    Node,
    OrInner,
    ParitySketch,
    SignedThreshold,
    Threshold,
    Xor,
)
from .ir import Circuit
from .library import CircuitBuilder, compare_geq, mcx, popcount


@dataclass(frozen=True)
class Const:
    bit: int


@dataclass(frozen=True)
class Wire:
    wire: int
    negated: bool = False


Val = Union[Const, Wire]


@dataclass(frozen=True)
class _Op:
    kind: str  # "thr" | "xor"
    vals: tuple[Wire, ...]
    cutoff: int
    negate: bool


def _fold(node: Node, vals: list[Val]) -> Val | _Op:
    consts = [v.bit for v in vals if isinstance(v, Const)]
    wires = tuple(v for v in vals if isinstance(v, Wire))
    if isinstance(node, Xor):
        bit = (sum(consts) & 1) ^ node.negate
        if not wires:
            return Const(bit)
        if len(wires) == 1:
            return Wire(wires[0].wire, wires[0].negated ^ bool(bit))
        return _Op("xor", wires, 0, bool(bit))
    cutoff = node.cutoff - sum(consts)
    if cutoff <= 0:
        return Const(1 ^ node.negate)
    if cutoff > len(wires):
        return Const(int(node.negate))
    if len(wires) == 1:
        return Wire(wires[0].wire, wires[0].negated ^ node.negate)
    return _Op("thr", wires, cutoff, node.negate)


def _emit(b: CircuitBuilder, op: _Op, out: int) -> bool:
    """XOR the un-negated op value (up to the returned polarity) into ``out``."""
    if op.kind == "xor":
        pol = op.negate
        for v in op.vals:
            b.cx(v.wire, out)
            pol ^= v.negated
        return pol
    m = len(op.vals)
    if op.cutoff == m:
        mcx(b, [(v.wire, v.negated) for v in op.vals], out)
        return op.negate
    if op.cutoff == 1:
        mcx(b, [(v.wire, not v.negated) for v in op.vals], out)
        return not op.negate
    # General threshold: fold polarities in place (copy repeated wires), count, compare.
    start = b.mark
    bits: list[int] = []
    copies: list[int] = []
    for v in op.vals:
        if v.wire in bits:
            c = b.alloc()
            copies.append(c)
            b.cx(v.wire, c)
            bits.append(c)
        else:
            bits.append(v.wire)
    for w, v in zip(bits, op.vals):
        if v.negated:
            b.x(w)
    prep = b.mark
    count, carries = popcount(b, bits)
    counted = b.mark
    compare_geq(b, count, op.cutoff, out)
    b.replay_inverse(prep, counted)
    b.replay_inverse(start, prep)
    b.release(*carries, *copies)
    return op.negate


class _FormulaCompiler:
    def __init__(self, b: CircuitBuilder, parity_vals: list[Val]):
        self.b = b
        self.parity_vals = parity_vals

    def value(self, node: Node) -> Val:
        if isinstance(node, Lit):
            v = self.parity_vals[node.index]
            if isinstance(v, Const):
                return Const(v.bit ^ node.negate)
            return Wire(v.wire, v.negated ^ node.negate)
        folded = _fold(node, [self.value(c) for c in node.children])
        if not isinstance(folded, _Op):
            return folded
        w = self.b.alloc()
        pol = _emit(self.b, folded, w)
        return Wire(w, pol)


def _as_formula(sk: ParitySketch) -> Node:
    inner = sk.inner
    lits = tuple(Lit(i) for i in range(sk.k))
    if isinstance(inner, OrInner):
        return Threshold(lits, 1, inner.negate)
    if isinstance(inner, SignedThreshold):
        # bit i is 1 iff term i is +1: parity 0 with sign +1, parity 1 with sign -1
        signed = tuple(Lit(i, negate=s > 0) for i, s in enumerate(inner.signs))
        return Threshold(signed, inner.cutoff, False)
    if isinstance(inner, FormulaInner):
        return inner.root
    raise ParameterError(f"unsupported inner function {inner!r}")


def compile_sketch(sk: ParitySketch, *, fold_constants: bool = False) -> Circuit:
    """Circuit mapping ``|x, b, 0> -> |x, b XOR g(x), 0>`` for the sketch g.

    An empty subset leaves its parity wire at 0. By default that wire is still
    used as a control, so the T-count depends only on the sketch's shape;
    ``fold_constants=True`` propagates the constant instead, which is cheaper
    but makes the cost vary from sample to sample.
    """
    n, k = sk.n, sk.k
    target = n
    parity = list(range(n + 1, n + 1 + k))
    b = CircuitBuilder(n + 1 + k)
    parity_vals: list[Val] = []
    for S, p in zip(sk.subsets, parity):
        if S == 0 and fold_constants:
            parity_vals.append(Const(0))
            continue
        for i in range(n):
            if S >> i & 1:
                b.cx(i, p)
        flipped = sk.flip_inputs and S.bit_count() & 1
        parity_vals.append(Wire(p, bool(flipped)))
    fan_in = b.mark
    comp = _FormulaCompiler(b, parity_vals)
    root = _as_formula(sk)
    if isinstance(root, Lit):
        folded: Val | _Op = comp.value(root)
    else:
        folded = _fold(root, [comp.value(c) for c in root.children])
    computed = b.mark
    if isinstance(folded, Const):
        flip = bool(folded.bit)
    elif isinstance(folded, Wire):
        b.cx(folded.wire, target)
        flip = folded.negated
    else:
        flip = _emit(b, folded, target)
    if flip:
        b.x(target)
    b.replay_inverse(fan_in, computed)
    b.replay_inverse(0, fan_in)
    return b.build({"input": range(n), "target": (target,), "parity": parity})


def compile_or_sketch(sk: ParitySketch) -> Circuit:
    if not isinstance(sk.inner, OrInner):
        raise ParameterError("compile_or_sketch needs an OR inner function")
    return compile_sketch(sk)


def compile_threshold_sketch(sk: ParitySketch) -> Circuit:
    if not isinstance(sk.inner, SignedThreshold):
        raise ParameterError("compile_threshold_sketch needs a signed-threshold inner function")
    return compile_sketch(sk)


def compile_formula_sketch(sk: ParitySketch) -> Circuit:
    if not isinstance(sk.inner, FormulaInner):
        raise ParameterError("compile_formula_sketch needs a formula inner function")
    return compile_sketch(sk)


def check_arity(c: Circuit, n: int) -> None:
    if len(c.registers.get("input", ())) != n:
        raise ArityError(f"circuit has {len(c.registers.get('input', ()))} inputs, expected {n}")
