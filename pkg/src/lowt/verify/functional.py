"""Exhaustive classical check that a compiled circuit implements its sketch as an oracle."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..circuit.ir import Circuit
from ..errors import ParameterError
from ..sketch.core import ParitySketch
from .statevector import simulate_planes

FUNCTIONAL_MAX_INPUTS = 16


@dataclass
class FunctionalReport:
    checked: int
    target_mismatches: int
    input_corrupted: int
    ancilla_dirty: int
    failures: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.checked > 0 and not (self.target_mismatches or self.input_corrupted
                                          or self.ancilla_dirty)

    def to_json(self) -> dict:
        return {"checked": self.checked, "target_mismatches": self.target_mismatches,
                "input_corrupted": self.input_corrupted, "ancilla_dirty": self.ancilla_dirty,
                "passed": self.passed, "first_failures": self.failures[:5]}


def check_oracle(c: Circuit, sk: ParitySketch, xs=None) -> FunctionalReport:
    """Run ``|x, b, 0>`` for every x (or the given xs) and both b; compare with the sketch."""
    inputs = c.registers.get("input")
    target = c.registers.get("target")
    if inputs is None or target is None or len(target) != 1:
        raise ParameterError("circuit lacks input/target registers")
    if len(inputs) != sk.n:
        raise ParameterError(f"circuit has {len(inputs)} inputs, sketch has arity {sk.n}")
    if xs is None:
        if sk.n > FUNCTIONAL_MAX_INPUTS:
            raise ParameterError("pass an explicit input subset above 16 inputs")
        xs = np.arange(1 << sk.n, dtype=np.int64)
    xs = np.asarray(xs, dtype=np.int64)
    batch = np.concatenate([xs, xs])
    bvals = np.concatenate([np.zeros(xs.size, bool), np.ones(xs.size, bool)])
    planes = np.zeros((c.num_qubits, batch.size), dtype=bool)
    for i, w in enumerate(inputs):
        planes[w] = (batch >> i) & 1
    t = target[0]
    planes[t] = bvals
    simulate_planes(c, planes)
    expected = bvals ^ np.concatenate([sk.evaluate_many(xs), sk.evaluate_many(xs)]).astype(bool)
    got_x = np.zeros(batch.size, dtype=np.int64)
    for i, w in enumerate(inputs):
        got_x |= planes[w].astype(np.int64) << i
    fixed = set(inputs) | {t}
    others = [w for w in range(c.num_qubits) if w not in fixed]
    dirty = planes[others].any(axis=0) if others else np.zeros(batch.size, bool)
    bad_t = planes[t] != expected
    bad_x = got_x != batch
    failures = [{"x": int(batch[i]), "b": int(bvals[i])}
                for i in np.flatnonzero(bad_t | bad_x | dirty)[:5]]
    return FunctionalReport(int(batch.size), int(bad_t.sum()), int(bad_x.sum()), int(dirty.sum()),
                            failures)
