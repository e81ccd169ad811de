"""Stabilizer nullity, Pauli overlaps, and small stabilizer-state enumeration.

Paulis are ``P = s * i^{v.w} X(v) Z(w)`` with sign ``s = +-1``, which makes
every P Hermitian. For all (v, w) at once the expectation
``<psi| X(v) Z(w) |psi>`` is the Walsh-Hadamard transform over j of
``psi_j * conj(psi_{j XOR v})``.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..errors import ParameterError, ResourceError
from .statevector import NORM_TOL, StateVector, ccz_plus_state

NULLITY_MAX_QUBITS = 7
EIGEN_TOL = 1e-8
_SCREEN = 1e-6


@dataclass
class NullityReport:
    num_qubits: int
    stabilizer_count: int
    nullity: int
    witnesses: list[tuple[int, int, int]] = field(default_factory=list)  # (sign, x_mask, z_mask)

    def to_json(self) -> dict[str, Any]:
        return {"num_qubits": self.num_qubits, "stabilizer_count": self.stabilizer_count,
                "nullity": self.nullity,
                "witnesses": [{"sign": s, "x": v, "z": w} for s, v, w in self.witnesses]}


def _hadamard_signs(n: int) -> np.ndarray:
    j = np.arange(1 << n)
    return 1 - 2 * (np.bitwise_count(j[:, None] & j[None, :]) & 1).astype(np.int64)


def pauli_expectations(psi: StateVector) -> np.ndarray:
    """``E[v, w] = <psi| i^{v.w} X(v) Z(w) |psi>`` (real up to rounding)."""
    n = psi.num_qubits
    if n > NULLITY_MAX_QUBITS:
        raise ResourceError(f"Pauli scan supports at most {NULLITY_MAX_QUBITS} qubits")
    a = psi.amplitudes
    j = np.arange(1 << n)
    # A[v, j] = psi_j conj(psi_{j ^ v})
    A = a[None, :] * np.conj(a[j[None, :] ^ j[:, None]])
    E = A @ _hadamard_signs(n)
    vw = np.bitwise_count(j[:, None] & j[None, :]).astype(np.int64)
    return E * (1j ** (vw % 4))


def apply_pauli(psi: StateVector, v: int, w: int) -> np.ndarray:
    """Amplitudes of ``i^{v.w} X(v) Z(w) |psi>``."""
    j = np.arange(1 << psi.num_qubits)
    phase = (1j ** ((v & w).bit_count() % 4)) * (1 - 2 * (np.bitwise_count(j & w) & 1).astype(np.int64))
    out = np.empty_like(psi.amplitudes)
    out[j ^ v] = phase * psi.amplitudes
    return out


def _check_state(psi: StateVector) -> None:
    if abs(np.vdot(psi.amplitudes, psi.amplitudes).real - 1) > NORM_TOL:
        raise ParameterError("state is not normalized")


def stabilizer_nullity(psi: StateVector) -> NullityReport:
    _check_state(psi)
    E = pauli_expectations(psi).real
    n = psi.num_qubits
    witnesses = []
    for v, w in zip(*np.nonzero(np.abs(E) > 1 - _SCREEN)):
        v, w = int(v), int(w)
        s = 1 if E[v, w] > 0 else -1
        if np.linalg.norm(apply_pauli(psi, v, w) - s * psi.amplitudes) <= EIGEN_TOL:
            witnesses.append((s, v, w))
    count = len(witnesses)
    log = count.bit_length() - 1
    if count != 1 << log:
        raise AssertionError(f"stabilizer group size {count} is not a power of two")
    return NullityReport(n, count, n - log, witnesses)


def max_pauli_overlap(psi: StateVector) -> float:
    """``max |<psi|P|psi>|`` over non-identity Paulis."""
    _check_state(psi)
    E = np.abs(pauli_expectations(psi))
    E[0, 0] = 0
    return float(E.max())


# -- Clifford utilities ----------------------------------------------------------------

_H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
_S = np.diag([1, 1j])
_T = np.diag([1, np.exp(-1j * np.pi / 4)])


def apply_1q(amps: np.ndarray, U: np.ndarray, q: int, n: int) -> np.ndarray:
    t = amps.reshape((2,) * n)
    ax = n - 1 - q
    t = np.moveaxis(np.tensordot(U, t, axes=([1], [ax])), 0, ax)
    return t.reshape(-1)


def apply_cx(amps: np.ndarray, c: int, t: int) -> np.ndarray:
    j = np.arange(amps.size)
    return amps[j ^ (((j >> c) & 1) << t)]


def random_clifford_circuit(n: int, rng: np.random.Generator, depth: int | None = None):
    depth = depth if depth is not None else 8 * n + 8
    ops = []
    for _ in range(depth):
        r = int(rng.integers(3)) if n > 1 else int(rng.integers(2))
        if r == 0:
            ops.append(("H", int(rng.integers(n))))
        elif r == 1:
            ops.append(("S", int(rng.integers(n))))
        else:
            c, t = (int(q) for q in rng.choice(n, size=2, replace=False))
            ops.append(("CX", c, t))
    return ops


def apply_clifford(psi: StateVector, ops) -> StateVector:
    amps = psi.amplitudes
    n = psi.num_qubits
    for op in ops:
        if op[0] == "H":
            amps = apply_1q(amps, _H, op[1], n)
        elif op[0] == "S":
            amps = apply_1q(amps, _S, op[1], n)
        else:
            amps = apply_cx(amps, op[1], op[2])
    return StateVector(n, amps / np.linalg.norm(amps))


def apply_t(psi: StateVector, q: int) -> StateVector:
    return StateVector(psi.num_qubits, apply_1q(psi.amplitudes, _T, q, psi.num_qubits))


def random_stabilizer_state(n: int, rng: np.random.Generator) -> StateVector:
    return apply_clifford(StateVector.basis(n, 0), random_clifford_circuit(n, rng))


def _canonical_key(amps: np.ndarray) -> bytes:
    """Stabilizer amplitudes are ``{0, +-1, +-i} / sqrt(support)`` up to global phase."""
    nz = np.flatnonzero(np.abs(amps) > 1e-9)
    a = amps * (abs(amps[nz[0]]) / amps[nz[0]]) * np.sqrt(nz.size)
    parts = np.stack([np.rint(a.real), np.rint(a.imag)]).astype(np.int8)
    return parts.tobytes()


def enumerate_stabilizer_states(n: int) -> list[StateVector]:
    """All n-qubit stabilizer states (up to global phase) by Clifford orbit search."""
    if n > 3:
        raise ResourceError("stabilizer enumeration supports n <= 3")
    start = StateVector.basis(n, 0).amplitudes
    seen = {_canonical_key(start): start}
    queue = deque([start])
    while queue:
        amps = queue.popleft()
        nxt = [apply_1q(amps, _H, q, n) for q in range(n)]
        nxt += [apply_1q(amps, _S, q, n) for q in range(n)]
        nxt += [apply_cx(amps, c, t) for c in range(n) for t in range(n) if c != t]
        for b in nxt:
            key = _canonical_key(b)
            if key not in seen:
                seen[key] = b
                queue.append(b)
    return [StateVector(n, a) for a in seen.values()]


def stabilizer_state_count(n: int) -> int:
    """``2^n prod_{j=1..n} (2^j + 1)``."""
    return (1 << n) * math.prod((1 << j) + 1 for j in range(1, n + 1))


# -- the trace-distance ball around |Phi> ------------------------------------------------

def perturb(psi: StateVector, distance: float, rng: np.random.Generator) -> StateVector:
    """A pure state at exactly the given trace distance, in a random direction."""
    if not 0 <= distance <= 1:
        raise ParameterError("distance must lie in [0, 1]")
    a = psi.amplitudes
    g = rng.normal(size=a.size) + 1j * rng.normal(size=a.size)
    g -= np.vdot(a, g) * a
    g /= np.linalg.norm(g)
    theta = math.asin(distance)
    return StateVector(psi.num_qubits, math.cos(theta) * a + math.sin(theta) * g)


def nullity_ball_check(n: int, delta: float, trials: int, rng: np.random.Generator) -> dict[str, Any]:
    if n > 5:
        raise ResourceError("ball check supports n <= 5")
    radius = 2 / 2**n
    if not 0 <= delta < radius:
        raise ParameterError(f"delta must lie in [0, {radius})")
    phi = ccz_plus_state(n)
    nullities = [stabilizer_nullity(perturb(phi, delta, rng) if delta else phi).nullity
                 for _ in range(max(trials, 1))]
    out: dict[str, Any] = {
        "n": n, "delta": delta, "radius": radius, "trials": len(nullities),
        "min_nullity": min(nullities), "all_full": all(v == n for v in nullities),
    }
    if n <= 3:
        nearest = min(math.sqrt(max(0.0, 1 - abs(np.vdot(s.amplitudes, phi.amplitudes)) ** 2))
                      for s in enumerate_stabilizer_states(n))
        out["nearest_stabilizer_distance"] = nearest
        out["contrapositive_holds"] = nearest >= radius - 1e-12
    return out
