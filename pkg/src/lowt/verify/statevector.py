"""Dense statevector simulation and a bit-sliced classical path for reversible circuits.

Bit q of a basis index is the value of wire q.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..circuit.ir import REVERSIBLE_KINDS, Circuit, Gate
from ..errors import NotReversibleError, ParameterError, ResourceError

MAX_QUBITS = 14
NORM_TOL = 1e-10
SV_MAGIC = b"LOWTSV01"

_INV_SQRT2 = 1 / np.sqrt(2)
# T = diag(1, e^{-i pi/4}); S is the usual diag(1, i).
PHASES = {
    "Z": -1.0 + 0j,
    "S": 1j,
    "SDG": -1j,
    "T": np.exp(-1j * np.pi / 4),
    "TDG": np.exp(1j * np.pi / 4),
}


@dataclass
class StateVector:
    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if not 0 <= self.num_qubits <= MAX_QUBITS:
            raise ResourceError(f"dense simulation supports at most {MAX_QUBITS} qubits")
        amps = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.size != 1 << self.num_qubits:
            raise ParameterError("amplitude count does not match num_qubits")
        if abs(np.vdot(amps, amps).real - 1) > NORM_TOL:
            raise ParameterError("state is not normalized")
        self.amplitudes = amps

    @classmethod
    def basis(cls, num_qubits: int, index: int = 0) -> "StateVector":
        amps = np.zeros(1 << num_qubits, dtype=np.complex128)
        amps[index] = 1
        return cls(num_qubits, amps)

    @classmethod
    def from_amplitudes(cls, amps, normalize: bool = False) -> "StateVector":
        amps = np.asarray(amps, dtype=np.complex128).reshape(-1)
        n = amps.size.bit_length() - 1
        if amps.size != 1 << n:
            raise ParameterError("amplitude count must be a power of two")
        if normalize:
            amps = amps / np.linalg.norm(amps)
        return cls(n, amps)

    def tensor(self, other: "StateVector") -> "StateVector":
        """``self`` on the low wires, ``other`` on the high wires."""
        return StateVector(self.num_qubits + other.num_qubits,
                           np.kron(other.amplitudes, self.amplitudes))

    def density(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def copy(self) -> "StateVector":
        return StateVector(self.num_qubits, self.amplitudes.copy())


def plus_state(n: int) -> StateVector:
    return StateVector(n, np.full(1 << n, (1 << n) ** -0.5, dtype=np.complex128))


def t_state() -> StateVector:
    return StateVector(1, np.array([1, np.exp(-1j * np.pi / 4)]) * _INV_SQRT2)


def ccz_plus_state(n: int) -> StateVector:
    """``C^{n-1} Z |+>^n``: uniform amplitudes with a sign flip on |1...1>."""
    amps = np.full(1 << n, (1 << n) ** -0.5, dtype=np.complex128)
    amps[-1] *= -1
    return StateVector(n, amps)


# -- gate application -------------------------------------------------------------

def _bit(idx: np.ndarray, q: int) -> np.ndarray:
    return (idx >> q) & 1


def apply_gate(amps: np.ndarray, g: Gate, idx: np.ndarray) -> np.ndarray:
    k, qs = g.kind, g.qubits
    if k in PHASES:
        return np.where(_bit(idx, qs[0]) == 1, amps * PHASES[k], amps)
    if k == "CZ":
        return np.where((_bit(idx, qs[0]) & _bit(idx, qs[1])) == 1, -amps, amps)
    if k == "X":
        return amps[idx ^ (1 << qs[0])]
    if k == "Y":
        flipped = amps[idx ^ (1 << qs[0])]
        # Y|0> = i|1>, Y|1> = -i|0>
        return np.where(_bit(idx, qs[0]) == 1, 1j * flipped, -1j * flipped)
    if k == "H":
        q = qs[0]
        partner = amps[idx ^ (1 << q)]
        return np.where(_bit(idx, q) == 1, partner - amps, amps + partner) * _INV_SQRT2
    if k == "CX":
        c, t = qs
        return amps[idx ^ (_bit(idx, c) << t)]
    if k == "SWAP":
        a, b = qs
        diff = _bit(idx, a) ^ _bit(idx, b)
        return amps[idx ^ ((diff << a) | (diff << b))]
    if k == "TOFF3":
        a, b, t = qs
        return amps[idx ^ ((_bit(idx, a) & _bit(idx, b)) << t)]
    raise ParameterError(f"no dense rule for gate {k}")


def simulate_statevector(c: Circuit, psi: StateVector) -> StateVector:
    """Exact dense application of every gate (TOFF3 applied as its permutation)."""
    if c.num_qubits > MAX_QUBITS:
        raise ResourceError(f"dense simulation supports at most {MAX_QUBITS} qubits")
    if psi.num_qubits != c.num_qubits:
        raise ParameterError("state and circuit widths differ")
    idx = np.arange(1 << c.num_qubits, dtype=np.int64)
    amps = psi.amplitudes.copy()
    for g in c.gates:
        amps = apply_gate(amps, g, idx)
    return StateVector(c.num_qubits, amps)


def circuit_unitary(c: Circuit) -> np.ndarray:
    """Full ``2^N x 2^N`` matrix, column j = circuit applied to basis state j."""
    if c.num_qubits > 10:
        raise ResourceError("unitary extraction supports at most 10 qubits")
    dim = 1 << c.num_qubits
    idx = np.arange(dim, dtype=np.int64)
    cols = np.eye(dim, dtype=np.complex128)
    out = np.empty_like(cols)
    for j in range(dim):
        amps = cols[:, j]
        for g in c.gates:
            amps = apply_gate(amps, g, idx)
        out[:, j] = amps
    return out


def equal_up_to_phase(U: np.ndarray, V: np.ndarray, atol: float = 1e-12) -> bool:
    flat = np.flatnonzero(np.abs(V) > 0.5 / np.sqrt(V.shape[0]))
    if flat.size == 0:
        return bool(np.allclose(U, V, atol=atol))
    i = flat[0]
    u, v = U.flat[i], V.flat[i]
    if abs(u) < 1e-15:
        return False
    phase = v / u
    return bool(np.max(np.abs(U * phase - V)) <= atol) and abs(abs(phase) - 1) <= atol


# -- classical reversible path -----------------------------------------------------

def _check_reversible(c: Circuit) -> None:
    bad = next((g for g in c.gates if g.kind not in REVERSIBLE_KINDS), None)
    if bad is not None:
        raise NotReversibleError(f"gate {bad} is not a classical permutation")


def simulate_basis(c: Circuit, x: int) -> int:
    """Image of basis state |x> under a circuit of X / CX / SWAP / TOFF3."""
    _check_reversible(c)
    if not 0 <= x < (1 << c.num_qubits):
        raise ParameterError("basis index out of range")
    for g in c.gates:
        q = g.qubits
        if g.kind == "X":
            x ^= 1 << q[0]
        elif g.kind == "CX":
            x ^= (x >> q[0] & 1) << q[1]
        elif g.kind == "TOFF3":
            x ^= (x >> q[0] & x >> q[1] & 1) << q[2]
        else:
            a, b = q
            d = (x >> a ^ x >> b) & 1
            x ^= (d << a) | (d << b)
    return x


def simulate_planes(c: Circuit, planes: np.ndarray) -> np.ndarray:
    """Bit-sliced batch: ``planes[w]`` is wire w's value across the batch (modified in place)."""
    _check_reversible(c)
    if planes.shape[0] != c.num_qubits:
        raise ParameterError("one plane per wire is required")
    for g in c.gates:
        q = g.qubits
        if g.kind == "X":
            np.logical_not(planes[q[0]], out=planes[q[0]])
        elif g.kind == "CX":
            planes[q[1]] ^= planes[q[0]]
        elif g.kind == "TOFF3":
            planes[q[2]] ^= planes[q[0]] & planes[q[1]]
        else:
            planes[[q[0], q[1]]] = planes[[q[1], q[0]]]
    return planes


def simulate_basis_batch(c: Circuit, xs) -> np.ndarray:
    """Vectorized :func:`simulate_basis` for circuits of at most 62 wires."""
    if c.num_qubits > 62:
        raise ResourceError("integer batch path supports at most 62 wires; use simulate_planes")
    xs = np.asarray(xs, dtype=np.int64)
    wires = np.arange(c.num_qubits, dtype=np.int64)
    planes = ((xs[None, :] >> wires[:, None]) & 1).astype(bool)
    simulate_planes(c, planes)
    return (planes.astype(np.int64) << wires[:, None]).sum(axis=0)


# -- distances ---------------------------------------------------------------------

def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """``(1/2) ||rho - sigma||_1`` by Hermitian eigendecomposition."""
    diff = np.asarray(rho) - np.asarray(sigma)
    diff = (diff + diff.conj().T) / 2
    return float(0.5 * np.abs(np.linalg.eigvalsh(diff)).sum())


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    return (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T


def _pure_vector(m: np.ndarray) -> np.ndarray | None:
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    return v[:, -1] * np.sqrt(w[-1]) if w[-1] > 1 - 1e-12 else None


def fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Uhlmann fidelity ``(tr sqrt(sqrt(rho) sigma sqrt(rho)))^2``.

    If either argument is pure this is ``<psi|other|psi>``, which avoids the
    square roots of numerically zero eigenvalues.
    """
    rho, sigma = np.asarray(rho), np.asarray(sigma)
    for a, b in ((rho, sigma), (sigma, rho)):
        psi = _pure_vector(a)
        if psi is not None:
            return float(np.vdot(psi, b @ psi).real)
    r = _psd_sqrt(rho)
    inner = r @ np.asarray(sigma) @ r
    w = np.linalg.eigvalsh((inner + inner.conj().T) / 2)
    return float(np.sqrt(np.clip(w, 0, None)).sum() ** 2)


def pure_trace_distance(psi: StateVector, phi: StateVector) -> float:
    ov = abs(np.vdot(psi.amplitudes, phi.amplitudes)) ** 2
    return float(np.sqrt(max(0.0, 1 - ov)))


def pure_fidelity(psi: StateVector, phi: StateVector) -> float:
    return float(abs(np.vdot(psi.amplitudes, phi.amplitudes)) ** 2)


# -- binary IO ---------------------------------------------------------------------

def write_statevector(path: str | Path, psi: StateVector) -> None:
    header = SV_MAGIC + struct.pack("<Q", psi.num_qubits)
    Path(path).write_bytes(header + psi.amplitudes.astype("<c16").tobytes())


def read_statevector(path: str | Path) -> StateVector:
    data = Path(path).read_bytes()
    if len(data) < 16 or data[:8] != SV_MAGIC:
        raise ParameterError("not a statevector file (bad magic)")
    (n,) = struct.unpack("<Q", data[8:16])
    if n > MAX_QUBITS:
        raise ResourceError(f"state has {n} qubits; limit is {MAX_QUBITS}")
    body = data[16:]
    if len(body) != 16 << n:
        raise ParameterError("statevector payload length does not match header")
    return StateVector(int(n), np.frombuffer(body, dtype="<c16").astype(np.complex128))
