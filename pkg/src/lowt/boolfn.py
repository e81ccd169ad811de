"""Exact Boolean functions, their Walsh-Hadamard spectra, and named families.

Conventions
-----------
* An input ``x`` is an n-bit integer; bit ``i`` (0-based) holds the variable
  ``x_{i+1}``.
* A subset ``S`` of the variables is an n-bit mask with the same layout.
* Matrix families (MEQ, RankOne) lay an ``rows x cols`` matrix out row-major:
  entry ``(r, c)`` is bit ``r * cols + c``.
* ``GT_n`` reads ``x`` from bits ``0..n-1`` and ``y`` from bits ``n..2n-1``,
  both least-significant bit first.

Fourier coefficients are kept as integer numerators over the implicit
denominator ``2**n``, so every spectral quantity is exact.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Any, Callable, Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import ArityError, DegenerateFunctionError, ParameterError, ResourceError

MAX_ARITY = 24


def _check_arity(n: int) -> None:
    if not 1 <= n <= MAX_ARITY:
        raise ResourceError(f"arity {n} outside supported range 1..{MAX_ARITY}")


def xor_s(S: int, x: int, n: int | None = None) -> int:
    """Parity of the bits of ``x`` selected by the mask ``S``."""
    if n is not None and (S >> n or x >> n):
        raise ArityError(f"mask {S:#x} or input {x:#x} does not fit arity {n}")
    return (S & x).bit_count() & 1


def _pack(values: np.ndarray) -> bytes:
    return np.packbits(values.astype(np.uint8), bitorder="little").tobytes()


def _unpack(packed: bytes, length: int) -> np.ndarray:
    bits = np.unpackbits(np.frombuffer(packed, dtype=np.uint8), bitorder="little")
    return bits[:length]


@dataclass(frozen=True, eq=False)
class BooleanFunction:
    """Truth table of ``f: {0,1}^n -> {0,1}`` stored as a packed bit vector.

    ``dont_care`` (optional, same packing) marks inputs outside a promise;
    error accounting skips them.
    """

    n: int
    packed: bytes
    name: str | None = None
    params: Mapping[str, Any] = field(default_factory=dict)
    dont_care: bytes | None = None

    def __post_init__(self):
        _check_arity(self.n)
        expected = max(1, (1 << self.n) // 8)
        if len(self.packed) != expected:
            raise ValueError(f"packed table has {len(self.packed)} bytes, expected {expected}")
        if self.dont_care is not None and len(self.dont_care) != expected:
            raise ValueError("dont_care mask length does not match table")
        # Pad bits beyond 2**n (only possible for n < 3) must be zero so that
        # equality and hex round-trips are canonical.
        if self.n < 3:
            spare = 0xFF & ~((1 << (1 << self.n)) - 1)
            if self.packed[0] & spare or (self.dont_care and self.dont_care[0] & spare):
                raise ValueError("nonzero padding bits in packed table")

    # -- construction -----------------------------------------------------
    @classmethod
    def from_table(cls, n: int, values: Iterable[int] | np.ndarray, name=None, params=None,
                   dont_care=None) -> "BooleanFunction":
        _check_arity(n)
        arr = np.asarray(values if isinstance(values, np.ndarray) else list(values))
        if arr.shape != (1 << n,):
            raise ValueError(f"table must have exactly 2**{n} entries, got shape {arr.shape}")
        if not np.isin(arr, (0, 1)).all():
            raise ValueError("truth table entries must be 0 or 1")
        dc = None
        if dont_care is not None:
            dc_arr = np.asarray(dont_care, dtype=bool)
            if dc_arr.shape != arr.shape:
                raise ValueError("dont_care mask must match table shape")
            if dc_arr.any():
                dc = _pack(dc_arr)
        return cls(n, _pack(arr), name, dict(params or {}), dc)

    @classmethod
    def from_callable(cls, n: int, func: Callable[[int], int], **kw) -> "BooleanFunction":
        _check_arity(n)
        return cls.from_table(n, np.fromiter((func(x) & 1 for x in range(1 << n)), dtype=np.uint8,
                                             count=1 << n), **kw)

    # -- views ------------------------------------------------------------
    @cached_property
    def table(self) -> np.ndarray:
        t = _unpack(self.packed, 1 << self.n).copy()
        t.setflags(write=False)
        return t

    @cached_property
    def dont_care_mask(self) -> np.ndarray:
        if self.dont_care is None:
            m = np.zeros(1 << self.n, dtype=bool)
        else:
            m = _unpack(self.dont_care, 1 << self.n).astype(bool)
        m.setflags(write=False)
        return m

    @cached_property
    def valid_inputs(self) -> np.ndarray:
        """Inputs inside the promise (all inputs when there is no promise)."""
        idx = np.flatnonzero(~self.dont_care_mask)
        idx.setflags(write=False)
        return idx

    @property
    def size(self) -> int:
        return 1 << self.n

    def eval(self, x: int) -> int:
        if not 0 <= x < (1 << self.n):
            raise ArityError(f"input {x} out of range for arity {self.n}")
        return int(self.packed[x >> 3] >> (x & 7) & 1)

    __call__ = eval

    def is_constant(self) -> bool:
        t = self.table
        return bool((t == t[0]).all())

    def label(self) -> str:
        if self.name is None:
            return f"table[n={self.n}]"
        extras = ",".join(f"{k}={v}" for k, v in sorted(self.params.items()) if k != "H")
        return f"{self.name}({extras})" if extras else self.name

    def __eq__(self, other):
        if not isinstance(other, BooleanFunction):
            return NotImplemented
        return (self.n, self.packed, self.dont_care) == (other.n, other.packed, other.dont_care)

    def __hash__(self):
        return hash((self.n, self.packed, self.dont_care))

    def __repr__(self):
        return f"BooleanFunction({self.label()}, n={self.n})"

    # -- serialization ----------------------------------------------------
    def to_json(self) -> dict:
        out: dict[str, Any] = {"n": self.n, "table": self.packed.hex()}
        if self.name is not None:
            out["family"] = self.name
            if self.params:
                out["params"] = dict(self.params)
        if self.dont_care is not None:
            out["promise_mask"] = self.dont_care.hex()
        return out

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "BooleanFunction":
        try:
            n = int(data["n"])
            packed = bytes.fromhex(data["table"])
        except (KeyError, ValueError, TypeError) as exc:
            raise ValueError(f"malformed truth-table document: {exc}") from exc
        dc = data.get("promise_mask")
        return cls(n, packed, data.get("family"), dict(data.get("params") or {}),
                   bytes.fromhex(dc) if dc else None)


def load_table(path: str | Path) -> BooleanFunction:
    return BooleanFunction.from_json(json.loads(Path(path).read_text()))


def save_table(f: BooleanFunction, path: str | Path) -> None:
    Path(path).write_text(json.dumps(f.to_json(), indent=2, sort_keys=True) + "\n")


def load_check_matrix(path: str | Path) -> list[list[int]]:
    """Read a parity-check matrix: a bare row-major list or ``{"H": [...]}``."""
    data = json.loads(Path(path).read_text())
    if isinstance(data, Mapping):
        data = data.get("H", data.get("rows"))
    return _check_matrix_rows(data)


def _check_matrix_rows(H) -> list[list[int]]:
    if not isinstance(H, Sequence) or not H:
        raise ParameterError("check matrix must be a non-empty list of rows")
    rows = [[int(b) for b in row] for row in H]
    width = len(rows[0])
    if width == 0 or any(len(r) != width for r in rows):
        raise ParameterError("check matrix rows must be non-empty and of equal length")
    if any(b not in (0, 1) for r in rows for b in r):
        raise ParameterError("check matrix entries must be bits")
    return rows


def row_masks(H: Sequence[Sequence[int]]) -> list[int]:
    return [sum(bit << c for c, bit in enumerate(row)) for row in H]


# -- Fourier analysis ------------------------------------------------------

def fwht(values: np.ndarray) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform of an integer vector of length 2**n."""
    a = np.array(values, dtype=np.int64)
    size = a.shape[0]
    if size & (size - 1):
        raise ValueError("length must be a power of two")
    h = 1
    while h < size:
        v = a.reshape(-1, 2, h)
        lo = v[:, 0, :].copy()
        v[:, 0, :] += v[:, 1, :]
        v[:, 1, :] *= -1
        v[:, 1, :] += lo
        h *= 2
    return a


@dataclass(frozen=True, eq=False)
class FourierSpectrum:
    """Exact spectrum: ``coeff(S) = numerators[S] / 2**n``."""

    n: int
    numerators: np.ndarray

    @property
    def denominator(self) -> int:
        return 1 << self.n

    def coeff(self, S: int) -> Fraction:
        if not 0 <= S < (1 << self.n):
            raise ArityError(f"mask {S:#x} out of range for arity {self.n}")
        return Fraction(int(self.numerators[S]), self.denominator)

    @cached_property
    def one_norm(self) -> Fraction:
        return Fraction(int(np.abs(self.numerators).sum()), self.denominator)

    def support(self) -> np.ndarray:
        return np.flatnonzero(self.numerators)

    def items(self) -> Iterator[tuple[int, Fraction]]:
        """Nonzero coefficients in increasing mask order."""
        for S in self.support():
            yield int(S), self.coeff(int(S))

    def reconstruct(self) -> np.ndarray:
        """Values of ``sum_S coeff(S) chi_S(x)`` for every x, checked exact."""
        total = fwht(self.numerators)
        q, r = np.divmod(total, self.denominator)
        if r.any():
            raise ArithmeticError("spectrum does not reconstruct to an integer function")
        return q

    def top(self, count: int = 10) -> list[tuple[int, Fraction]]:
        supp = self.support()
        order = sorted(supp, key=lambda S: (-abs(int(self.numerators[S])), int(S)))
        return [(int(S), self.coeff(int(S))) for S in order[:count]]


def walsh_hadamard(f: BooleanFunction) -> FourierSpectrum:
    num = fwht(f.table)
    num.setflags(write=False)
    return FourierSpectrum(f.n, num)


def fourier_one_norm(spec: FourierSpectrum) -> Fraction:
    return spec.one_norm


def sampling_distribution(spec: FourierSpectrum) -> list[tuple[int, Fraction]]:
    """``p(S) = |f^(S)| / ||f^||_1`` over the Fourier support."""
    total = int(np.abs(spec.numerators).sum())
    if total == 0:
        raise DegenerateFunctionError("constant-0 function has no sampling distribution")
    return [(int(S), Fraction(abs(int(spec.numerators[S])), total)) for S in spec.support()]


def gf2_rank(masks: Iterable[int]) -> int:
    basis: list[int] = []
    for v in masks:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
    return len(basis)


def fourier_dimension(f: BooleanFunction) -> int:
    """Dimension of the span of the Fourier support.

    This equals the non-adaptive parity decision tree depth; it is used as an
    independent cross-check of the brute-force search and for arities where
    that search is too slow.
    """
    return gf2_rank(int(S) for S in walsh_hadamard(f).support() if S)


# -- named families --------------------------------------------------------

class Family(str, enum.Enum):
    OR = "or"
    AND = "and"
    XOR = "xor"
    CONST0 = "const0"
    CONST1 = "const1"
    HW = "hw"
    HW_GAP = "hw-gap"
    CW = "cw"
    MEQ = "meq"
    RANKONE = "rankone"
    MAJ = "maj"
    GT = "gt"


def _inputs(n: int) -> np.ndarray:
    return np.arange(1 << n, dtype=np.int64)


def _need(params: Mapping[str, Any], *names: str) -> list[int]:
    missing = [k for k in names if params.get(k) is None]
    if missing:
        raise ParameterError(f"missing parameter(s): {', '.join(missing)}")
    return [int(params[k]) for k in names]


def make_named(family: Family | str, **params) -> BooleanFunction:
    """Build a named family member.

    ``or/and/xor/maj/const0/const1``: ``n``. ``hw``: ``n, d`` (1 iff |x| <= d).
    ``hw-gap``: ``n, k`` (1 iff |x| <= k; k < |x| < 2k is don't-care).
    ``cw``: ``H`` (r x n check matrix; 1 iff Hx = 0). ``meq``/``rankone``:
    ``n`` rows, ``m`` columns. ``gt``: ``n`` bits per operand (arity 2n).
    """
    fam = Family(family)
    dont_care = None
    if fam is Family.CW:
        H = _check_matrix_rows(params.get("H"))
        n = len(H[0])
        _check_arity(n)
        xs = _inputs(n)
        ok = np.ones(xs.shape, dtype=bool)
        for h in row_masks(H):
            ok &= (np.bitwise_count(xs & h) & 1) == 0
        return BooleanFunction.from_table(n, ok.astype(np.uint8), fam.value, {"H": H})

    if fam in (Family.MEQ, Family.RANKONE):
        rows, cols = _need(params, "n", "m")
        if rows < 1 or cols < 1:
            raise ParameterError("matrix dimensions must be positive")
        N = rows * cols
        _check_arity(N)
        xs = _inputs(N)
        rmask = (1 << cols) - 1
        R = [(xs >> (r * cols)) & rmask for r in range(rows)]
        if fam is Family.MEQ:
            vals = np.ones(xs.shape, dtype=bool)
            for r in R[1:]:
                vals &= r == R[0]
        else:
            # Over F_2, rank <= 1 iff every nonzero row equals one common row.
            top = np.maximum.reduce(R)
            vals = top != 0
            for r in R:
                vals &= (r == 0) | (r == top)
        return BooleanFunction.from_table(N, vals.astype(np.uint8), fam.value,
                                          {"n": rows, "m": cols})

    if fam is Family.GT:
        (n,) = _need(params, "n")
        if n < 1:
            raise ParameterError("n must be positive")
        _check_arity(2 * n)
        xs = _inputs(2 * n)
        lo = xs & ((1 << n) - 1)
        vals = lo > (xs >> n)
        return BooleanFunction.from_table(2 * n, vals.astype(np.uint8), fam.value, {"n": n})

    (n,) = _need(params, "n")
    _check_arity(n)
    xs = _inputs(n)
    w = np.bitwise_count(xs).astype(np.int64)
    out_params: dict[str, Any] = {"n": n}
    if fam is Family.OR:
        vals = w > 0
    elif fam is Family.AND:
        vals = w == n
    elif fam is Family.XOR:
        vals = (w & 1) == 1
    elif fam is Family.CONST0:
        vals = np.zeros(xs.shape, dtype=bool)
    elif fam is Family.CONST1:
        vals = np.ones(xs.shape, dtype=bool)
    elif fam is Family.MAJ:
        vals = 2 * w > n
    elif fam is Family.HW:
        (d,) = _need(params, "d")
        if not 0 <= d <= n:
            raise ParameterError(f"need 0 <= d <= n, got d={d}, n={n}")
        vals = w <= d
        out_params["d"] = d
    elif fam is Family.HW_GAP:
        (k,) = _need(params, "k")
        if k < 1 or 2 * k > n:
            raise ParameterError(f"need 1 <= k and 2k <= n, got k={k}, n={n}")
        vals = w <= k
        dont_care = (w > k) & (w < 2 * k)
        out_params["k"] = k
    else:  # pragma: no cover - enum exhausted above
        raise ParameterError(f"unknown family {fam}")
    return BooleanFunction.from_table(n, vals.astype(np.uint8), fam.value, out_params,
                                      dont_care=dont_care)
