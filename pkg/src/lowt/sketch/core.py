"""Parity sketches: random XOR queries combined by a small inner function.

A :class:`ParitySketch` is one deterministic approximation ``g`` of a target
``f``. It queries ``XOR_{S_1}(x), ..., XOR_{S_k}(x)`` and feeds the bits to an
inner function:

* :class:`OrInner` -- ``OR_k`` of the parities (optionally negated);
* :class:`SignedThreshold` -- round ``(norm/k) * sum_i sign_i * chi_{S_i}(x)``
  at 1/2, ties going to 1;
* :class:`FormulaInner` -- a small tree of threshold / XOR gates over
  (possibly negated) parity literals, used by the benchmark family constructions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence, Union

import mpmath
import numpy as np

from ..boolfn import BooleanFunction, FourierSpectrum, walsh_hadamard
from ..errors import ArityError, DegenerateFunctionError, ParameterError
from ..rng import random_mask

HALF = Fraction(1, 2)


# -- inner functions ---------------------------------------------------------

@dataclass(frozen=True)
class OrInner:
    negate: bool = False

    variant = "or"

    def evaluate(self, bits: Sequence[int]) -> int:
        return int(any(bits)) ^ self.negate

    def evaluate_array(self, bits: np.ndarray) -> np.ndarray:
        out = bits.any(axis=1) if bits.shape[1] else np.zeros(bits.shape[0], dtype=bool)
        return out ^ self.negate


@dataclass(frozen=True)
class SignedThreshold:
    signs: tuple[int, ...]
    norm: Fraction

    variant = "signed_threshold"

    def __post_init__(self):
        if any(s not in (1, -1) for s in self.signs):
            raise ValueError("signs must be +1 or -1")
        if self.norm <= 0:
            raise ValueError("norm must be positive")

    @property
    def k(self) -> int:
        return len(self.signs)

    @property
    def cutoff(self) -> int:
        """Least count ``b`` of +1 terms with ``(norm/k)(2b-k) >= 1/2``; k+1 if none."""
        k = self.k
        if k == 0:
            return 1
        need = (k + Fraction(k) / (2 * self.norm)) / 2
        return min(k + 1, max(0, math.ceil(need)))

    def evaluate(self, bits: Sequence[int]) -> int:
        k = self.k
        if len(bits) != k:
            raise ArityError("threshold arity mismatch")
        if k == 0:
            return 0
        total = sum(s * (1 - 2 * b) for s, b in zip(self.signs, bits))
        return int(self.norm * total / k >= HALF)

    def evaluate_array(self, bits: np.ndarray) -> np.ndarray:
        signs = np.asarray(self.signs, dtype=np.int64)
        plus = (bits.astype(bool) ^ (signs > 0)).sum(axis=1)
        return plus >= self.cutoff


@dataclass(frozen=True)
class Lit:
    index: int
    negate: bool = False


@dataclass(frozen=True)
class Threshold:
    """1 iff at least ``cutoff`` children are true (then optionally negated)."""

    children: tuple["Node", ...]
    cutoff: int
    negate: bool = False


@dataclass(frozen=True)
class Xor:
    children: tuple["Node", ...]
    negate: bool = False


Node = Union[Lit, Threshold, Xor]


def or_(*children: Node, negate: bool = False) -> Threshold:
    return Threshold(tuple(children), 1, negate)


def and_(*children: Node, negate: bool = False) -> Threshold:
    return Threshold(tuple(children), len(children), negate)


def _eval_node(node: Node, bits) -> int:
    if isinstance(node, Lit):
        return int(bits[node.index]) ^ node.negate
    vals = [_eval_node(c, bits) for c in node.children]
    if isinstance(node, Threshold):
        return int(sum(vals) >= node.cutoff) ^ node.negate
    return (sum(vals) & 1) ^ node.negate


def _eval_node_array(node: Node, bits: np.ndarray) -> np.ndarray:
    if isinstance(node, Lit):
        return bits[:, node.index].astype(bool) ^ node.negate
    vals = [_eval_node_array(c, bits) for c in node.children]
    if isinstance(node, Threshold):
        count = np.sum(vals, axis=0) if vals else np.zeros(bits.shape[0], dtype=np.int64)
        return (count >= node.cutoff) ^ node.negate
    acc = np.zeros(bits.shape[0], dtype=bool)
    for v in vals:
        acc ^= v
    return acc ^ node.negate


def iter_nodes(node: Node) -> Iterator[Node]:
    """Post-order traversal."""
    if not isinstance(node, Lit):
        for c in node.children:
            yield from iter_nodes(c)
    yield node


@dataclass(frozen=True)
class FormulaInner:
    root: Node

    variant = "formula"

    def leaves(self) -> list[int]:
        return [nd.index for nd in iter_nodes(self.root) if isinstance(nd, Lit)]

    def evaluate(self, bits: Sequence[int]) -> int:
        return _eval_node(self.root, bits)

    def evaluate_array(self, bits: np.ndarray) -> np.ndarray:
        return _eval_node_array(self.root, bits)


InnerFunction = Union[OrInner, SignedThreshold, FormulaInner]


# -- the sketch ----------------------------------------------------------------

@dataclass(frozen=True)
class ParitySketch:
    """``g(x) = inner(XOR_{S_1}(x'), ..., XOR_{S_k}(x'))`` with ``x' = x`` or
    ``x XOR 1^n`` when ``flip_inputs`` is set (the AND / Toffoli framing)."""

    n: int
    subsets: tuple[int, ...]
    inner: InnerFunction
    flip_inputs: bool = False
    seed: int | None = field(default=None, compare=False)
    stream: tuple[int, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise ArityError("sketch arity must be positive")
        if any(not 0 <= S < (1 << self.n) for S in self.subsets):
            raise ArityError(f"subset mask out of range for arity {self.n}")
        if isinstance(self.inner, SignedThreshold) and self.inner.k != len(self.subsets):
            raise ValueError("one sign per sampled subset is required")
        if isinstance(self.inner, FormulaInner):
            if any(not 0 <= i < len(self.subsets) for i in self.inner.leaves()):
                raise ValueError("formula literal refers to a missing parity")

    @property
    def k(self) -> int:
        return len(self.subsets)

    def parities(self, x: int) -> list[int]:
        if not 0 <= x < (1 << self.n):
            raise ArityError(f"input {x} out of range for arity {self.n}")
        if self.flip_inputs:
            x ^= (1 << self.n) - 1
        return [(S & x).bit_count() & 1 for S in self.subsets]

    def parity_matrix(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.int64)
        if self.n > 62:
            return np.array([self.parities(int(x)) for x in xs], dtype=bool).reshape(len(xs), self.k)
        if xs.size and (xs.min() < 0 or xs.max() >> self.n):
            raise ArityError("input out of range")
        if self.flip_inputs:
            xs = xs ^ ((1 << self.n) - 1)
        masks = np.asarray(self.subsets, dtype=np.int64)
        return (np.bitwise_count(xs[:, None] & masks[None, :]) & 1).astype(bool)

    def evaluate_many(self, xs: np.ndarray) -> np.ndarray:
        return np.asarray(self.inner.evaluate_array(self.parity_matrix(xs)), dtype=np.uint8)


def eval_sketch(sk: ParitySketch, x: int) -> int:
    return sk.inner.evaluate(sk.parities(x))


# -- sampling ------------------------------------------------------------------

def sample_or_sketch(n: int, k: int, rng: np.random.Generator, *, negate: bool = False,
                     flip_inputs: bool = False) -> ParitySketch:
    """k independent uniform subsets of the n variables, combined by OR."""
    if k < 0:
        raise ParameterError("k must be non-negative")
    masks = tuple(random_mask(rng, n) for _ in range(k))
    return ParitySketch(n, masks, OrInner(negate), flip_inputs)


class FourierSampler:
    """Draws subsets from ``p(S) = |f^(S)| / ||f^||_1`` by exact inversion.

    Cumulative weights are the integer numerators ``|2^n f^(S)|``, so the draw
    is a single uniform integer below their sum: no rejection, no rounding.
    """

    def __init__(self, f: BooleanFunction, spec: FourierSpectrum | None = None):
        self.f = f
        self.spec = spec if spec is not None else walsh_hadamard(f)
        supp = self.spec.support()
        if supp.size == 0:
            raise DegenerateFunctionError("constant-0 target has zero Fourier 1-norm")
        self.support = supp
        num = self.spec.numerators[supp]
        self.weights = np.abs(num)
        self.signs = np.sign(num).astype(np.int64)
        self.cumulative = np.cumsum(self.weights)
        self.total = int(self.cumulative[-1])
        self.norm = self.spec.one_norm

    def draw_indices(self, rng: np.random.Generator, size) -> np.ndarray:
        u = rng.integers(0, self.total, size=size, dtype=np.int64)
        return np.searchsorted(self.cumulative, u, side="right")

    def sample(self, k: int, rng: np.random.Generator) -> ParitySketch:
        if k < 1:
            raise ParameterError("Fourier sampling needs k >= 1")
        idx = self.draw_indices(rng, k)
        masks = tuple(int(m) for m in self.support[idx])
        signs = tuple(int(s) for s in self.signs[idx])
        return ParitySketch(self.f.n, masks, SignedThreshold(signs, self.norm))

    def hit_weights(self) -> np.ndarray:
        """For every x: sum of ``|numerator(S)|`` over S with ``sign(f^(S)) chi_S(x) = +1``.

        Computed with one fast transform of the signed numerators.
        """
        from ..boolfn import fwht

        signed = fwht(self.spec.numerators)
        return (self.total + signed) // 2


def sample_fourier_sketch(f: BooleanFunction, k: int, rng: np.random.Generator,
                          sampler: FourierSampler | None = None) -> ParitySketch:
    return (sampler or FourierSampler(f)).sample(k, rng)


# -- exact error oracles -------------------------------------------------------

def exact_error_or(n: int, k: int, x: int) -> Fraction:
    """``Pr[OR_n(x) != g(x)]`` over uniform ``S_1..S_k``: 0 at x = 0, else 2^-k."""
    if not 0 <= x < (1 << n):
        raise ArityError(f"input {x} out of range for arity {n}")
    if k < 0:
        raise ParameterError("k must be non-negative")
    return Fraction(0) if x == 0 else Fraction(1, 1 << k)


@lru_cache(maxsize=4096)
def binomial_upper_tail(k: int, num: int, den: int, c: int) -> Fraction:
    """``Pr[Bin(k, num/den) >= c]`` exactly."""
    if c <= 0:
        return Fraction(1)
    if c > k:
        return Fraction(0)
    rest = den - num
    total = sum(math.comb(k, j) * num**j * rest ** (k - j) for j in range(c, k + 1))
    return Fraction(total, den**k)


def threshold_cutoff(norm: Fraction, k: int) -> int:
    return SignedThreshold((1,) * k, norm).cutoff if k else 1


def fourier_error_from_hits(k: int, hits: int, total: int, norm: Fraction, fx: int) -> Fraction:
    c = threshold_cutoff(norm, k)
    up = binomial_upper_tail(k, hits, total, c)
    return 1 - up if fx else up


def exact_error_fourier(f: BooleanFunction, k: int, x: int,
                        sampler: FourierSampler | None = None) -> Fraction:
    """Exact ``Pr[g(x) != f(x)]`` for the Fourier-sampling sketch with k draws.

    Each draw contributes ``+-norm/k``; the number of ``+`` terms is
    ``Binomial(k, q_x)`` with ``q_x`` the p-mass of subsets whose signed
    character is +1 at x.
    """
    if k < 1:
        raise ParameterError("k must be >= 1")
    s = sampler or FourierSampler(f)
    if not 0 <= x < (1 << f.n):
        raise ArityError(f"input {x} out of range for arity {f.n}")
    chi = 1 - 2 * (np.bitwise_count(np.int64(x) & s.support) & 1).astype(np.int64)
    hits = int(s.weights[(s.signs * chi) > 0].sum())
    return fourier_error_from_hits(k, hits, s.total, s.norm, f.eval(x))


def hoeffding_bound(k: int, norm: Fraction | float) -> float:
    """Per-input bound ``2 exp(-k / (8 ||f^||_1^2))``."""
    return 2.0 * math.exp(-k / (8.0 * float(norm) ** 2))


# -- parameter choice ----------------------------------------------------------

def _as_fraction(eps) -> Fraction:
    value = Fraction(eps) if not isinstance(eps, str) else Fraction(eps)
    if not 0 < value < 1:
        raise ParameterError(f"epsilon must lie in (0, 1), got {eps}")
    return value


def choose_k_or(epsilon) -> int:
    """``ceil(log2(1/eps)) + 2`` computed exactly from the binary value of eps."""
    e = _as_fraction(epsilon)
    t = 0
    while (1 << t) * e < 1:
        t += 1
    return t + 2


_SNAP_RTOL = mpmath.mpf("1e-12")


def choose_k_fourier(f_or_norm, epsilon) -> int:
    """``ceil(8 ||f^||_1^2 ln(8/eps))``.

    Evaluated at 50 significant digits from the exact norm and the exact
    binary value of ``epsilon``. A product within 1e-12 (relative) of an
    integer is taken to be that integer, since a float epsilon cannot resolve
    the boundary any finer.
    """
    if isinstance(f_or_norm, BooleanFunction):
        norm = walsh_hadamard(f_or_norm).one_norm
    else:
        norm = Fraction(f_or_norm)
    if norm == 0:
        raise DegenerateFunctionError("constant-0 target has zero Fourier 1-norm")
    e = _as_fraction(epsilon)
    with mpmath.workdps(50):
        val = 8 * mpmath.mpf(norm.numerator) ** 2 / mpmath.mpf(norm.denominator) ** 2 \
            * mpmath.log(8 * mpmath.mpf(e.denominator) / e.numerator)
        nearest = mpmath.nint(val)
        if abs(val - nearest) <= _SNAP_RTOL * max(1, abs(val)):
            return int(nearest)
        return int(mpmath.ceil(val))
