"""Channel-level error accounting for mixtures of sketch circuits.

For a mixture of classical oracles ``W_g`` the channel's diamond distance to
``U_f`` is at most ``4 * max_x Pr[g(x) != f(x)]``; the report computes that
certificate from the exact per-input oracles and backs it with Monte Carlo
estimates checked against Wilson score intervals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np
from scipy import stats

from ..errors import ParameterError, ResourceError
from ..sketch.generators import FourierSamplingGenerator, OrReductionGenerator, SketchGenerator
from .statevector import StateVector, trace_distance

WILSON_CONFIDENCE = 0.99
EXHAUSTIVE_MAX_ARITY = 16
_CHUNK = 1 << 22


def wilson_interval(successes, trials, confidence: float = WILSON_CONFIDENCE):
    """Wilson score interval(s); vectorized over ``successes``."""
    if np.any(np.asarray(trials) <= 0):
        raise ParameterError("trials must be positive")
    z = stats.norm.ppf(0.5 + confidence / 2)
    n = np.asarray(trials, dtype=float)
    p = np.asarray(successes, dtype=float) / n
    denom = 1 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * np.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return np.clip(centre - half, 0, 1), np.clip(centre + half, 0, 1)


# -- Monte Carlo ---------------------------------------------------------------------

def _mc_or(gen: OrReductionGenerator, xs: np.ndarray, trials: int, rng) -> np.ndarray:
    """Independent sketches for every (input, trial) pair."""
    reduced = xs ^ ((1 << gen.n) - 1) if gen.framing == "and" else xs
    counts = np.zeros(xs.size, dtype=np.int64)
    if gen.k == 0:
        return np.where(reduced != 0, trials, 0)
    per_x = trials * gen.k
    step = max(1, _CHUNK // per_x)
    for lo in range(0, xs.size, step):
        block = reduced[lo:lo + step]
        masks = rng.integers(0, 1 << gen.n, size=(block.size, trials, gen.k), dtype=np.int64)
        fires = (np.bitwise_count(masks & block[:, None, None]) & 1).any(axis=2)
        truth = (block != 0)[:, None]
        counts[lo:lo + step] = (fires != truth).sum(axis=1)
    return counts


def _mc_fourier(gen: FourierSamplingGenerator, xs: np.ndarray, trials: int, rng) -> np.ndarray:
    s = gen.sampler
    cutoff = _cutoff(gen)
    counts = np.zeros(xs.size, dtype=np.int64)
    per_x = trials * gen.k
    step = max(1, _CHUNK // per_x)
    for lo in range(0, xs.size, step):
        block = xs[lo:lo + step]
        idx = s.draw_indices(rng, (block.size, trials, gen.k))
        masks = s.support[idx]
        plus = (np.bitwise_count(masks & block[:, None, None]) & 1) == (s.signs[idx] < 0)
        g = plus.sum(axis=2) >= cutoff
        truth = gen.f.table[block].astype(bool)[:, None]
        counts[lo:lo + step] = (g != truth).sum(axis=1)
    return counts


def _cutoff(gen: FourierSamplingGenerator) -> int:
    from ..sketch.core import threshold_cutoff

    return threshold_cutoff(gen.norm, gen.k)


def _mc_generic(gen: SketchGenerator, xs: np.ndarray, trials: int, rng) -> np.ndarray:
    """One sketch per trial, shared by all inputs (per-input marginals stay exact)."""
    truth = np.array([gen.target_value(int(x)) for x in xs], dtype=np.uint8)
    counts = np.zeros(xs.size, dtype=np.int64)
    for _ in range(trials):
        counts += gen.sample(rng).evaluate_many(xs) != truth
    return counts


def monte_carlo_errors(gen: SketchGenerator, xs, trials: int, rng) -> tuple[np.ndarray, bool]:
    """Per-input error counts; the flag says whether inputs used independent sketches."""
    xs = np.asarray(xs, dtype=np.int64)
    if isinstance(gen, OrReductionGenerator) and gen.n <= 62:
        return _mc_or(gen, xs, trials, rng), True
    if isinstance(gen, FourierSamplingGenerator):
        return _mc_fourier(gen, xs, trials, rng), True
    return _mc_generic(gen, xs, trials, rng), False


# -- the report ------------------------------------------------------------------------

@dataclass
class ChannelErrorReport:
    n: int
    k: int
    generator: dict[str, Any]
    trials: int
    seed: int | None
    inputs: list[int]
    empirical: list[float]
    error_counts: list[int]
    exact: list[Fraction]
    max_error: float
    max_error_exact: Fraction
    analytic_bound: float
    closed_form_certificate: float
    diamond_certificate: float
    wilson_low: list[float]
    wilson_high: list[float]
    flagged: list[int]
    independent_inputs: bool
    empirical_max_error: float
    warnings: list[str] = field(default_factory=list)

    @property
    def certificate_exact(self) -> Fraction:
        return 4 * self.max_error_exact

    def within_wilson(self) -> bool:
        return not self.flagged

    def to_json(self, per_input: bool = True) -> dict[str, Any]:
        out = {
            "n": self.n,
            "k": self.k,
            "generator": self.generator,
            "trials": self.trials,
            "seed": self.seed,
            "max_error": self.max_error,
            "max_error_exact": f"{self.max_error_exact.numerator}/{self.max_error_exact.denominator}",
            "empirical_max_error": self.empirical_max_error,
            "analytic_bound": self.analytic_bound,
            "closed_form_certificate": self.closed_form_certificate,
            "diamond_certificate": self.diamond_certificate,
            "wilson_confidence": WILSON_CONFIDENCE,
            "flagged_inputs": self.flagged,
            "independent_inputs": self.independent_inputs,
            "num_inputs": len(self.inputs),
            "warnings": self.warnings,
        }
        if per_input:
            out["per_input"] = [
                {"x": x, "errors": c, "empirical": e, "exact": f"{q.numerator}/{q.denominator}",
                 "wilson": [lo, hi]}
                for x, c, e, q, lo, hi in zip(self.inputs, self.error_counts, self.empirical,
                                              self.exact, self.wilson_low, self.wilson_high)
            ]
        return out


def channel_error_report(gen: SketchGenerator, trials: int, rng: np.random.Generator, *,
                         seed: int | None = None, xs=None) -> ChannelErrorReport:
    if trials < 1:
        raise ParameterError("trials must be at least 1")
    warnings: list[str] = []
    if xs is None:
        if gen.n > EXHAUSTIVE_MAX_ARITY:
            raise ResourceError(f"pass an input subset for n > {EXHAUSTIVE_MAX_ARITY}")
        xs = gen.valid_inputs()
    xs = np.asarray(xs, dtype=np.int64)
    if xs.size == 0:
        raise ParameterError("no inputs to check")
    counts, independent = monte_carlo_errors(gen, xs, trials, rng)
    exact = [gen.exact_error(int(x)) for x in xs]
    exact_f = np.array([float(q) for q in exact])
    lo, hi = wilson_interval(counts, trials)
    flagged = [int(x) for x, e, a, b in zip(xs, exact_f, lo, hi) if not a - 1e-12 <= e <= b + 1e-12]
    if flagged:
        warnings.append(f"{len(flagged)} input(s) outside the {WILSON_CONFIDENCE:.0%} Wilson interval")
    max_exact = max(exact)
    bound = gen.closed_form_bound()
    return ChannelErrorReport(
        n=gen.n, k=gen.k, generator=gen.describe(), trials=trials, seed=seed,
        inputs=[int(x) for x in xs], empirical=(counts / trials).tolist(),
        error_counts=counts.tolist(), exact=exact, max_error=float(max_exact),
        max_error_exact=max_exact, analytic_bound=bound,
        closed_form_certificate=min(4 * bound, 2.0) if bound else 0.0,
        diamond_certificate=float(4 * max_exact),
        wilson_low=lo.tolist(), wilson_high=hi.tolist(), flagged=flagged,
        independent_inputs=independent, empirical_max_error=float(counts.max() / trials),
        warnings=warnings,
    )


# -- exact channel at tiny sizes --------------------------------------------------------

def oracle_permutation(n: int, values: np.ndarray) -> np.ndarray:
    """Permutation of basis indices on n+1 wires for ``|x, b> -> |x, b XOR v(x)>``."""
    idx = np.arange(1 << (n + 1), dtype=np.int64)
    x = idx & ((1 << n) - 1)
    return idx ^ (values[x].astype(np.int64) << n)


def _apply_perm(perm: np.ndarray, amps: np.ndarray) -> np.ndarray:
    out = np.empty_like(amps)
    out[perm] = amps
    return out


def exact_channel_tiny(gen: SketchGenerator, psi: StateVector) -> tuple[np.ndarray, float]:
    """Exact output ``sum_g p(g) W_g |psi><psi| W_g^dag`` and its trace distance to ``U_f|psi>``."""
    n = gen.n
    if n > 3 or gen.k > 3:
        raise ResourceError("exact channel enumeration supports n <= 3 and k <= 3")
    if psi.num_qubits != n + 1:
        raise ParameterError(f"input state must live on n + 1 = {n + 1} wires")
    xs = np.arange(1 << n, dtype=np.int64)
    rho = np.zeros((1 << (n + 1),) * 2, dtype=np.complex128)
    total = Fraction(0)
    for p, sk in gen.enumerate_sketches():
        out = _apply_perm(oracle_permutation(n, sk.evaluate_many(xs)), psi.amplitudes)
        rho += float(p) * np.outer(out, out.conj())
        total += p
    if total != 1:
        raise AssertionError(f"sketch enumeration has total mass {total}")
    truth = np.array([gen.target_value(int(x)) for x in xs], dtype=np.uint8)
    ideal = _apply_perm(oracle_permutation(n, truth), psi.amplitudes)
    return rho, trace_distance(rho, np.outer(ideal, ideal.conj()))
