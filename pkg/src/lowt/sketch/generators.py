"""Sketch generators: probability distributions over parity sketches.

Each generator samples sketches, knows its target, and reports the exact
per-input error probability ``Pr[g(x) != f(x)]`` over its own randomness.

The benchmark family constructions are tuned so that every valid input errs with
probability at most ``epsilon / 4``. The mixed circuit built from them is
then within ``epsilon`` of ``U_f`` in diamond distance by the
``4 * max_x error`` certificate.
"""

from __future__ import annotations

from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import product
from typing import Any, Iterator

import numpy as np
from scipy import stats

from ..boolfn import BooleanFunction, Family, gf2_rank, make_named, row_masks, xor_s
from ..errors import ArityError, ParameterError, ResourceError
from ..rng import make_rng, random_mask
from .core import (
    FormulaInner,
    FourierSampler,
    Lit,
    OrInner,
    ParitySketch,
    Threshold,
    Xor,
    and_,
    binomial_upper_tail,
    choose_k_fourier,
    choose_k_or,
    exact_error_or,
    fourier_error_from_hits,
    hoeffding_bound,
    or_,
    sample_or_sketch,
)

TINY_ENUMERATION_LIMIT = 1 << 12


def _frac(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


class SketchGenerator:
    """Base class. Subclasses set ``kind``, ``n`` and ``k`` (parities per sketch)."""

    kind: str = "abstract"
    n: int
    k: int
    one_sided: bool = False

    # -- target ------------------------------------------------------------
    @cached_property
    def target(self) -> BooleanFunction:
        raise NotImplementedError

    def target_value(self, x: int) -> int:
        return self.target.eval(x)

    def valid_inputs(self) -> np.ndarray:
        if self.n > 24:
            raise ResourceError("exhaustive input loops need n <= 24")
        return self.target.valid_inputs

    # -- sampling ----------------------------------------------------------
    def sample(self, rng: np.random.Generator) -> ParitySketch:
        raise NotImplementedError

    def sample_seeded(self, seed: int, *stream: int) -> ParitySketch:
        sk = self.sample(make_rng(seed, *stream))
        return ParitySketch(sk.n, sk.subsets, sk.inner, sk.flip_inputs, seed, tuple(stream))

    # -- error accounting --------------------------------------------------
    def exact_error(self, x: int) -> Fraction:
        raise NotImplementedError

    def closed_form_bound(self) -> float:
        """Per-input error bound in closed form (no enumeration)."""
        raise NotImplementedError

    def max_exact_error(self, xs=None) -> Fraction:
        xs = self.valid_inputs() if xs is None else xs
        return max((self.exact_error(int(x)) for x in xs), default=Fraction(0))

    def enumerate_sketches(self) -> Iterator[tuple[Fraction, ParitySketch]]:
        raise NotImplementedError(f"{self.kind} generator has no finite enumeration")

    def describe(self) -> dict[str, Any]:
        return {"kind": self.kind, "n": self.n, "k": self.k}


class OrReductionGenerator(SketchGenerator):
    """Uniform random subsets, OR-combined.

    ``framing="or"`` targets ``U_{OR_n}``. ``framing="and"`` targets
    ``U_{AND_n}`` (the Toffoli gate on n controls): inputs are complemented
    and the output negated, so ``g(x) = NOT OR_k(XOR_{S_i}(x XOR 1^n))``.
    """

    kind = "or-reduction"
    one_sided = True

    def __init__(self, n: int, k: int, framing: str = "or"):
        if n < 1:
            raise ParameterError("n must be positive")
        if k < 0:
            raise ParameterError("k must be non-negative")
        if framing not in ("or", "and"):
            raise ParameterError(f"unknown framing {framing!r}")
        self.n, self.k, self.framing = n, k, framing

    @classmethod
    def for_epsilon(cls, n: int, epsilon, framing: str = "or") -> "OrReductionGenerator":
        return cls(n, choose_k_or(epsilon), framing)

    @cached_property
    def target(self) -> BooleanFunction:
        return make_named(self.framing, n=self.n)

    def _reduced(self, x: int) -> int:
        if not 0 <= x < (1 << self.n):
            raise ArityError(f"input {x} out of range for arity {self.n}")
        return x ^ ((1 << self.n) - 1) if self.framing == "and" else x

    def target_value(self, x: int) -> int:
        return int(self._reduced(x) != 0) ^ (self.framing == "and")

    def sample(self, rng):
        flip = self.framing == "and"
        return sample_or_sketch(self.n, self.k, rng, negate=flip, flip_inputs=flip)

    def exact_error(self, x: int) -> Fraction:
        return exact_error_or(self.n, self.k, self._reduced(x))

    def closed_form_bound(self) -> float:
        return 2.0 ** -self.k

    def enumerate_sketches(self):
        if (1 << (self.n * self.k)) > TINY_ENUMERATION_LIMIT:
            raise ResourceError("sketch space too large to enumerate")
        p = Fraction(1, 1 << (self.n * self.k))
        flip = self.framing == "and"
        for masks in product(range(1 << self.n), repeat=self.k):
            yield p, ParitySketch(self.n, masks, OrInner(flip), flip)

    def describe(self):
        return {**super().describe(), "framing": self.framing}


class FourierSamplingGenerator(SketchGenerator):
    """Subsets drawn from ``|f^(S)| / ||f^||_1``; signed sum rounded at 1/2."""

    kind = "fourier-sampling"

    def __init__(self, f: BooleanFunction, k: int):
        if k < 1:
            raise ParameterError("Fourier sampling needs k >= 1")
        self.f, self.n, self.k = f, f.n, k
        self.sampler = FourierSampler(f)

    @classmethod
    def for_epsilon(cls, f: BooleanFunction, epsilon) -> "FourierSamplingGenerator":
        return cls(f, choose_k_fourier(f, epsilon))

    @cached_property
    def target(self):
        return self.f

    @property
    def norm(self) -> Fraction:
        return self.sampler.norm

    def sample(self, rng):
        return self.sampler.sample(self.k, rng)

    @cached_property
    def _hits(self) -> np.ndarray:
        return self.sampler.hit_weights()

    def exact_error(self, x: int) -> Fraction:
        if not 0 <= x < (1 << self.n):
            raise ArityError(f"input {x} out of range for arity {self.n}")
        return fourier_error_from_hits(self.k, int(self._hits[x]), self.sampler.total,
                                       self.norm, self.f.eval(x))

    def closed_form_bound(self) -> float:
        return hoeffding_bound(self.k, self.norm)

    def enumerate_sketches(self):
        supp = self.sampler.support
        if supp.size ** self.k > TINY_ENUMERATION_LIMIT:
            raise ResourceError("sketch space too large to enumerate")
        probs = [Fraction(int(w), self.sampler.total) for w in self.sampler.weights]
        from .core import SignedThreshold

        for idx in product(range(supp.size), repeat=self.k):
            p = Fraction(1)
            for i in idx:
                p *= probs[i]
            masks = tuple(int(supp[i]) for i in idx)
            signs = tuple(int(self.sampler.signs[i]) for i in idx)
            yield p, ParitySketch(self.n, masks, SignedThreshold(signs, self.norm))

    def describe(self):
        return {**super().describe(), "target": self.f.label(), "one_norm": _frac(self.norm)}


class ParityOrGenerator(SketchGenerator):
    """``f(x) = negate XOR OR_r(XOR_{h_1}(x), ..., XOR_{h_r}(x))`` for fixed rows h_i.

    Code membership (``negate=True``, rows = parity checks) and MEQ (rows =
    XORs of adjacent matrix rows) are of this form. When ``r <= k`` the sketch
    is the deterministic row list (zero error); otherwise each of the k queries
    is the XOR of a uniformly random subset of rows, which is the OR reduction
    applied to the r row parities.
    """

    one_sided = True

    def __init__(self, target: BooleanFunction, rows: list[int], k: int, *, negate: bool = True,
                 kind: str = "parity-or", deterministic: bool | None = None):
        if not rows:
            raise ParameterError("need at least one row")
        self._target, self.rows, self.negate, self.kind = target, list(rows), negate, kind
        self.n = target.n
        self.deterministic = len(rows) <= k if deterministic is None else deterministic
        self.k = len(rows) if self.deterministic else k
        self._row_rank = gf2_rank(self.rows)

    @cached_property
    def target(self):
        return self._target

    def _fires(self, x: int) -> bool:
        return any(xor_s(h, x) for h in self.rows)

    def target_value(self, x: int) -> int:
        return int(self._fires(x)) ^ self.negate

    def sample(self, rng):
        if self.deterministic:
            return ParitySketch(self.n, tuple(self.rows), OrInner(self.negate))
        masks = []
        for _ in range(self.k):
            pick = random_mask(rng, len(self.rows))
            m = 0
            for i, h in enumerate(self.rows):
                if pick >> i & 1:
                    m ^= h
            masks.append(m)
        return ParitySketch(self.n, tuple(masks), OrInner(self.negate))

    def exact_error(self, x: int) -> Fraction:
        if not 0 <= x < (1 << self.n):
            raise ArityError(f"input {x} out of range for arity {self.n}")
        if self.deterministic or not self._fires(x):
            return Fraction(0)
        return Fraction(1, 1 << self.k)

    def closed_form_bound(self) -> float:
        return 0.0 if self.deterministic else 2.0 ** -self.k

    def describe(self):
        return {**super().describe(), "rows": len(self.rows), "deterministic": self.deterministic}


# -- Hamming weight <= d -------------------------------------------------------

@lru_cache(maxsize=None)
def _occupancy(w: int, buckets: int) -> tuple[Fraction, ...]:
    """Distribution of the number of occupied buckets after w uniform throws."""
    dist = [Fraction(1)] + [Fraction(0)] * buckets
    for _ in range(w):
        nxt = [Fraction(0)] * (buckets + 1)
        for o, p in enumerate(dist):
            if p:
                nxt[o] += p * Fraction(o, buckets)
                if o < buckets:
                    nxt[o + 1] += p * Fraction(buckets - o, buckets)
        dist = nxt
    return tuple(dist)


@lru_cache(maxsize=None)
def hw_rep_false_accept(w: int, d: int, buckets: int, j: int) -> Fraction:
    """Pr[one repetition reports at most d nonempty buckets] when |x| = w."""
    detect = Fraction((1 << j) - 1, 1 << j)
    total = Fraction(0)
    for o, p in enumerate(_occupancy(w, buckets)):
        if p:
            total += p * (1 - binomial_upper_tail(o, detect.numerator, detect.denominator, d + 1))
    return total


class HammingWeightGenerator(SketchGenerator):
    """``HW^d_n``: is ``|x| <= d``?

    One repetition hashes every coordinate into one of ``4 d^2`` buckets,
    approximates each bucket's OR with ``j`` random parities restricted to
    the bucket, and accepts iff at most d buckets look nonempty. Inputs with
    ``|x| <= d`` are always accepted; the final answer is the AND of R
    repetitions, which only shrinks the false-accept probability.
    """

    kind = "hw"
    one_sided = True

    def __init__(self, n: int, d: int, epsilon):
        if d < 1 or d > n:
            raise ParameterError(f"need 1 <= d <= n, got d={d}, n={n}")
        self.n, self.d = n, d
        self.buckets = 4 * d * d
        self.epsilon = Fraction(epsilon)
        goal = self.epsilon / 4
        best = None
        for j in range(1, 13):
            q = hw_rep_false_accept(d + 1, d, self.buckets, j)
            R = 1
            while q**R > goal:
                R += 1
            cost = R * self.buckets * j
            if best is None or cost < best[0]:
                best = (cost, j, R)
        _, self.j, self.reps = best
        self.k = self.reps * self.buckets * self.j

    @cached_property
    def target(self):
        return make_named(Family.HW, n=self.n, d=self.d)

    def target_value(self, x):
        return int(x.bit_count() <= self.d)

    @cached_property
    def formula(self) -> FormulaInner:
        reps = []
        for r in range(self.reps):
            base = r * self.buckets * self.j
            bucket_ors = [or_(*(Lit(base + b * self.j + l) for l in range(self.j)))
                          for b in range(self.buckets)]
            reps.append(Threshold(tuple(bucket_ors), self.d + 1, negate=True))
        return FormulaInner(and_(*reps))

    def sample(self, rng):
        full = (1 << self.n) - 1
        masks = []
        for _ in range(self.reps):
            h = rng.integers(0, self.buckets, size=self.n)
            for b in range(self.buckets):
                bucket = sum(1 << i for i in np.flatnonzero(h == b).tolist())
                for _ in range(self.j):
                    masks.append(random_mask(rng, self.n) & bucket & full)
        return ParitySketch(self.n, tuple(masks), self.formula)

    def exact_error(self, x):
        if not 0 <= x < (1 << self.n):
            raise ArityError(f"input {x} out of range for arity {self.n}")
        w = x.bit_count()
        if w <= self.d:
            return Fraction(0)
        return hw_rep_false_accept(w, self.d, self.buckets, self.j) ** self.reps

    def closed_form_bound(self):
        return float(hw_rep_false_accept(self.d + 1, self.d, self.buckets, self.j) ** self.reps)

    def describe(self):
        return {**super().describe(), "d": self.d, "buckets": self.buckets, "parities_per_bucket": self.j,
                "repetitions": self.reps}


# -- gap Hamming weight ----------------------------------------------------------

def _gap_hit_probability(w: int, kk: int, j: int) -> Fraction:
    miss = Fraction(2 * kk - 1, 2 * kk)
    return (1 - miss**w) * Fraction((1 << j) - 1, 1 << j)


class GapHammingWeightGenerator(SketchGenerator):
    """``HW^{k,2k}_n`` under the promise ``|x| <= k or |x| >= 2k``; output 1 iff ``|x| <= k``.

    A repetition keeps each coordinate with probability ``1/(2k)`` and
    approximates the OR over the kept coordinates with j random parities.
    The hit rate is at most ``a(k)`` on small-weight inputs and at least
    ``a(2k)`` on large-weight ones. R repetitions are counted and the count
    is thresholded between the two.
    """

    kind = "hw-gap"

    def __init__(self, n: int, kk: int, epsilon):
        if kk < 1 or 2 * kk > n:
            raise ParameterError(f"need 1 <= k and 2k <= n, got k={kk}, n={n}")
        self.n, self.kk = n, kk
        self.epsilon = Fraction(epsilon)
        self.j, self.reps, self.tau = self._tune(self.epsilon / 4)
        self.k = self.j * self.reps

    def _tune(self, goal: Fraction) -> tuple[int, int, int]:
        best = None
        g = float(goal)
        for j in range(1, 11):
            lo = _gap_hit_probability(self.kk, self.kk, j)
            hi = _gap_hit_probability(2 * self.kk, self.kk, j)
            for R in range(1, 5000):
                if best is not None and R * j >= best[0]:
                    break
                taus = np.arange(0, R + 2)
                err_lo = stats.binom.sf(taus - 1, R, float(lo))
                err_hi = stats.binom.cdf(taus - 1, R, float(hi))
                ok = np.flatnonzero((err_lo <= g * 0.999) & (err_hi <= g * 0.999))
                if ok.size == 0:
                    continue
                tau = int(taus[ok[0]])
                if self._tail_errors(j, R, tau, lo, hi) <= goal:
                    best = (R * j, j, R, tau)
                    break
        if best is None:
            raise ParameterError("could not tune the gap-Hamming construction")
        return best[1], best[2], best[3]

    @staticmethod
    def _tail_errors(j, R, tau, lo: Fraction, hi: Fraction) -> Fraction:
        err_lo = binomial_upper_tail(R, lo.numerator, lo.denominator, tau)
        err_hi = 1 - binomial_upper_tail(R, hi.numerator, hi.denominator, tau)
        return max(err_lo, err_hi)

    @cached_property
    def target(self):
        return make_named(Family.HW_GAP, n=self.n, k=self.kk)

    def target_value(self, x):
        return int(x.bit_count() <= self.kk)

    @cached_property
    def formula(self) -> FormulaInner:
        reps = [or_(*(Lit(r * self.j + l) for l in range(self.j))) for r in range(self.reps)]
        return FormulaInner(Threshold(tuple(reps), self.tau, negate=True))

    def sample(self, rng):
        masks = []
        for _ in range(self.reps):
            keep = rng.integers(0, 2 * self.kk, size=self.n) == 0
            S = sum(1 << i for i in np.flatnonzero(keep).tolist())
            for _ in range(self.j):
                masks.append(random_mask(rng, self.n) & S)
        return ParitySketch(self.n, tuple(masks), self.formula)

    def exact_error(self, x):
        if not 0 <= x < (1 << self.n):
            raise ArityError(f"input {x} out of range for arity {self.n}")
        w = x.bit_count()
        if self.kk < w < 2 * self.kk:
            return Fraction(0)
        a = _gap_hit_probability(w, self.kk, self.j)
        up = binomial_upper_tail(self.reps, a.numerator, a.denominator, self.tau)
        return up if w <= self.kk else 1 - up

    def closed_form_bound(self):
        lo = _gap_hit_probability(self.kk, self.kk, self.j)
        hi = _gap_hit_probability(2 * self.kk, self.kk, self.j)
        return float(self._tail_errors(self.j, self.reps, self.tau, lo, hi))

    def describe(self):
        return {**super().describe(), "gap_k": self.kk, "parities_per_rep": self.j,
                "repetitions": self.reps, "threshold": self.tau}


# -- rank one ----------------------------------------------------------------

def rank_detect_probability(r: int) -> Fraction:
    """Pr[det(A M B^T) = 1] for uniform 2-row A, B when rank(M) = r."""
    if r < 2:
        return Fraction(0)
    return (1 - Fraction(1, 2**r)) * (1 - Fraction(2, 2**r)) * Fraction(3, 8)


class RankOneGenerator(SketchGenerator):
    """``RankOne_{n,m}``: does the n x m matrix M have F_2-rank exactly 1?

    Queries: j random parities of all entries (is M nonzero?) and, per
    repetition, the four bilinear forms ``a^T M b`` for random
    ``a, a' in F_2^n`` and ``b, b' in F_2^m``. The 2x2 sketch ``A M B^T`` is
    singular whenever ``rank(M) <= 1``. Output: nonzero AND every sketch
    determinant is 0.
    """

    kind = "rankone"
    one_sided = False

    def __init__(self, rows: int, cols: int, epsilon):
        if rows < 1 or cols < 1:
            raise ParameterError("matrix dimensions must be positive")
        self.rows, self.cols = rows, cols
        self.n = rows * cols
        self.epsilon = Fraction(epsilon)
        goal = self.epsilon / 4
        self.j = choose_k_or(self.epsilon)
        miss = 1 - rank_detect_probability(2)
        keep = 1 - Fraction(1, 1 << self.j)
        R = 0
        while miss**R * keep > goal:
            R += 1
        self.reps = R
        self.k = self.j + 4 * R

    @cached_property
    def target(self):
        return make_named(Family.RANKONE, n=self.rows, m=self.cols)

    def _rank(self, x: int) -> int:
        rmask = (1 << self.cols) - 1
        return gf2_rank((x >> (r * self.cols)) & rmask for r in range(self.rows))

    def target_value(self, x):
        return int(self._rank(x) == 1)

    @cached_property
    def formula(self) -> FormulaInner:
        nonzero = or_(*(Lit(i) for i in range(self.j)))
        dets = []
        for r in range(self.reps):
            b = self.j + 4 * r
            dets.append(Xor((and_(Lit(b), Lit(b + 3)), and_(Lit(b + 1), Lit(b + 2))), negate=True))
        return FormulaInner(and_(nonzero, *dets))

    def _outer(self, a: int, b: int) -> int:
        return sum(b << (r * self.cols) for r in range(self.rows) if a >> r & 1)

    def sample(self, rng):
        masks = [random_mask(rng, self.n) for _ in range(self.j)]
        for _ in range(self.reps):
            a1, a2 = random_mask(rng, self.rows), random_mask(rng, self.rows)
            b1, b2 = random_mask(rng, self.cols), random_mask(rng, self.cols)
            masks += [self._outer(a1, b1), self._outer(a1, b2), self._outer(a2, b1), self._outer(a2, b2)]
        return ParitySketch(self.n, tuple(masks), self.formula)

    def exact_error(self, x):
        if not 0 <= x < (1 << self.n):
            raise ArityError(f"input {x} out of range for arity {self.n}")
        r = self._rank(x)
        keep = 1 - Fraction(1, 1 << self.j)
        if r == 0:
            return Fraction(0)
        if r == 1:
            return 1 - keep
        return (1 - rank_detect_probability(r)) ** self.reps * keep

    def closed_form_bound(self):
        keep = 1 - Fraction(1, 1 << self.j)
        return float(max(1 - keep, (1 - rank_detect_probability(2)) ** self.reps * keep))

    def describe(self):
        return {**super().describe(), "rows": self.rows, "cols": self.cols,
                "nonzero_parities": self.j, "repetitions": self.reps}


# -- dispatch ------------------------------------------------------------------

TABLE_FAMILIES = ("or", "and", "hw", "hw-gap", "cw", "meq", "rankone")


def meq_rows(rows: int, cols: int) -> list[int]:
    return [(1 << (r * cols + c)) | (1 << ((r + 1) * cols + c))
            for r in range(rows - 1) for c in range(cols)]


def rpdt_table_construction(family: str, params: dict[str, Any], epsilon) -> SketchGenerator:
    """Generator for a benchmark upper-bound family at per-input error <= epsilon/4."""
    fam = Family(family).value
    if fam not in TABLE_FAMILIES:
        raise ParameterError(f"no randomized parity construction for family {fam!r}")
    k_or = choose_k_or(epsilon)
    if fam in ("or", "and"):
        return OrReductionGenerator(int(params["n"]), k_or, fam)
    if fam == "hw":
        n, d = int(params["n"]), int(params["d"])
        if d == 0:
            return ParityOrGenerator(make_named(Family.HW, n=n, d=0),
                                     [1 << i for i in range(n)], k_or, negate=True, kind="hw")
        return HammingWeightGenerator(n, d, epsilon)
    if fam == "hw-gap":
        return GapHammingWeightGenerator(int(params["n"]), int(params["k"]), epsilon)
    if fam == "cw":
        f = make_named(Family.CW, H=params["H"])
        return ParityOrGenerator(f, row_masks(params["H"]), k_or, negate=True, kind="cw")
    if fam == "meq":
        rows, cols = int(params["n"]), int(params["m"])
        f = make_named(Family.MEQ, n=rows, m=cols)
        if rows == 1:
            raise ParameterError("MEQ needs at least two rows")
        return ParityOrGenerator(f, meq_rows(rows, cols), k_or, negate=True, kind="meq")
    return RankOneGenerator(int(params["n"]), int(params["m"]), epsilon)
