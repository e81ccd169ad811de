from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from lowt.boolfn import make_named
from lowt.errors import ParameterError
from lowt.rng import make_rng
from lowt.sketch import (
    FourierSamplingGenerator,
    GapHammingWeightGenerator,
    HammingWeightGenerator,
    OrReductionGenerator,
    ParityOrGenerator,
    RankOneGenerator,
    hw_rep_false_accept,
    meq_rows,
    rank_detect_probability,
    rpdt_table_construction,
)

from oracles import parity, rank_gf2

QUARTER = Fraction(1, 4)


def _det_rate(M_rows, rows, cols):
    hits = total = 0
    for a1, a2, b1, b2 in product(range(2**rows), range(2**rows), range(2**cols), range(2**cols)):
        def form(a, b):
            return sum(parity(a, 1 << r) * parity(M_rows[r], b) for r in range(rows)) % 2
        det = (form(a1, b1) * form(a2, b2) + form(a1, b2) * form(a2, b1)) % 2
        hits += det
        total += 1
    return Fraction(hits, total)


def test_rank_detect_rank2_brute_force():
    assert _det_rate([0b01, 0b10], 2, 2) == Fraction(36, 256) == rank_detect_probability(2)


def test_rank_detect_rank3_brute_force():
    assert _det_rate([0b001, 0b010, 0b100], 3, 3) == rank_detect_probability(3)


def test_rank_detect_low_rank_never_fires():
    assert _det_rate([0b11, 0b11], 2, 2) == 0
    assert rank_detect_probability(1) == 0


def _occupancy_false_accept(w, d, buckets, j):
    """Enumerate every hash of the w ones and every bucket parity choice (j fixed small)."""
    acc = Fraction(0)
    for h in product(range(buckets), repeat=w):
        members = [[i for i in range(w) if h[i] == b] for b in range(buckets)]
        per_bucket = []
        for m in members:
            if not m:
                per_bucket.append(Fraction(0))
                continue
            hits = sum(any(parity(S, (1 << len(m)) - 1) for S in picks)
                       for picks in product(range(2 ** len(m)), repeat=j))
            per_bucket.append(Fraction(hits, 2 ** (len(m) * j)))
        # Pr[at most d buckets detected], buckets independent given h
        dist = [Fraction(1)]
        for p in per_bucket:
            dist = [a * (1 - p) + (dist[i - 1] * p if i else 0) for i, a in enumerate(dist + [0])]
        acc += sum(dist[: d + 1])
    return acc / buckets**w


@pytest.mark.parametrize("w,j", [(2, 1), (3, 1), (2, 2), (4, 1)])
def test_hw_false_accept_against_enumeration(w, j):
    assert hw_rep_false_accept(w, 1, 4, j) == _occupancy_false_accept(w, 1, 4, j)


def test_hw_false_accept_decreases_in_weight():
    vals = [hw_rep_false_accept(w, 1, 4, 4) for w in range(2, 9)]
    assert all(a >= b for a, b in zip(vals, vals[1:]))


def _keep_hit_rate(w, kk, j):
    """Pr[OR of j parities of x restricted to the kept set is 1], by enumeration."""
    p_keep = Fraction(1, 2 * kk)
    total = Fraction(0)
    for keep in product((0, 1), repeat=w):
        pk = Fraction(1)
        for b in keep:
            pk *= p_keep if b else 1 - p_keep
        kept = sum(b << i for i, b in enumerate(keep))
        hits = sum(any(parity(S & kept, (1 << w) - 1) for S in picks)
                   for picks in product(range(2**w), repeat=j))
        total += pk * Fraction(hits, 2 ** (w * j))
    return total


@pytest.mark.parametrize("w,kk,j", [(1, 1, 1), (2, 1, 1), (2, 1, 2), (3, 2, 1), (4, 2, 2)])
def test_gap_hit_rate_against_enumeration(w, kk, j):
    from lowt.sketch.generators import _gap_hit_probability

    assert _gap_hit_probability(w, kk, j) == _keep_hit_rate(w, kk, j)


def test_gap_parameters_at_quarter():
    g = GapHammingWeightGenerator(4, 1, QUARTER)
    assert (g.j, g.reps, g.tau) == (1, 131, 41)
    assert g.closed_form_bound() <= 1 / 16


def test_rankone_parameters_at_quarter():
    g = RankOneGenerator(2, 2, QUARTER)
    assert (g.j, g.reps, g.k) == (4, 18, 76)


def test_rankone_exact_error_pattern():
    g = RankOneGenerator(2, 3, QUARTER)
    for x in range(64):
        rank = rank_gf2([(x >> 3 * r) & 7 for r in range(2)])
        e = g.exact_error(x)
        if rank == 0:
            assert e == 0
        elif rank == 1:
            assert e == Fraction(1, 16)
        else:
            assert 0 < e <= QUARTER / 4


def test_meq_rows_are_adjacent_xors():
    rows = meq_rows(3, 2)
    assert len(rows) == 4
    f = make_named("meq", n=3, m=2)
    for x in range(64):
        assert f.eval(x) == int(not any(parity(h, x) for h in rows))


def test_cw_identity_is_deterministic():
    gen = rpdt_table_construction("cw", {"H": [[1, 0, 0], [0, 1, 0], [0, 0, 1]]}, QUARTER)
    assert isinstance(gen, ParityOrGenerator) and gen.deterministic
    assert gen.max_exact_error() == 0
    sk = gen.sample(make_rng(0))
    assert sk.subsets == (1, 2, 4)
    assert sk.evaluate_many(np.arange(8)).tolist() == gen.target.table.tolist()


def test_meq_large_uses_random_row_combinations():
    gen = rpdt_table_construction("meq", {"n": 4, "m": 3}, QUARTER)
    assert not gen.deterministic and gen.k == 4
    for x in (0, 0b000111000111, 1):
        assert gen.exact_error(x) == (0 if gen.target_value(x) == 1 else Fraction(1, 16))


TABLE_CASES = [
    ("or", {"n": 5}),
    ("and", {"n": 5}),
    ("hw", {"n": 5, "d": 1}),
    ("hw", {"n": 4, "d": 0}),
    ("hw-gap", {"n": 5, "k": 1}),
    ("cw", {"H": [[1, 1, 0, 0], [0, 0, 1, 1]]}),
    ("meq", {"n": 3, "m": 2}),
    ("rankone", {"n": 2, "m": 2}),
]


@pytest.mark.parametrize("family,params", TABLE_CASES, ids=[c[0] for c in TABLE_CASES])
def test_table_constructions_meet_quarter_of_epsilon(family, params):
    gen = rpdt_table_construction(family, params, QUARTER)
    assert gen.max_exact_error() <= QUARTER / 4
    for x in gen.valid_inputs():
        assert gen.target_value(int(x)) == gen.target.eval(int(x))


@pytest.mark.parametrize("family,params", TABLE_CASES, ids=[c[0] for c in TABLE_CASES])
def test_table_constructions_empirical_error(family, params):
    gen = rpdt_table_construction(family, params, QUARTER)
    xs = gen.valid_inputs()
    truth = np.array([gen.target_value(int(x)) for x in xs])
    trials = 400
    rng = make_rng(21, 1)
    errs = np.zeros(xs.size)
    for _ in range(trials):
        errs += gen.sample(rng).evaluate_many(xs) != truth
    exact = np.array([float(gen.exact_error(int(x))) for x in xs])
    sigma = np.sqrt(np.maximum(exact * (1 - exact), 1e-4) / trials)
    assert np.all(np.abs(errs / trials - exact) <= 5 * sigma + 1e-9)


def test_one_sided_constructions_never_err_on_accepting_side():
    gen = HammingWeightGenerator(5, 1, QUARTER)
    rng = make_rng(3)
    light = np.array([x for x in range(32) if bin(x).count("1") <= 1])
    for _ in range(30):
        assert gen.sample(rng).evaluate_many(light).all()


def test_and_framing():
    gen = OrReductionGenerator(4, 3, "and")
    assert gen.target == make_named("and", n=4)
    assert gen.exact_error(15) == 0
    assert all(gen.exact_error(x) == Fraction(1, 8) for x in range(15))
    sk = gen.sample(make_rng(0))
    assert sk.parities(15) == [0, 0, 0] and sk.evaluate_many(np.array([15]))[0] == 1


@pytest.mark.parametrize("gen", [OrReductionGenerator(2, 2), OrReductionGenerator(2, 3, "and"),
                                 FourierSamplingGenerator(make_named("maj", n=3), 3)],
                         ids=["or", "and", "fourier"])
def test_enumeration_mass_and_exactness(gen):
    xs = np.arange(2**gen.n)
    total = Fraction(0)
    err = [Fraction(0)] * xs.size
    truth = [gen.target_value(int(x)) for x in xs]
    for p, sk in gen.enumerate_sketches():
        total += p
        for x, v in zip(xs, sk.evaluate_many(xs)):
            if v != truth[x]:
                err[x] += p
    assert total == 1
    assert err == [gen.exact_error(int(x)) for x in xs]


def test_rejects_bad_params():
    with pytest.raises(ParameterError):
        rpdt_table_construction("maj", {"n": 3}, QUARTER)
    with pytest.raises(ParameterError):
        rpdt_table_construction("hw-gap", {"n": 3, "k": 2}, QUARTER)
    with pytest.raises(ParameterError):
        rpdt_table_construction("meq", {"n": 1, "m": 3}, QUARTER)


def test_sample_seeded_is_reproducible():
    gen = rpdt_table_construction("rankone", {"n": 2, "m": 2}, QUARTER)
    assert gen.sample_seeded(5, 0, 1) == gen.sample_seeded(5, 0, 1)
    assert gen.sample_seeded(5, 0, 1).subsets != gen.sample_seeded(5, 0, 2).subsets
