from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lowt.boolfn import (
    BooleanFunction,
    fourier_dimension,
    fourier_one_norm,
    gf2_rank,
    load_table,
    make_named,
    sampling_distribution,
    save_table,
    walsh_hadamard,
    xor_s,
)
from lowt.errors import DegenerateFunctionError, ParameterError, ResourceError

from oracles import fourier_coeff, one_norm, parity, rank_gf2

tables = st.integers(1, 6).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.integers(0, 1), min_size=2**n, max_size=2**n)))


def test_or2_spectrum():
    spec = walsh_hadamard(make_named("or", n=2))
    assert spec.coeff(0) == Fraction(3, 4)
    assert [spec.coeff(S) for S in (1, 2, 3)] == [Fraction(-1, 4)] * 3


def test_xor2_spectrum():
    spec = walsh_hadamard(make_named("xor", n=2))
    assert (spec.coeff(0), spec.coeff(1), spec.coeff(2), spec.coeff(3)) == (
        Fraction(1, 2), 0, 0, Fraction(-1, 2))


def test_const0_spectrum_is_zero():
    spec = walsh_hadamard(make_named("const0", n=3))
    assert not spec.numerators.any()
    assert fourier_one_norm(spec) == 0


@given(tables)
@settings(max_examples=60, deadline=None)
def test_spectrum_against_direct_sum(case):
    n, table = case
    spec = walsh_hadamard(BooleanFunction.from_table(n, table))
    for S in range(2**n):
        assert spec.coeff(S) == fourier_coeff(table, n, S)


@given(tables)
@settings(max_examples=60, deadline=None)
def test_reconstruction_and_norm_facts(case):
    n, table = case
    f = BooleanFunction.from_table(n, table)
    spec = walsh_hadamard(f)
    assert spec.reconstruct().tolist() == list(table)
    norm = fourier_one_norm(spec)
    assert norm == one_norm(table, n)
    assert norm >= abs(spec.coeff(0))
    assert (norm == 0) == (not any(table))


def test_reconstruction_n10():
    rng = np.random.default_rng(5)
    f = BooleanFunction.from_table(10, rng.integers(0, 2, 1024))
    assert np.array_equal(walsh_hadamard(f).reconstruct(), f.table)


@pytest.mark.parametrize("n", range(1, 13))
def test_or_one_norm_closed_form(n):
    assert fourier_one_norm(walsh_hadamard(make_named("or", n=n))) == 2 - Fraction(2, 2**n)


@pytest.mark.parametrize("n", [1, 3, 6])
def test_xor_one_norm(n):
    assert fourier_one_norm(walsh_hadamard(make_named("xor", n=n))) == 1


def test_sampling_distributions():
    assert sampling_distribution(walsh_hadamard(make_named("or", n=2))) == [
        (0, Fraction(1, 2)), (1, Fraction(1, 6)), (2, Fraction(1, 6)), (3, Fraction(1, 6))]
    assert sampling_distribution(walsh_hadamard(make_named("xor", n=3))) == [
        (0, Fraction(1, 2)), (7, Fraction(1, 2))]
    assert sampling_distribution(walsh_hadamard(make_named("const1", n=2))) == [(0, Fraction(1))]
    with pytest.raises(DegenerateFunctionError):
        sampling_distribution(walsh_hadamard(make_named("const0", n=2)))


@given(st.integers(0, 2**20 - 1), st.integers(0, 2**20 - 1))
def test_xor_s_is_popcount_parity(S, x):
    assert xor_s(S, x) == parity(S, x)


def test_named_examples():
    meq = make_named("meq", n=2, m=2)
    assert meq.eval(0b0101) == 1 and meq.eval(0b0110) == 0
    r1 = make_named("rankone", n=2, m=2)
    assert r1.eval(0b1111) == 1 and r1.eval(0) == 0
    assert make_named("gt", n=2).eval(0b10 | 0b01 << 2) == 1
    assert make_named("gt", n=2).eval(0b01 | 0b10 << 2) == 0


@pytest.mark.parametrize("rows,cols", [(2, 2), (2, 3), (3, 2)])
def test_rankone_against_elimination(rows, cols):
    f = make_named("rankone", n=rows, m=cols)
    for x in range(2 ** (rows * cols)):
        R = [(x >> (r * cols)) & ((1 << cols) - 1) for r in range(rows)]
        assert f.eval(x) == int(rank_gf2(R) == 1)


def test_hw_gap_promise_mask():
    f = make_named("hw-gap", n=5, k=2)
    for x in range(32):
        w = bin(x).count("1")
        assert f.dont_care_mask[x] == (2 < w < 4)
        if not f.dont_care_mask[x]:
            assert f.eval(x) == int(w <= 2)
    with pytest.raises(ParameterError):
        make_named("hw-gap", n=3, k=2)


def test_cw_identity_is_zero_code():
    f = make_named("cw", H=[[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert f.table.tolist() == [1, 0, 0, 0, 0, 0, 0, 0]


def test_arity_limit():
    with pytest.raises(ResourceError):
        make_named("or", n=25)


@given(tables)
@settings(max_examples=30, deadline=None)
def test_json_round_trip(case):
    n, table = case
    f = BooleanFunction.from_table(n, table, "custom")
    assert BooleanFunction.from_json(f.to_json()) == f


def test_json_round_trip_keeps_promise(tmp_path):
    f = make_named("hw-gap", n=6, k=2)
    save_table(f, tmp_path / "f.json")
    g = load_table(tmp_path / "f.json")
    assert g == f and np.array_equal(g.dont_care_mask, f.dont_care_mask)


@given(st.lists(st.integers(0, 255), max_size=10))
def test_gf2_rank_matches_elimination(rows):
    assert gf2_rank(rows) == rank_gf2(rows)


def test_fourier_dimension():
    assert fourier_dimension(make_named("or", n=4)) == 4
    assert fourier_dimension(make_named("xor", n=5)) == 1
    assert fourier_dimension(make_named("const1", n=3)) == 0
