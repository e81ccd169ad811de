import json

import pytest
from hypothesis import given, settings, strategies as st

from lowt.circuit import (
    GATE_ARITY,
    Circuit,
    Gate,
    compile_sketch,
    from_json,
    parse,
    parse_text,
    serialize,
    to_json,
    to_qasm_like,
    toffoli3,
)
from lowt.errors import CircuitSyntaxError
from lowt.rng import make_rng
from lowt.sketch import sample_or_sketch


@st.composite
def circuits(draw):
    n = draw(st.integers(3, 8))
    gates = []
    for _ in range(draw(st.integers(0, 25))):
        kind = draw(st.sampled_from(sorted(GATE_ARITY)))
        qs = draw(st.permutations(range(n)))[: GATE_ARITY[kind]]
        gates.append(Gate(kind, tuple(qs)))
    split = draw(st.integers(0, n))
    regs = {"input": tuple(range(split)), "rest": tuple(range(split, n))}
    return Circuit(n, tuple(gates), regs)


def test_toffoli3_text_round_trip_is_byte_identical():
    data = serialize(toffoli3())
    assert serialize(parse(data)) == data


def test_cx_line():
    c = parse_text("qubits 2\nCX 0,1\n")
    assert c.gates == (Gate("CX", (0, 1)),)


def test_text_layout():
    c = compile_sketch(sample_or_sketch(3, 2, make_rng(1)))
    lines = serialize(c).decode().splitlines()
    assert lines[0] == f"qubits {c.num_qubits}"
    assert "register input 0-2" in lines and "register target 3" in lines


@given(circuits())
@settings(max_examples=60, deadline=None)
def test_text_and_json_round_trip(c):
    assert parse(serialize(c, "text"), "text") == c
    assert parse(serialize(c, "json"), "json") == c
    assert from_json(json.loads(json.dumps(to_json(c)))) == c


@given(c=circuits())
@settings(max_examples=30, deadline=None)
def test_json_matches_schema(validate, c):
    validate(to_json(c), "circuit")


def test_compiled_circuit_matches_schema(validate):
    validate(to_json(compile_sketch(sample_or_sketch(6, 5, make_rng(2)))), "circuit")


def test_comments_and_blank_lines():
    c = parse_text("# header\nqubits 3  # three wires\n\nregister a 0,2\nH 1\n")
    assert c.registers == {"a": (0, 2)} and c.gates == (Gate("H", (1,)),)


@pytest.mark.parametrize("text,line", [
    ("CX 0,1\n", 1),
    ("qubits 2\nCX 0,0\n", 2),
    ("qubits 2\nH 0\nFOO 1\n", 3),
    ("qubits 2\n\nCX 0,5\n", 3),
    ("qubits 2\nH 0\nregister a 0\n", 3),
    ("qubits 2\nregister a 0\nregister a 1\n", 3),
    ("qubits 3\nTOFF3 0,1\n", 2),
    ("qubits x\n", 1),
    ("qubits 2\nh 0\n", 2),
    ("qubits 2\nqubits 2\n", 2),
])
def test_syntax_errors_report_line(text, line):
    with pytest.raises(CircuitSyntaxError) as info:
        parse_text(text)
    assert info.value.line == line
    assert f"line {line}" in str(info.value)


def test_bad_json_reports_line():
    with pytest.raises(CircuitSyntaxError) as info:
        parse('{\n"format": "lowt-circuit",\n oops}', "json")
    assert info.value.line == 3


def test_qasm_like_export():
    text = to_qasm_like(toffoli3())
    assert text.startswith("OPENQASM 2.0;")
    assert text.count("tdg ") == 3 and "cx q[1],q[2];" in text
