"""Glue between function specs, generators, and compiled circuits."""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from typing import Any

from .boolfn import BooleanFunction, Family, make_named
from .circuit import compile_sketch, t_count
from .errors import ParameterError
from .sketch import (
    TABLE_FAMILIES,
    FourierSamplingGenerator,
    OrInner,
    OrReductionGenerator,
    ParityOrGenerator,
    ParitySketch,
    SignedThreshold,
    SketchGenerator,
    choose_k_fourier,
    choose_k_or,
    rpdt_table_construction,
)

METHODS = ("auto", "or", "fourier", "table")


def resolve_method(family: str | None, method: str) -> str:
    if method not in METHODS:
        raise ParameterError(f"unknown method {method!r}")
    if method != "auto":
        return method
    if family in ("or", "and"):
        return "or"
    if family in TABLE_FAMILIES:
        return "table"
    return "fourier"


def build_generator(*, family: str | None = None, params: dict[str, Any] | None = None,
                    f: BooleanFunction | None = None, epsilon=None, k: int | None = None,
                    method: str = "auto") -> SketchGenerator:
    """One generator from a named family or an explicit function.

    ``or`` needs the OR/AND family and takes k from ``--k`` or epsilon without
    building a truth table, so it works at any n. ``fourier`` needs a table.
    ``table`` uses the benchmark family constructions and always derives k from epsilon.
    """
    params = dict(params or {})
    method = resolve_method(family, method)
    if epsilon is None and k is None:
        raise ParameterError("give --epsilon or --k")
    if method == "or":
        if family not in ("or", "and"):
            raise ParameterError("the OR reduction applies to the or/and families only")
        kk = k if k is not None else choose_k_or(epsilon)
        return OrReductionGenerator(int(params["n"]), kk, family)
    if method == "table":
        if family is None or family not in TABLE_FAMILIES:
            raise ParameterError(f"no table construction for {family or 'a truth table'}")
        if k is not None:
            raise ParameterError("table constructions choose k from --epsilon; drop --k")
        if epsilon is None:
            raise ParameterError("table constructions need --epsilon")
        return rpdt_table_construction(family, params, epsilon)
    if f is None:
        if family is None:
            raise ParameterError("no function given")
        f = make_named(family, **params)
    kk = k if k is not None else choose_k_fourier(f, epsilon)
    return FourierSamplingGenerator(f, kk)


def nominal_sketch(gen: SketchGenerator) -> ParitySketch:
    """A sketch with the generator's inner structure and every parity non-constant.

    Without constant folding the T-count depends only on the inner structure,
    so this matches every sampled sketch.
    """
    mask = 1
    subsets = (mask,) * gen.k
    if isinstance(gen, OrReductionGenerator):
        inner = OrInner(gen.framing == "and")
        return ParitySketch(gen.n, subsets, inner, gen.framing == "and")
    if isinstance(gen, FourierSamplingGenerator):
        return ParitySketch(gen.n, subsets, SignedThreshold((1,) * gen.k, gen.norm))
    if isinstance(gen, ParityOrGenerator):
        return ParitySketch(gen.n, subsets, OrInner(gen.negate))
    return ParitySketch(gen.n, subsets, gen.formula)


def nominal_t_count(gen: SketchGenerator) -> int:
    return t_count(compile_sketch(nominal_sketch(gen))).t_count


def _canonical(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()


def target_hash(gen: SketchGenerator, family: str | None = None,
                params: dict[str, Any] | None = None) -> str:
    """sha256 of the target's truth table document (or its family descriptor above 24 inputs)."""
    if gen.n <= 24:
        return hashlib.sha256(_canonical(gen.target.to_json())).hexdigest()
    return hashlib.sha256(_canonical({"family": family, "n": gen.n, "params": params or {}})).hexdigest()


def frac_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def family_params(family: str, *, n=None, m=None, d=None, k_param=None, H=None) -> dict[str, Any]:
    fam = Family(family).value
    if fam == "cw":
        if H is None:
            raise ParameterError("cw needs --check-matrix")
        return {"H": H}
    if fam in ("meq", "rankone"):
        if n is None or m is None:
            raise ParameterError(f"{fam} needs --n (rows) and --m (columns)")
        return {"n": n, "m": m}
    if n is None:
        raise ParameterError(f"{fam} needs --n")
    if fam == "hw":
        if d is None:
            raise ParameterError("hw needs --d")
        return {"n": n, "d": d}
    if fam == "hw-gap":
        if k_param is None:
            raise ParameterError("hw-gap needs --k-param")
        return {"n": n, "k": k_param}
    return {"n": n}
