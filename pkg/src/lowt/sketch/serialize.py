"""JSON form of parity sketches."""

from __future__ import annotations

from fractions import Fraction
from typing import Any

from .core import FormulaInner, Lit, Node, OrInner, ParitySketch, SignedThreshold, Threshold, Xor


def _node_to_json(node: Node) -> dict[str, Any]:
    if isinstance(node, Lit):
        return {"op": "lit", "index": node.index, "negate": node.negate}
    out: dict[str, Any] = {"op": "threshold" if isinstance(node, Threshold) else "xor",
                           "negate": node.negate,
                           "children": [_node_to_json(c) for c in node.children]}
    if isinstance(node, Threshold):
        out["cutoff"] = node.cutoff
    return out


def _node_from_json(d: dict[str, Any]) -> Node:
    op = d["op"]
    if op == "lit":
        return Lit(int(d["index"]), bool(d.get("negate", False)))
    children = tuple(_node_from_json(c) for c in d["children"])
    if op == "threshold":
        return Threshold(children, int(d["cutoff"]), bool(d.get("negate", False)))
    if op == "xor":
        return Xor(children, bool(d.get("negate", False)))
    raise ValueError(f"unknown formula node {op!r}")


def sketch_to_json(sk: ParitySketch) -> dict[str, Any]:
    inner = sk.inner
    out: dict[str, Any] = {
        "n": sk.n,
        "k": sk.k,
        "subsets": [format(S, "x") for S in sk.subsets],
        "inner": inner.variant,
        "flip_inputs": sk.flip_inputs,
        "seed": sk.seed,
        "stream": list(sk.stream),
    }
    if isinstance(inner, OrInner):
        out["negate"] = inner.negate
    elif isinstance(inner, SignedThreshold):
        out["signs"] = list(inner.signs)
        out["norm"] = {"numerator": inner.norm.numerator, "denominator": inner.norm.denominator}
    else:
        out["formula"] = _node_to_json(inner.root)
    return out


def sketch_from_json(d: dict[str, Any]) -> ParitySketch:
    variant = d["inner"]
    if variant == "or":
        inner = OrInner(bool(d.get("negate", False)))
    elif variant == "signed_threshold":
        norm = Fraction(int(d["norm"]["numerator"]), int(d["norm"]["denominator"]))
        inner = SignedThreshold(tuple(int(s) for s in d["signs"]), norm)
    elif variant == "formula":
        inner = FormulaInner(_node_from_json(d["formula"]))
    else:
        raise ValueError(f"unknown inner variant {variant!r}")
    subsets = tuple(int(s, 16) for s in d["subsets"])
    if "k" in d and int(d["k"]) != len(subsets):
        raise ValueError("k does not match the number of subsets")
    return ParitySketch(int(d["n"]), subsets, inner, bool(d.get("flip_inputs", False)),
                        d.get("seed"), tuple(d.get("stream", ())))
