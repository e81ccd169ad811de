"""Command-line front end: ``lowt {analyze,synthesize,verify,nullity,bench}``.

Exit codes: 0 all checks pass, 1 a verification check failed, 2 usage error.
JSON output is sorted and carries a ``timestamp`` field; everything else is a
pure function of the arguments and the seed.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .boolfn import (
    BooleanFunction,
    fourier_dimension,
    load_check_matrix,
    load_table,
    make_named,
    walsh_hadamard,
)
from .circuit import compile_sketch, parse, serialize, t_count, threshold_t_constant
from .errors import LowTError
from .pipeline import (
    METHODS,
    build_generator,
    family_params,
    frac_str,
    nominal_t_count,
    resolve_method,
    target_hash,
)
from .rng import check_seed, default_seed, make_rng
from .sketch import (
    PDT_MAX_ARITY,
    choose_k_fourier,
    choose_k_or,
    pdt_min_depth,
    sketch_from_json,
    sketch_to_json,
)
from .verify.channel import EXHAUSTIVE_MAX_ARITY, channel_error_report, exact_channel_tiny
from .verify.functional import FUNCTIONAL_MAX_INPUTS, check_oracle
from .verify.nullity import NULLITY_MAX_QUBITS, max_pauli_overlap, stabilizer_nullity
from .verify.statevector import (
    StateVector,
    ccz_plus_state,
    plus_state,
    read_statevector,
    t_state,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
FAMILIES = ("or", "and", "xor", "const0", "const1", "hw", "hw-gap", "cw", "meq", "rankone", "maj", "gt")
CIRCUIT_SUFFIX = {"text": "txt", "json": "json", "qasm-like": "qasm"}

# Stream labels keep each command's randomness independent of the others.
STREAM_SYNTH, STREAM_MC, STREAM_FUNCTIONAL, STREAM_BENCH = 0, 1, 2, 3


class UsageError(Exception):
    pass


# -- argument parsing ----------------------------------------------------------------

def _epsilon(text: str) -> Fraction:
    try:
        value = Fraction(text) if "/" in text else Fraction(float(text))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"bad epsilon {text!r}") from None
    if not 0 < value < 1:
        raise argparse.ArgumentTypeError("epsilon must lie in (0, 1)")
    return value


def _seed(text: str) -> int:
    try:
        return check_seed(int(text, 0))
    except (ValueError, LowTError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_function_args(p: argparse.ArgumentParser, *, required: bool = True) -> None:
    src = p.add_mutually_exclusive_group(required=required)
    src.add_argument("--family", choices=FAMILIES, help="named function family")
    src.add_argument("--table", type=Path, help="truth-table JSON file")
    p.add_argument("--n", type=int, help="arity (rows for meq/rankone, operand bits for gt)")
    p.add_argument("--m", type=int, help="columns for meq/rankone")
    p.add_argument("--d", type=int, help="weight bound for hw")
    p.add_argument("--k-param", type=int, help="gap parameter k for hw-gap")
    p.add_argument("--check-matrix", type=Path, help="check matrix JSON/text for cw")


def _add_common(p: argparse.ArgumentParser, formats=("json", "text")) -> None:
    p.add_argument("--seed", type=_seed, default=None, help="64-bit seed (default: $LOWT_SEED or 20250101)")
    p.add_argument("--out", type=Path, help="write output here instead of stdout")
    p.add_argument("--format", choices=formats, default=formats[0])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lowt", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"lowt {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="Fourier summary, k choices and PDT depth")
    _add_function_args(p)
    p.add_argument("--epsilon", type=_epsilon)
    p.add_argument("--top", type=int, default=8, help="number of largest coefficients to list")
    _add_common(p)

    p = sub.add_parser("synthesize", help="sample sketches and compile circuits")
    _add_function_args(p)
    p.add_argument("--epsilon", type=_epsilon)
    p.add_argument("--k", type=int)
    p.add_argument("--method", choices=METHODS, default="auto")
    p.add_argument("--batch", type=int, default=1)
    _add_common(p, formats=("text", "json", "qasm-like"))

    p = sub.add_parser("verify", help="channel error report and functional checks")
    _add_function_args(p, required=False)
    p.add_argument("--epsilon", type=_epsilon)
    p.add_argument("--k", type=int)
    p.add_argument("--method", choices=METHODS, default="auto")
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--batch", type=int, default=3, help="sampled circuits to check functionally")
    p.add_argument("--circuit", type=Path, help="check this circuit file against --sketch")
    p.add_argument("--sketch", type=Path)
    p.add_argument("--per-input", action="store_true", help="include per-input rows in the report")
    _add_common(p)

    p = sub.add_parser("nullity", help="stabilizer nullity and maximal Pauli overlap")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--ccz-plus", action="store_true", help="C^{n-1}Z |+>^n")
    src.add_argument("--state", choices=("zero", "plus", "t-tensor"))
    src.add_argument("--state-file", type=Path)
    p.add_argument("--n", type=int)
    p.add_argument("--copies", type=int, default=1, help="tensor copies for t-tensor")
    _add_common(p)

    p = sub.add_parser("bench", help="benchmark families: T-count flatness and error")
    p.add_argument("--epsilon", type=_epsilon, default=Fraction(1, 4))
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--rows", default="or,hw,hw-gap,cw,meq,rankone",
                   help="comma-separated families to include")
    _add_common(p)
    return parser


# -- shared helpers -----------------------------------------------------------------

def _timestamp() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def _function_from_args(args) -> tuple[str | None, dict[str, Any], BooleanFunction | None]:
    if args.table is not None:
        f = load_table(args.table)
        return None, {"n": f.n}, f
    if args.family is None:
        raise UsageError("give --family or --table")
    H = load_check_matrix(args.check_matrix) if args.check_matrix else None
    params = family_params(args.family, n=args.n, m=args.m, d=args.d, k_param=args.k_param, H=H)
    return args.family, params, None


def _materialize(family, params, f) -> BooleanFunction:
    if f is not None:
        return f
    return make_named(family, **params)


def _emit(args, doc: dict[str, Any], text: str | None = None) -> None:
    doc = {**doc, "timestamp": _timestamp()}
    if args.format == "text" and text is not None:
        payload = text if text.endswith("\n") else text + "\n"
    else:
        payload = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if args.out is not None and args.command != "synthesize":
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(payload)
    else:
        sys.stdout.write(payload)


def _seed_of(args) -> int:
    return args.seed if args.seed is not None else default_seed()


def _table(rows: list[list[Any]], header: list[str]) -> str:
    cells = [header] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


# -- analyze -------------------------------------------------------------------------

def cmd_analyze(args) -> int:
    family, params, f = _function_from_args(args)
    f = _materialize(family, params, f)
    spec = walsh_hadamard(f)
    norm = spec.one_norm
    doc: dict[str, Any] = {
        "command": "analyze",
        "function": f.label(),
        "n": f.n,
        "one_norm": frac_str(norm),
        "one_norm_float": float(norm),
        "support_size": int(spec.support().size),
        "fourier_dimension": fourier_dimension(f),
        "top_coefficients": [{"subset": format(S, "x"), "coefficient": frac_str(c)}
                             for S, c in spec.top(args.top)],
    }
    if args.epsilon is not None:
        doc["epsilon"] = float(args.epsilon)
        doc["k_or"] = choose_k_or(args.epsilon)
        doc["k_fourier"] = choose_k_fourier(norm, args.epsilon) if norm else None
    doc["pdt_depth"] = pdt_min_depth(f) if f.n <= PDT_MAX_ARITY else None
    text = "\n".join(f"{k}: {v}" for k, v in doc.items() if k != "top_coefficients")
    _emit(args, doc, text)
    return EXIT_OK


# -- synthesize ----------------------------------------------------------------------

def cmd_synthesize(args) -> int:
    family, params, f = _function_from_args(args)
    if args.batch < 1:
        raise UsageError("--batch must be at least 1")
    if args.k is not None and args.k < 0:
        raise UsageError("--k must be non-negative")
    seed = _seed_of(args)
    gen = build_generator(family=family, params=params, f=f, epsilon=args.epsilon, k=args.k,
                          method=args.method)
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
    suffix = CIRCUIT_SUFFIX[args.format]
    circuits = []
    for i in range(args.batch):
        sk = gen.sample_seeded(seed, STREAM_SYNTH, i)
        c = compile_sketch(sk)
        rep = t_count(c)
        entry = {"index": i, "t_count": rep.t_count, "toff3_count": rep.toff3_count,
                 "num_qubits": c.num_qubits, "gate_count": rep.gate_count}
        if args.out is not None:
            cname, sname = f"circuit_{i:04d}.{suffix}", f"sketch_{i:04d}.json"
            (args.out / cname).write_bytes(serialize(c, args.format))
            (args.out / sname).write_text(json.dumps(sketch_to_json(sk), sort_keys=True) + "\n")
            entry.update(circuit=cname, sketch=sname)
        circuits.append(entry)
    manifest = {
        "command": "synthesize",
        "seed": seed,
        "k": gen.k,
        "method": resolve_method(family, args.method),
        "generator": gen.describe(),
        "epsilon": float(args.epsilon) if args.epsilon is not None else None,
        "target": family or "table",
        "target_params": params if family != "cw" else {"rows": len(params["H"])},
        "target_hash": target_hash(gen, family, params),
        "format": args.format,
        "circuits": circuits,
        "t_count_max": max(c["t_count"] for c in circuits),
    }
    manifest["timestamp"] = _timestamp()
    payload = json.dumps(manifest, sort_keys=True, indent=2) + "\n"
    if args.out is not None:
        (args.out / "manifest.json").write_text(payload)
    sys.stdout.write(payload)
    return EXIT_OK


# -- verify --------------------------------------------------------------------------

def _verify_circuit_file(args) -> int:
    if args.sketch is None:
        raise UsageError("--circuit needs --sketch")
    data = args.circuit.read_bytes()
    fmt = "json" if args.circuit.suffix == ".json" else "text"
    c = parse(data, fmt)
    sk = sketch_from_json(json.loads(args.sketch.read_text()))
    doc: dict[str, Any] = {"command": "verify", "mode": "circuit", "circuit": args.circuit.name,
                           "t_count": t_count(c).to_json()}
    warnings = []
    xs = None
    if sk.n > FUNCTIONAL_MAX_INPUTS:
        rng = make_rng(_seed_of(args), STREAM_FUNCTIONAL)
        xs = np.unique(np.concatenate([[0, (1 << sk.n) - 1],
                                       rng.integers(0, 1 << min(sk.n, 62), size=4096)]))
        warnings.append(f"n = {sk.n}: functional check on {xs.size} sampled inputs")
    rep = check_oracle(c, sk, xs)
    doc["functional"] = rep.to_json()
    doc["warnings"] = warnings
    doc["passed"] = rep.passed
    _emit(args, doc, f"functional: {'PASS' if rep.passed else 'FAIL'} ({rep.checked} basis inputs)")
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_verify(args) -> int:
    if args.circuit is not None:
        return _verify_circuit_file(args)
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    family, params, f = _function_from_args(args)
    seed = _seed_of(args)
    gen = build_generator(family=family, params=params, f=f, epsilon=args.epsilon, k=args.k,
                          method=args.method)
    warnings: list[str] = []
    checks: dict[str, bool] = {}
    xs = None
    if gen.n > EXHAUSTIVE_MAX_ARITY:
        sub = make_rng(seed, STREAM_MC, 0)
        xs = np.unique(np.concatenate([[0, (1 << gen.n) - 1],
                                       sub.integers(0, 1 << min(gen.n, 62), size=255)]))
        warnings.append(f"n = {gen.n} > {EXHAUSTIVE_MAX_ARITY}: Monte Carlo on {xs.size} sampled inputs")
    report = channel_error_report(gen, args.trials, make_rng(seed, STREAM_MC, 1), seed=seed, xs=xs)
    warnings.extend(report.warnings)
    checks["certificate_matches_exact"] = report.diamond_certificate == float(report.certificate_exact)
    checks["exact_within_closed_form"] = report.max_error <= report.analytic_bound + 1e-12
    doc: dict[str, Any] = {"command": "verify", "mode": "generator", "seed": seed,
                           "channel": report.to_json(per_input=args.per_input)}

    if gen.n <= 3 and gen.k <= 3:
        n = gen.n
        states = {f"basis_{x}": StateVector.basis(n + 1, x) for x in range(1 << (n + 1))}
        states["plus_all"] = plus_state(n + 1)
        states["plus_inputs_target_0"] = plus_state(n).tensor(StateVector.basis(1, 0))
        tiny = {}
        for name, psi in states.items():
            _, dist = exact_channel_tiny(gen, psi)
            tiny[name] = dist
        checks["tiny_channel_within_certificate"] = max(tiny.values()) <= report.diamond_certificate + 1e-12
        doc["exact_channel_tiny"] = tiny

    functional = []
    fxs = xs if gen.n > FUNCTIONAL_MAX_INPUTS else None
    for i in range(max(args.batch, 0)):
        sk = gen.sample_seeded(seed, STREAM_FUNCTIONAL, i)
        c = compile_sketch(sk)
        rep = check_oracle(c, sk, fxs)
        functional.append({"index": i, "t_count": t_count(c).t_count, **rep.to_json()})
    if functional:
        checks["functional"] = all(r["passed"] for r in functional)
    doc["functional"] = functional
    doc["checks"] = checks
    doc["warnings"] = warnings
    doc["passed"] = all(checks.values())
    lines = [f"generator: {gen.kind} n={gen.n} k={gen.k}",
             f"max exact error: {report.max_error:.6g}",
             f"diamond certificate: {report.diamond_certificate:.6g}",
             f"closed-form certificate: {report.closed_form_certificate:.6g}",
             f"empirical max error: {report.empirical_max_error:.6g} ({args.trials} trials/input)"]
    lines += [f"{name}: {'PASS' if ok else 'FAIL'}" for name, ok in checks.items()]
    lines += [f"warning: {w}" for w in warnings]
    lines.append("PASS" if doc["passed"] else "FAIL")
    _emit(args, doc, "\n".join(lines))
    return EXIT_OK if doc["passed"] else EXIT_FAIL


# -- nullity -------------------------------------------------------------------------

def cmd_nullity(args) -> int:
    expected = None
    if args.ccz_plus:
        if args.n is None or args.n < 1:
            raise UsageError("--ccz-plus needs --n >= 1")
        if args.n > NULLITY_MAX_QUBITS:
            raise UsageError(f"nullity scan supports n <= {NULLITY_MAX_QUBITS}")
        psi, label = ccz_plus_state(args.n), f"ccz-plus({args.n})"
        expected = {"nullity": args.n, "max_pauli_overlap": 1 - 4 / 2**args.n}
    elif args.state_file is not None:
        psi, label = read_statevector(args.state_file), args.state_file.name
    elif args.state == "t-tensor":
        if args.copies < 1 or args.copies > NULLITY_MAX_QUBITS:
            raise UsageError(f"--copies must lie in 1..{NULLITY_MAX_QUBITS}")
        psi = t_state()
        for _ in range(args.copies - 1):
            psi = psi.tensor(t_state())
        label = f"t-tensor({args.copies})"
        expected = {"nullity": args.copies}
    else:
        n = args.n if args.n is not None else 1
        if not 1 <= n <= NULLITY_MAX_QUBITS:
            raise UsageError(f"--n must lie in 1..{NULLITY_MAX_QUBITS}")
        psi = StateVector.basis(n, 0) if args.state == "zero" else plus_state(n)
        label = f"{args.state}({n})"
        expected = {"nullity": 0}
    if psi.num_qubits > NULLITY_MAX_QUBITS:
        raise UsageError(f"nullity scan supports at most {NULLITY_MAX_QUBITS} qubits")
    rep = stabilizer_nullity(psi)
    overlap = max_pauli_overlap(psi)
    doc = {"command": "nullity", "state": label, **rep.to_json(), "max_pauli_overlap": overlap}
    passed = True
    if expected is not None:
        doc["expected"] = expected
        passed = rep.nullity == expected["nullity"]
        if "max_pauli_overlap" in expected:
            passed &= abs(overlap - expected["max_pauli_overlap"]) <= 1e-9
    doc["passed"] = passed
    text = (f"state: {label}\nqubits: {rep.num_qubits}\nstabilizers: {rep.stabilizer_count}\n"
            f"nullity: {rep.nullity}\nmax pauli overlap: {overlap:.12g}")
    _emit(args, doc, text)
    return EXIT_OK if passed else EXIT_FAIL


# -- bench ---------------------------------------------------------------------------

def bench_rows(families: list[str]) -> list[tuple[str, dict[str, Any]]]:
    """Default (family, params) grid; identity check matrices for cw."""
    grid = {
        "or": [{"n": n} for n in (8, 12, 16)],
        "hw": [{"n": n, "d": 1} for n in (4, 6, 8)],
        "hw-gap": [{"n": n, "k": 1} for n in (4, 6, 8)],
        "cw": [{"H": np.eye(n, dtype=int).tolist()} for n in (4, 6, 8)],
        "meq": [{"n": 3, "m": 2}, {"n": 3, "m": 3}, {"n": 4, "m": 3}],
        "rankone": [{"n": 2, "m": 2}, {"n": 2, "m": 3}, {"n": 3, "m": 3}],
    }
    out = []
    for fam in families:
        if fam not in grid:
            raise UsageError(f"no bench rows for family {fam!r}")
        out.extend((fam, p) for p in grid[fam])
    return out


def run_bench(epsilon: Fraction, trials: int, seed: int, families: list[str]) -> dict[str, Any]:
    rows = []
    for r, (fam, params) in enumerate(bench_rows(families)):
        gen = build_generator(family=fam, params=params, epsilon=epsilon,
                              method="or" if fam == "or" else "table")
        report = channel_error_report(gen, trials, make_rng(seed, STREAM_BENCH, r), seed=seed)
        shown = {k: v for k, v in params.items() if k != "H"}
        if fam == "cw":
            shown = {"H": f"identity({len(params['H'])})"}
        sampled = t_count(compile_sketch(gen.sample_seeded(seed, STREAM_BENCH, r, 1))).t_count
        rows.append({
            "family": fam, "params": shown, "n": gen.n, "k": gen.k,
            "t_count": nominal_t_count(gen),
            "sampled_t_count": sampled,
            "max_exact_error": report.max_error,
            "diamond_certificate": report.diamond_certificate,
            "empirical_max_error": report.empirical_max_error,
            "inputs": len(report.inputs),
            "error_within_epsilon": report.empirical_max_error <= float(epsilon)
            and report.max_error <= float(epsilon),
        })
    flat = {}
    for fam in families:
        counts = {c for row in rows if row["family"] == fam
                  for c in (row["t_count"], row["sampled_t_count"])}
        flat[fam] = len(counts) == 1
    return {"command": "bench", "epsilon": float(epsilon), "trials": trials, "seed": seed,
            "rows": rows, "t_count_flat": flat,
            "threshold_t_constant": threshold_t_constant(),
            "passed": all(flat.values()) and all(r["error_within_epsilon"] for r in rows)}


def cmd_bench(args) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    families = [s.strip() for s in args.rows.split(",") if s.strip()]
    doc = run_bench(args.epsilon, args.trials, _seed_of(args), families)
    header = ["family", "params", "n", "k", "T-count", "max exact err", "certificate", "empirical max"]
    table = _table([[r["family"], ",".join(f"{k}={v}" for k, v in r["params"].items()), r["n"], r["k"],
                     r["t_count"], f"{r['max_exact_error']:.4g}", f"{r['diamond_certificate']:.4g}",
                     f"{r['empirical_max_error']:.4g}"] for r in doc["rows"]], header)
    flat = ", ".join(f"{k}={'yes' if v else 'NO'}" for k, v in doc["t_count_flat"].items())
    _emit(args, doc, f"{table}\n\nT-count flat in n: {flat}\n{'PASS' if doc['passed'] else 'FAIL'}")
    return EXIT_OK if doc["passed"] else EXIT_FAIL


COMMANDS = {"analyze": cmd_analyze, "synthesize": cmd_synthesize, "verify": cmd_verify,
            "nullity": cmd_nullity, "bench": cmd_bench}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except (UsageError, LowTError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"lowt {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
