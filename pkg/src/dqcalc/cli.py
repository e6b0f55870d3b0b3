"""Batch command line: ``dqcalc <group> <command> [flags]``.

Every command writes a TSV table with a fixed header to stdout (or ``--out``)
and a ``digest`` line for its inputs to stderr.  Exit codes: 0 pass,
1 assertion failure, 2 usage error or malformed input.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

from . import formality, gc2, graphs, pbw, poly, series, weights

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class CommandReport:
    command: str
    header: tuple[str, ...]
    rows: list[tuple] = field(default_factory=list)
    passed: bool = True
    digest: str = ""

    def tsv(self) -> str:
        lines = ["\t".join(self.header)]
        lines += ["\t".join(str(x) for x in row) for row in self.rows]
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# inputs


def _data_path(name: str) -> Path | None:
    p = resources.files("dqcalc") / "data" / name
    return Path(str(p)) if p.is_file() else None


def _read(path: str) -> str:
    """Read a file; bare fixture names fall back to the shipped data directory."""
    p = Path(path)
    if not p.is_file():
        shipped = _data_path(p.name)
        if shipped is None:
            raise UsageError(f"no such file: {path}")
        p = shipped
    return p.read_text()


def _load_json(path: str):
    try:
        return json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: malformed JSON ({exc})") from None


def _load_graph(path: str) -> graphs.Graph:
    """A graph file, or a builtin name such as ``tetrahedron``, ``curv_III:5`` or ``wedge:2``."""
    name = Path(path).stem
    kind, _, j = name.partition(":")
    if not Path(path).is_file() and kind == "wedge":
        return graphs.wedge_graph(int(j or 1))
    if not Path(path).is_file() and kind in graphs.WHEEL_KINDS:
        return graphs.wheel_family(kind, int(j or 3))
    data = _load_json(path)
    if not isinstance(data, dict):
        raise UsageError(f"{path}: expected one graph object")
    return graphs.Graph.from_dict(data)


def _load_vector(path: str) -> gc2.GraphVector:
    """A gc2 graph, a list of ``{"graph", "coeff"}`` rows, or ``wheel_cocycle:n``."""
    name = Path(path).stem
    if not Path(path).is_file() and name.startswith("wheel_cocycle:"):
        return gc2.wheel_cocycle(int(name.split(":")[1]))
    if not Path(path).is_file() and name.partition(":")[0] in graphs.WHEEL_KINDS:
        return gc2.GraphVector.from_graph(_load_graph(path))
    data = _load_json(path)
    if isinstance(data, dict):
        return gc2.GraphVector.from_graph(graphs.Graph.from_dict(data))
    return gc2.GraphVector.from_json(json.dumps(data))


def _load_weights(path: str, max_aerial: int | None = None) -> formality.WeightCollection:
    return formality.WeightCollection.from_json(_read(path), max_aerial=max_aerial)


def _load_lie(name: str) -> pbw.LieAlgebraData:
    if name in pbw.FIXTURES:
        return pbw.FIXTURES[name]()
    return pbw.LieAlgebraData.from_json(_read(name))


def _tol(text: str) -> float | None:
    if text == "exact":
        return None
    try:
        return float(text)
    except ValueError:
        raise UsageError(f"--tol must be 'exact' or a number, got {text!r}") from None


def _digest(args: argparse.Namespace) -> str:
    h = hashlib.sha256()
    for k, v in sorted(vars(args).items()):
        if k == "func":
            continue
        h.update(f"{k}={v!r}\n".encode())
        for item in v if isinstance(v, list) else [v]:
            if isinstance(item, str) and k in ("graph", "weights", "lie", "pi") and Path(item).is_file():
                h.update(Path(item).read_bytes())
    return h.hexdigest()[:16]


def _series_value(v) -> str:
    if isinstance(v, Fraction):
        return str(v)
    v = complex(v)
    return f"{v.real!r},{v.imag!r}"


# ---------------------------------------------------------------------------
# wheel


def cmd_wheel_gen(args) -> CommandReport:
    if args.table:
        order = args.order or 12
        if args.table == "duflo-bernoulli":
            w = formality.wheel_weight_table(order, series.duflo_reference_series(order))
            w.set(graphs.wedge_graph(1), Fraction(1, 2))
        else:
            w = formality.moyal_weights(order)
        rows = [json.dumps(r, separators=(",", ":")) for r in json.loads(w.to_json())]
        text = "[\n" + ",\n".join(rows) + "\n]\n"
        if args.out:
            Path(args.out).write_text(text)
        rep = CommandReport("wheel gen", ("graphs", "table"))
        rep.rows.append((len(w), args.table))
        return rep
    rep = CommandReport("wheel gen", ("kind", "j", "graph"))
    kinds = graphs.WHEEL_KINDS if args.kind == "all" else [args.kind]
    lo = args.j or 2
    hi = args.j or args.order or 6
    for kind in kinds:
        if kind == "tetrahedron":
            rep.rows.append((kind, 3, graphs.wheel_family(kind).to_json()))
            continue
        for j in range(max(lo, 3 if kind == "gc2_wheel" else 2), hi + 1):
            rep.rows.append((kind, j, graphs.wheel_family(kind, j).to_json()))
    return rep


# ---------------------------------------------------------------------------
# gc2


def _vector_rows(rep: CommandReport, vec: gc2.GraphVector) -> None:
    for g, c in vec.items():
        rep.rows.append((c, gc2.gc_degree(g), g.to_json()))


def cmd_gc2_diff(args) -> CommandReport:
    if len(args.graph) != 1:
        raise UsageError("gc2 diff takes one --graph")
    rep = CommandReport("gc2 diff", ("coeff", "degree", "graph"))
    _vector_rows(rep, gc2.gc_differential(_load_vector(args.graph[0])))
    return rep


def cmd_gc2_bracket(args) -> CommandReport:
    if len(args.graph) != 2:
        raise UsageError("gc2 bracket takes two --graph flags")
    a, b = (_load_vector(p) for p in args.graph)
    rep = CommandReport("gc2 bracket", ("coeff", "degree", "graph"))
    _vector_rows(rep, gc2.gc_bracket(a, b))
    return rep


def cmd_gc2_cocycle(args) -> CommandReport:
    if len(args.graph) != 1:
        raise UsageError("gc2 cocycle takes one --graph")
    d = gc2.gc_differential(_load_vector(args.graph[0]))
    rep = CommandReport("gc2 cocycle", ("check", "terms", "status"))
    rep.passed = not d
    rep.rows.append(("δ = 0" if rep.passed else "δ != 0", len(d), "pass" if rep.passed else "fail"))
    return rep


# ---------------------------------------------------------------------------
# characteristic functions


def _infer_order(w: formality.WeightCollection, kinds) -> int:
    j = 1
    while True:
        try:
            for kind in kinds:
                formality.extract_characteristic(w, kind, j + 1)
        except formality.MissingWeight:
            break
        j += 1
        if j > 64:
            break
    if j < 2:
        raise UsageError("the weight table has no complete wheel data")
    return j


def cmd_char_extract(args) -> CommandReport:
    w = _load_weights(args.weights)
    kind = args.kind
    order = args.order or _infer_order(w, [kind])
    try:
        s = formality.extract_characteristic(w, kind, order)
    except formality.MissingWeight as exc:
        raise UsageError(str(exc)) from None
    rep = CommandReport("char extract", ("power", kind))
    rep.rows += s.tsv_rows()
    return rep


def cmd_char_compare(args) -> CommandReport:
    kinds = args.kinds.split(",")
    if len(kinds) != 2 or any(k not in formality.CHARACTERISTIC_KINDS for k in kinds):
        raise UsageError(f"--kinds takes two of {','.join(formality.CHARACTERISTIC_KINDS)}")
    w = _load_weights(args.weights)
    order = args.order or _infer_order(w, kinds)
    tol = _tol(args.tol)
    try:
        a, b = (formality.extract_characteristic(w, k, order) for k in kinds)
    except formality.MissingWeight as exc:
        raise UsageError(str(exc)) from None
    rep = CommandReport("char compare", ("power", kinds[0], kinds[1], "status"))
    for j in range(2, order + 1):
        ok = a[j] == b[j] if tol is None else abs(complex(a[j]) - complex(b[j])) <= tol
        rep.passed &= ok
        rep.rows.append((j, _series_value(a[j]), _series_value(b[j]), "pass" if ok else "fail"))
    return rep


# ---------------------------------------------------------------------------
# series


SERIES_TABLES = ("duflo", "duflo-log", "kz", "half_propagator", "at", "bernoulli")


def cmd_series_table(args) -> CommandReport:
    order = args.order or 12
    which = args.which
    if which == "bernoulli":
        rep = CommandReport("series table", ("k", "B_k"))
        rep.rows += [(k, series.bernoulli(k)) for k in range(order + 1)]
        return rep
    if which == "duflo":
        s = series.duflo_reference_series(order)
    elif which == "duflo-log":
        s = series.duflo_reference_series(order, route="log")
    else:
        s = series.zeta_reference_series(which, order)
    rep = CommandReport("series table", ("power", which))
    rep.rows += s.tsv_rows()
    return rep


SERIES_IDENTITIES = ("duflo-bernoulli", "log-gamma", "kz-duflo", "kz-half-propagator")


def cmd_series_identity(args) -> CommandReport:
    order = args.order or 12
    which = args.which
    rep = CommandReport("series identity", ("identity", "point", "lhs", "rhs", "status"))
    if which == "duflo-bernoulli":
        a = series.duflo_reference_series(order, "bernoulli")
        b = series.duflo_reference_series(order, "log")
        for j in range(2, order + 1):
            ok = a[j] == b[j]
            rep.passed &= ok
            rep.rows.append((which, j, a[j], b[j], "pass" if ok else "fail"))
        return rep
    tol = _tol(args.tol)
    if tol is None and which != "kz-half-propagator":
        tol = 1e-12  # float identities: "exact" means double-precision agreement
    if which == "log-gamma":
        for z in (0.1, 0.1j):
            lhs, rhs = series.log_gamma_identity(z)
            ok = abs(lhs - rhs) <= tol
            rep.passed &= ok
            rep.rows.append((which, _series_value(z), _series_value(lhs), _series_value(rhs), "pass" if ok else "fail"))
        return rep
    if which == "kz-duflo":
        a = series.even_part(series.zeta_reference_series("kz", order))
        b = series.duflo_reference_series(order)
    else:
        a = series.zeta_reference_series("kz", order)
        b = series.zeta_reference_series("half_propagator", order)
    for j in range(2, order + 1):
        d = abs(complex(a[j]) - complex(b[j]))
        ok = d == 0 if tol is None else d <= tol
        rep.passed &= ok
        rep.rows.append((which, j, _series_value(a[j]), _series_value(b[j]), "pass" if ok else "fail"))
    return rep


# ---------------------------------------------------------------------------
# star products


def _builtin_pi(name: str) -> poly.PolyVectorField | None:
    R2, R3 = poly.poly_ring(2), poly.poly_ring(3)
    x1, x2 = R2.gens
    y1, y2, y3 = R3.gens
    table = {
        "constant": lambda: poly.PolyVectorField(2, 2, {(0, 1): R2(1)}),
        "linear": lambda: poly.PolyVectorField(2, 2, {(0, 1): x1}),
        "affine": lambda: poly.PolyVectorField(2, 2, {(0, 1): x1 + 2 * x2 + 1}),
        "su2": lambda: poly.PolyVectorField(3, 2, {(0, 1): y3, (1, 2): y1, (0, 2): -y2}),
    }
    return table[name]() if name in table else None


def _load_pi(name: str) -> poly.PolyVectorField:
    pi = _builtin_pi(name)
    if pi is not None:
        return pi
    data = _load_json(name)
    try:
        return poly.from_text(data["n"], 2, data["rows"])
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"{name}: malformed bivector file ({exc})") from None


def _random_poly(rng: random.Random, n: int, degree: int = 3):
    R = poly.poly_ring(n)
    p = R(0)
    while not p:
        for _ in range(3):
            mono = [0] * n
            for _ in range(rng.randint(0, degree)):
                mono[rng.randrange(n)] += 1
            p += R({tuple(mono): rng.randint(-3, 3)})
    return p


def cmd_star_check_assoc(args) -> CommandReport:
    order = args.order or 3
    w = _load_weights(args.weights)
    w.max_aerial = order  # graphs absent from the table carry weight 0
    pi = _load_pi(args.pi)
    rng = random.Random(args.seed)
    f, g, h = (_random_poly(rng, pi.n) for _ in range(3))
    try:
        res = formality.associativity_residual(w, pi, order, f, g, h)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rep = CommandReport("star check-assoc", ("power", "residual_terms", "status"))
    for k in range(order + 1):
        r = res.get(k)
        n_terms = len(r.terms()) if r else 0
        rep.passed &= n_terms == 0
        rep.rows.append((k, n_terms, "pass" if n_terms == 0 else "fail"))
    return rep


# ---------------------------------------------------------------------------
# Duflo


def _default_invariant(L: pbw.LieAlgebraData):
    """The Casimir when the Killing form is nondegenerate, else the square of a central element."""
    try:
        return pbw.casimir(L)
    except ValueError:
        pass
    for x in pbw.sym_ring(L).gens:
        if pbw.is_invariant(L, x):
            return x**2
    raise UsageError("no Casimir and no central element; pass --p")


def _parse_invariant(L: pbw.LieAlgebraData, text: str):
    import sympy

    R = pbw.sym_ring(L)
    try:
        expr = sympy.sympify(text, locals={n: sympy.Symbol(n) for n in L.names})
        p = R(sympy.Poly(expr, *[sympy.Symbol(n) for n in L.names]).as_dict())
    except (sympy.SympifyError, sympy.PolynomialError, TypeError) as exc:
        raise UsageError(f"cannot read --p {text!r}: {exc}") from None
    if not pbw.is_invariant(L, p):
        raise UsageError(f"--p {text!r} is not invariant")
    return p


def cmd_duflo_residual(args) -> CommandReport:
    L = _load_lie(args.lie)
    p = _parse_invariant(L, args.p) if args.p else _default_invariant(L)
    maxdeg = 2 * pbw._total_degree(p)
    coeffs = {} if args.psi == "identity" else pbw.duflo_coefficients(maxdeg, args.denominator)
    res = pbw.duflo_multiplicativity_residual(L, p, p, coeffs)
    rep = CommandReport("duflo residual", ("monomial", "coeff"))
    for k in sorted(res):
        mono = "*".join(f"{L.names[i]}^{e}" if e > 1 else L.names[i] for i, e in enumerate(k) if e) or "1"
        rep.rows.append((mono, res[k]))
    rep.passed = not res
    return rep


# ---------------------------------------------------------------------------
# weights


def cmd_weight_estimate(args) -> CommandReport:
    if len(args.graph) != 1:
        raise UsageError("weight estimate takes one --graph")
    g = _load_graph(args.graph[0])
    try:
        est = weights.estimate_weight(g, samples=args.samples, seed=args.seed)
    except (ValueError, graphs.GraphError) as exc:
        raise UsageError(str(exc)) from None
    rep = CommandReport("weight estimate", ("mean", "stderr", "samples", "seed"))
    rep.rows.append((repr(est.mean), repr(est.stderr), est.samples, est.seed))
    return rep


# ---------------------------------------------------------------------------
# relations


def cmd_relation_contributors(args) -> CommandReport:
    if len(args.graph) != 1:
        raise UsageError("relation contributors takes one --graph")
    target = _load_graph(args.graph[0])
    try:
        found = formality.relation_contributors(target, args.relation)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rep = CommandReport("relation contributors", ("mechanism", "source"))
    rep.rows += [(mech, g.to_json()) for g, mech in found]
    return rep


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dqcalc", description="Graph-complex and deformation-quantization calculator.")
    groups = parser.add_subparsers(dest="group", required=True)

    def command(group, name, func, **kw):
        p = group.add_parser(name, **kw)
        p.set_defaults(func=func)
        p.add_argument("--out", help="write the report here instead of stdout")
        return p

    g = groups.add_parser("wheel").add_subparsers(dest="command", required=True)
    p = command(g, "gen", cmd_wheel_gen, help="print wheel-family graphs or write a fixture weight table")
    p.add_argument("--kind", default="all", choices=("all",) + graphs.WHEEL_KINDS)
    p.add_argument("--j", type=int)
    p.add_argument("--order", type=int)
    p.add_argument("--table", choices=("duflo-bernoulli", "moyal"))

    g = groups.add_parser("gc2").add_subparsers(dest="command", required=True)
    for name, func in (("diff", cmd_gc2_diff), ("bracket", cmd_gc2_bracket), ("cocycle", cmd_gc2_cocycle)):
        p = command(g, name, func)
        p.add_argument("--graph", action="append", required=True, help="graph JSON, vector JSON or builtin name")

    g = groups.add_parser("char").add_subparsers(dest="command", required=True)
    p = command(g, "extract", cmd_char_extract)
    p.add_argument("--weights", required=True)
    p.add_argument("--kind", required=True, choices=formality.CHARACTERISTIC_KINDS)
    p.add_argument("--order", type=int)
    p = command(g, "compare", cmd_char_compare)
    p.add_argument("--weights", required=True)
    p.add_argument("--kinds", default="duflo,curv")
    p.add_argument("--order", type=int)
    p.add_argument("--tol", default="exact")

    g = groups.add_parser("series").add_subparsers(dest="command", required=True)
    p = command(g, "table", cmd_series_table)
    p.add_argument("--which", default="duflo", choices=SERIES_TABLES)
    p.add_argument("--order", type=int)
    p = command(g, "identity", cmd_series_identity)
    p.add_argument("--which", required=True, choices=SERIES_IDENTITIES)
    p.add_argument("--order", type=int)
    p.add_argument("--tol", default="exact")

    g = groups.add_parser("star").add_subparsers(dest="command", required=True)
    p = command(g, "check-assoc", cmd_star_check_assoc)
    p.add_argument("--weights", default="moyal.json")
    p.add_argument("--pi", default="constant", help="constant, linear, affine, su2 or a bivector file")
    p.add_argument("--order", type=int)
    p.add_argument("--seed", type=int, default=0)

    g = groups.add_parser("duflo").add_subparsers(dest="command", required=True)
    p = command(g, "residual", cmd_duflo_residual)
    p.add_argument("--lie", default="sl2", help="fixture name or Lie-algebra JSON file")
    p.add_argument("--p", help="invariant polynomial in the basis names (default: Casimir or central square)")
    p.add_argument("--psi", default="duflo", choices=("duflo", "identity"))
    p.add_argument("--denominator", default="one", choices=("one", "j"))

    g = groups.add_parser("weight").add_subparsers(dest="command", required=True)
    p = command(g, "estimate", cmd_weight_estimate)
    p.add_argument("--graph", action="append", required=True)
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)

    g = groups.add_parser("relation").add_subparsers(dest="command", required=True)
    p = command(g, "contributors", cmd_relation_contributors)
    p.add_argument("--graph", action="append", required=True)
    p.add_argument("--relation", default="cochain_homotopy", choices=formality.RELATIONS)
    return parser


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PASS if exc.code == 0 else EXIT_USAGE
    try:
        rep = args.func(args)
    except (UsageError, graphs.GraphError, formality.WeightTableError, formality.MissingWeight,
            KeyError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE
    rep.digest = _digest(args)
    text = rep.tsv()
    if getattr(args, "out", None) and not getattr(args, "table", None):
        Path(args.out).write_text(text)
    else:
        stdout.write(text)
    print(f"digest\t{rep.digest}", file=stderr)
    return EXIT_PASS if rep.passed else EXIT_FAIL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
