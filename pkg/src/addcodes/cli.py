"""Command-line front end.

Exit status: 0 on success, 1 when a verification finds a mismatch, 2 on
usage errors (bad flags or operands that do not fit together).
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from math import gcd
from pathlib import Path
from typing import Sequence

from .errors import AddcodesError, ContractError, InputError, ResourceError, UsageError

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # pragma: no cover - argparse exits itself
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class _Out:
    """Buffered table writer (text or CSV)."""

    def __init__(self, fmt: str):
        self.fmt = fmt
        self.buf = io.StringIO()

    def table(self, header: Sequence[str], rows: Sequence[Sequence[object]]) -> None:
        if self.fmt == "csv":
            w = csv.writer(self.buf, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
            return
        cells = [list(map(str, header))] + [[str(c) for c in r] for r in rows]
        widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
        for k, r in enumerate(cells):
            self.buf.write("  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip() + "\n")
            if k == 0:
                self.buf.write("  ".join("-" * w for w in widths) + "\n")

    def pairs(self, items: Sequence[tuple[str, object]]) -> None:
        if self.fmt == "csv":
            self.table([k for k, _ in items], [[v for _, v in items]])
        else:
            width = max(len(k) for k, _ in items)
            for k, v in items:
                self.buf.write(f"{k.ljust(width)}  {v}\n")

    def line(self, text: str = "") -> None:
        self.buf.write(text + "\n")

    def flush(self) -> None:
        sys.stdout.write(self.buf.getvalue())
        sys.stdout.flush()


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _add_qrh(p: argparse.ArgumentParser, h: bool = True) -> None:
    p.add_argument("--q", type=int, required=True, help="base field order")
    p.add_argument("--r", type=int, required=True, help="ambient vector space dimension")
    if h:
        p.add_argument("--h", type=int, required=True, help="dimension of the system elements")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.add_argument("--limit", type=int, default=None, help="resource cap (subspace counts, search nodes)")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="addcodes", description="Additive codes and projective systems toolkit")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("bounds", help="bounds on n_q(r,h;s)")
    _add_qrh(p)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--facts", type=Path, default=None, help="CSV of known linear code facts")
    _add_common(p)

    p = sub.add_parser("table", help="generate tables")
    tsub = p.add_subparsers(dest="table", required=True, parser_class=_Parser)
    t = tsub.add_parser("griesmer", help="upper bounds over a range of s")
    _add_qrh(t)
    t.add_argument("--s-min", type=int, default=1)
    t.add_argument("--s-max", type=int, required=True)
    t.add_argument("--facts", type=Path, default=None)
    _add_common(t)
    t = tsub.add_parser("asymptotic", help="asymptotic formulas n_q(r,h;Qt-i) = Pt-c")
    _add_qrh(t)
    t.add_argument("--t", type=int, default=1, help="evaluation parameter for the constants")
    _add_common(t)
    t = tsub.add_parser("improvements", help="rows where additive beats linear")
    _add_qrh(t)
    _add_common(t)
    t = tsub.add_parser("closed", help="closed-form values over a range of s")
    _add_qrh(t)
    t.add_argument("--s-min", type=int, default=1)
    t.add_argument("--s-max", type=int, required=True)
    _add_common(t)

    p = sub.add_parser("construct", help="build a projective system")
    csub = p.add_subparsers(dest="construction", required=True, parser_class=_Parser)
    for name, hlp in (("partition", "all-points partition (faithful, flat hyperplane spectrum)"),
                      ("mrd", "lifted MRD partition h^{q^{r-h}} (r-h)^1"),
                      ("vsp", "vector space partition with a special a-space"),
                      ("partition1", "partition of V minus an j-space"),
                      ("solomon-stiffler", "system of type sigma[r] - sum eps_i [i]"),
                      ("asymptotic", "family realising an asymptotic formula")):
        c = csub.add_parser(name, help=hlp)
        _add_qrh(c)
        if name == "vsp":
            c.add_argument("--a", type=int, required=True, help="dimension of the special element")
        if name == "partition1":
            c.add_argument("--j", type=int, required=True, help="dimension of the removed subspace")
        if name == "solomon-stiffler":
            c.add_argument("--eps", type=_int_list, required=True, help="eps_1,...,eps_{r-1}")
        if name == "asymptotic":
            c.add_argument("--n", type=int, required=True)
            c.add_argument("--s", type=int, required=True)
            c.add_argument("--eps", type=_int_list, default=None, help="alternative recipe eps_1..eps_{r-1}")
            c.add_argument("--no-realize", action="store_true", help="only report the target type")
        c.add_argument("--out", type=Path, default=None, help="write the system as .psys")
        c.add_argument("--trace", action="store_true", help="print the construction trace")
        _add_common(c)

    p = sub.add_parser("verify", help="measure a .psys file and check its type")
    p.add_argument("file", type=Path)
    p.add_argument("--type", dest="type_", default=None, help="expected type, e.g. '3[8]-[7]-[5]'")
    p.add_argument("--s", type=int, default=None, help="required hyperplane cap")
    p.add_argument("--n", type=int, default=None, help="required number of elements")
    _add_common(p)

    p = sub.add_parser("partitionable", help="decide whether sigma[r] - M splits into h-spaces")
    _add_qrh(p)
    p.add_argument("--type", dest="type_", required=True, help="e.g. '*[8]-[7]-[6]' (sigma left open)")
    p.add_argument("--no-witness", action="store_true")
    _add_common(p)

    p = sub.add_parser("snf", help="Smith normal form of an integer matrix file ('-' for stdin)")
    p.add_argument("matrix", help="file with 'rows cols' then integer rows")
    _add_common(p)

    p = sub.add_parser("catalog", help="bundled catalog")
    ksub = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    k = ksub.add_parser("verify", help="re-verify every bundled entry")
    k.add_argument("--data", type=Path, default=None, help="data directory (default: $ADDCODES_DATA or data/)")
    k.add_argument("--verbose", action="store_true", help="print notes")
    _add_common(k)

    p = sub.add_parser("divisible", help="Delta-divisible point multisets")
    dsub = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    d = dsub.add_parser("check", help="check a .pmset file or the points covered by a .psys file")
    d.add_argument("file", type=Path)
    d.add_argument("--delta", type=int, required=True)
    _add_common(d)
    d = dsub.add_parser("search", help="exhaustive search")
    _add_qrh(d, h=False)
    d.add_argument("--delta", type=int, required=True)
    d.add_argument("--card", type=int, required=True)
    d.add_argument("--max-mult", type=int, default=None)
    d.add_argument("--cap", type=int, default=100, help="maximal number of solutions reported")
    _add_common(d)
    return ap


# ---------------------------------------------------------------------------
# commands


def _cmd_bounds(a, out: _Out) -> int:
    from .bounds import bound_report
    from .catalog import load_facts

    oracle = load_facts(a.facts) if a.facts is not None else None
    rep = bound_report(a.q, a.r, a.h, a.s, oracle)
    out.pairs(rep.rows())
    for n in rep.notes:
        out.line(f"note: {n}")
    return EXIT_OK


def _cmd_table(a, out: _Out) -> int:
    from .bounds import (asymptotic_table, closed_forms, coding_ub, griesmer_ub, improvement_table,
                         one_weight_ub, projection_ub)
    from .catalog import load_facts

    if a.table == "griesmer":
        oracle = load_facts(a.facts) if a.facts is not None else None
        header = ["s", "griesmer", "one-weight", "projection"] + (["coding"] if oracle else [])
        rows = []
        for s in range(a.s_min, a.s_max + 1):
            row = [s, griesmer_ub(a.q, a.r, a.h, s), one_weight_ub(a.q, a.r, a.h, s),
                   projection_ub(a.q, a.r, a.h, s)]
            if oracle:
                row.append(coding_ub(a.q, a.r, a.h, s, oracle))
            rows.append(row)
        out.table(header, rows)
    elif a.table == "asymptotic":
        rows = [[f.offset, f.modulus, f.coefficient, f.constant, str(f)]
                for f in asymptotic_table(a.q, a.r, a.h, a.t)]
        out.table(["i", "modulus", "coefficient", "constant", "formula"], rows)
    elif a.table == "improvements":
        rows = [[x.offset, x.constant, x.improvement, x.formula(a.q, a.r, a.h)]
                for x in improvement_table(a.q, a.r, a.h)]
        out.table(["i", "constant", "improvement", "formula"], rows)
    else:
        rows = []
        for s in range(a.s_min, a.s_max + 1):
            cf = closed_forms(a.q, a.r, a.h, s)
            if cf is not None:
                rows.append([s, cf.value, "yes" if cf.exact else "no", cf.source, cf.threshold])
        out.table(["s", "value", "exact", "source", "threshold"], rows)
    return EXIT_OK


def _report_system(S, out: _Out, extra: Sequence[tuple[str, object]] = ()) -> None:
    from .psys import infer_type, system_params

    p = system_params(S)
    T = infer_type(S)
    items: list[tuple[str, object]] = [("q", S.q), ("r", S.r), ("h", S.h), ("n", p.n), ("s", p.s),
                                       ("mu", p.mu), ("distinct", S.distinct)]
    items.append(("type", str(T) if T is not None else "-"))
    if T is not None:
        from .pg import bracket

        mod = _sigma_modulus(S.q, S.r, S.h)
        bh = bracket(S.h, S.q)
        items.append(("sigma", T.sigma))
        items.append(("sigma-mod-[h]", f"{T.sigma % bh} mod {bh}"))
        items.append(("forced-sigma-class", f"{T.sigma % mod} mod {mod}"))
    items += list(extra)
    out.pairs(items)


def _sigma_modulus(q: int, r: int, h: int) -> int:
    from .pg import bracket

    return bracket(h, q) // bracket(gcd(r, h), q)


def _cmd_construct(a, out: _Out) -> int:
    from . import construct as K

    saved = K.MAX_DISTINCT
    if a.limit is not None:
        K.MAX_DISTINCT = a.limit
    try:
        return _construct(a, out)
    finally:
        K.MAX_DISTINCT = saved


def _construct(a, out: _Out) -> int:
    from . import construct as K
    from .psys import write_psys

    extra: list[tuple[str, object]] = []
    trace = None
    c = a.construction
    if c == "partition":
        S = K.partition_system(a.q, a.r, a.h)
    elif c == "mrd":
        S, special = K.mrd_partition(a.q, a.r, a.h)
        extra.append(("special", "/".join("".join(map(str, row)) for row in special.matrix)))
    elif c == "vsp":
        S, special = K.vsp(a.q, a.r, a.h, a.a)
        extra.append(("special", "/".join("".join(map(str, row)) for row in special.matrix)))
    elif c == "partition1":
        S = K.partition1(a.q, a.r, a.h, a.j)
    elif c == "solomon-stiffler":
        sigma, S, trace = K.solomon_stiffler_general(a.q, a.r, a.h, a.eps)
    else:
        res = K.asymptotic_construct(a.q, a.r, a.h, a.n, a.s, realize=not a.no_realize, eps_override=a.eps)
        out.pairs([("theta", res.theta), ("target", str(res.target)),
                   ("family", f"n = {a.n} + {res.n_step}t, s = {a.s} + {res.s_step}t")]
                  + ([("note", res.note)] if res.note else []))
        if res.system is None:
            return EXIT_OK
        S, trace = res.system, res.trace
        extra.append(("family-offset", res.family_offset()))
    _report_system(S, out, extra)
    if a.trace and trace is not None:
        out.line(trace.text())
    if a.out is not None:
        a.out.write_text(write_psys(S))
    return EXIT_OK


def _cmd_verify(a, out: _Out) -> int:
    from .psys import TypeExpr, read_psys, system_params, verify_type

    S = read_psys(a.file.read_text())
    _report_system(S, out)
    p = system_params(S)
    failures = []
    if a.type_ is not None and not verify_type(S, TypeExpr.parse(a.type_, S.r)):
        failures.append(f"type {a.type_} not confirmed")
    if a.s is not None and p.s > a.s:
        failures.append(f"hyperplane maximum {p.s} > {a.s}")
    if a.n is not None and p.n != a.n:
        failures.append(f"n = {p.n} != {a.n}")
    for f in failures:
        out.line(f"MISMATCH {f}")
    return EXIT_MISMATCH if failures else EXIT_OK


def _cmd_partitionable(a, out: _Out) -> int:
    from .psys import TypeExpr, chain_multiset
    from .zsolve import DEFAULT_CAP, partitionable_star

    T = TypeExpr.parse(a.type_, a.r)
    M = chain_multiset(a.q, a.r, T.eps)
    res = partitionable_star(a.q, a.r, a.h, M, witness=not a.no_witness,
                             cap=a.limit if a.limit is not None else DEFAULT_CAP)
    items: list[tuple[str, object]] = [("type", str(T)), ("partitionable", "yes" if res.decision else "no"),
                                       ("reason", res.reason)]
    if res.sigma_modulus is not None:
        items.append(("sigma-class", f"{res.sigma_residue} mod {res.sigma_modulus}"))
    if res.completion_sigma is not None:
        items.append(("completion-sigma", res.completion_sigma))
    out.pairs(items)
    for v in res.violations:
        out.line(f"violation: {v}")
    return EXIT_OK


def _cmd_snf(a, out: _Out) -> int:
    from .zsolve import DEFAULT_CAP, read_matrix, snf

    text = sys.stdin.read() if a.matrix == "-" else Path(a.matrix).read_text()
    A = read_matrix(text)
    res = snf(A, transforms=False, cap=a.limit if a.limit is not None else DEFAULT_CAP)
    pat = res.pattern()
    out.table(["invariant", "multiplicity"], [[k, pat[k]] for k in sorted(pat)])
    if out.fmt == "text":
        out.line(f"rank {res.rank} of {A.shape[0]}x{A.shape[1]}")
    return EXIT_OK


def _cmd_catalog(a, out: _Out) -> int:
    from .bounds import LinearFactsOracle
    from .catalog import data_dir, load_catalog, load_facts, verify_all

    base = a.data if a.data is not None else data_dir()
    entries = load_catalog(base)
    facts = base / "facts.csv"
    oracle = load_facts(facts) if facts.exists() else LinearFactsOracle()
    summary = verify_all(entries, oracle)
    rows = [[("ok" if r.ok else "MISMATCH"), r.name, "; ".join(r.mismatches)] for r in summary.reports]
    out.table(["status", "entry", "detail"], rows)
    if a.verbose and out.fmt == "text":
        for r in summary.reports:
            for n in r.notes:
                out.line(f"note: {r.name}: {n}")
    if out.fmt == "text":
        out.line(f"{len(summary.reports)} entries, {len(summary.failures)} mismatches")
    return EXIT_OK if summary.ok else EXIT_MISMATCH


def _cmd_divisible(a, out: _Out) -> int:
    from .divisible import is_divisible, read_pmset, search_divisible, write_pmset
    from .psys import covered_points, read_psys

    if a.action == "check":
        text = a.file.read_text()
        M = covered_points(read_psys(text)) if text.lstrip().startswith("psys") else read_pmset(text)
        rep = is_divisible(M, a.delta)
        out.pairs([("cardinality", rep.cardinality), ("delta", a.delta),
                   ("divisible", "yes" if rep.divisible else "no"),
                   ("violating-hyperplanes", len(rep.violations))])
        return EXIT_OK if rep.divisible else EXIT_MISMATCH
    kwargs = {} if a.limit is None else {"node_cap": a.limit}
    res = search_divisible(a.q, a.r, a.delta, a.card, a.max_mult, cap=a.cap, **kwargs)
    status = "nonexistent" if res.nonexistence else "found" if res.found else "inconclusive"
    out.pairs([("status", status), ("solutions", len(res.found)), ("complete", "yes" if res.complete else "no"),
               ("nodes", res.nodes)])
    if res.found and out.fmt == "text":
        out.line()
        out.line(write_pmset(res.found[0]).rstrip())
    return EXIT_OK


_COMMANDS = {
    "bounds": _cmd_bounds, "table": _cmd_table, "construct": _cmd_construct, "verify": _cmd_verify,
    "partitionable": _cmd_partitionable, "snf": _cmd_snf, "catalog": _cmd_catalog, "divisible": _cmd_divisible,
}


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    try:
        a = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(a, "limit", None) is not None and a.limit < 1:
        print("addcodes: error: --limit must be positive", file=sys.stderr)
        return EXIT_USAGE
    out = _Out(getattr(a, "format", "text"))
    try:
        status = _COMMANDS[a.command](a, out)
    except (UsageError, InputError, ContractError, ResourceError, OSError) as exc:
        out.flush()
        print(f"addcodes: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AddcodesError as exc:
        out.flush()
        print(f"addcodes: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out.flush()
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
