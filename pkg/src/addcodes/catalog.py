"""Bundled reference data and its verification.

Catalog files are plain text.  Each entry starts with a header line

    entry kind=<kind> key=value ... [src="..."] [note="..."]

followed by a payload: blank-line separated digit matrices for ``system``,
``code`` and ``derived`` entries, CSV rows (with a header row) for ``table``
entries.  The data directory is ``$ADDCODES_DATA`` when set, otherwise the
``data/`` directory at the repository root.
"""

from __future__ import annotations

import csv
import io
import os
import shlex
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bounds import (
    LinearFactsOracle,
    asymptotic_table,
    closed_forms,
    coding_ub,
    griesmer_ub,
    improvement_table,
    nbar_griesmer,
)
from .codes import AdditiveCode, derived_linear_code, weight_enumerator
from .errors import ConfigurationError, ParseError
from .gf import field_of_order
from .pg import rank
from .psys import ProjectiveSystem, system_params

SYSTEM_KINDS = ("system", "code", "derived")


def data_dir() -> Path:
    env = os.environ.get("ADDCODES_DATA")
    if env:
        return Path(env)
    return Path(__file__).resolve().parents[2] / "data"


@dataclass
class CatalogEntry:
    kind: str
    params: dict[str, str]
    matrices: list[np.ndarray] = field(default_factory=list)
    header: list[str] = field(default_factory=list)
    rows: list[dict[str, str]] = field(default_factory=list)
    location: str = ""

    @property
    def source(self) -> str:
        return self.params.get("src", "")

    @property
    def note(self) -> str:
        return self.params.get("note", "")

    def get(self, key: str) -> int:
        try:
            return int(self.params[key])
        except (KeyError, ValueError) as exc:
            raise ParseError(f"{self.location}: missing integer parameter {key}") from exc

    @property
    def name(self) -> str:
        p = self.params
        if self.kind == "table":
            keys = [f"{k}={p[k]}" for k in ("q", "r", "h") if p.get(k, "0") != "0"]
            return " ".join([f"table {p.get('name')}"] + (keys or [f"({self.source})"]))
        keys = [k for k in ("q", "r", "h", "s", "n") if k in p]
        return f"{self.kind} " + " ".join(f"{k}={p[k]}" for k in keys)


def _parse_row(text: str, location: str) -> list[int]:
    tokens = text.split() if " " in text else list(text)
    try:
        return [int(t) for t in tokens]
    except ValueError as exc:
        raise ParseError(f"{location}: bad matrix row {text!r}") from exc


def parse_catalog(text: str, origin: str = "<text>") -> list[CatalogEntry]:
    entries: list[CatalogEntry] = []
    cur: CatalogEntry | None = None
    block: list[list[int]] = []

    def flush_block() -> None:
        nonlocal block
        if block and cur is not None:
            widths = {len(r) for r in block}
            if len(widths) != 1:
                raise ParseError(f"{cur.location}: ragged matrix")
            cur.matrices.append(np.array(block, dtype=np.int64))
        block = []

    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        loc = f"{origin}:{no}"
        if line.startswith("#"):
            continue
        if line.startswith("entry"):
            flush_block()
            try:
                toks = shlex.split(line)[1:]
                params = dict(t.split("=", 1) for t in toks)
            except ValueError as exc:
                raise ParseError(f"{loc}: bad entry header") from exc
            kind = params.pop("kind", None)
            if kind not in SYSTEM_KINDS + ("table",):
                raise ParseError(f"{loc}: unknown entry kind {kind!r}")
            if not params.get("src"):
                raise ParseError(f"{loc}: entry needs a non-empty src tag")
            cur = CatalogEntry(kind, params, location=loc)
            entries.append(cur)
            continue
        if cur is None:
            if line:
                raise ParseError(f"{loc}: content before the first entry header")
            continue
        if cur.kind == "table":
            if not line:
                continue
            if not cur.header:
                cur.header = next(csv.reader([line]))
            else:
                vals = next(csv.reader([line]))
                if len(vals) != len(cur.header):
                    raise ParseError(f"{loc}: expected {len(cur.header)} columns")
                cur.rows.append(dict(zip(cur.header, vals)))
        else:
            if not line:
                flush_block()
            else:
                block.append(_parse_row(line, loc))
    flush_block()
    for e in entries:
        if e.kind in SYSTEM_KINDS:
            _check_shapes(e)
    return entries


def _check_shapes(e: CatalogEntry) -> None:
    q = e.get("q")
    if e.kind == "code":
        alphabet, rows = q ** e.get("h"), None
    else:
        alphabet, rows = q, e.get("h")
    r = e.get("r")
    for k, M in enumerate(e.matrices):
        if e.kind == "code":
            if M.shape[0] != r:
                raise ParseError(f"{e.location}: generator matrix must have r={r} rows")
        elif M.shape != (rows, r):
            raise ParseError(f"{e.location}: matrix {k + 1} has shape {M.shape}, expected {(rows, r)}")
        if M.size and (M.min() < 0 or M.max() >= alphabet):
            raise ParseError(f"{e.location}: matrix {k + 1} has digits outside F_{alphabet}")


def load_catalog(path: str | Path | None = None) -> list[CatalogEntry]:
    """All entries from the catalog and table files, in file order."""
    base = Path(path) if path is not None else data_dir()
    files = []
    for sub in ("catalog", "tables"):
        d = base / sub
        if d.is_dir():
            files += sorted(d.glob("*.cat"))
    if not files and base.is_file():
        files = [base]
    out = []
    for f in files:
        out += parse_catalog(f.read_text(), origin=str(f.relative_to(base) if f != base else f.name))
    return out


def load_facts(path: str | Path | None = None) -> LinearFactsOracle:
    p = Path(path) if path is not None else data_dir() / "facts.csv"
    if not p.exists():
        raise ConfigurationError(f"facts file {p} not found")
    return LinearFactsOracle.from_file(p)


# ---------------------------------------------------------------------------
# verification


@dataclass
class EntryReport:
    name: str
    ok: bool
    mismatches: list[str] = field(default_factory=list)
    info: dict[str, object] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def line(self) -> str:
        status = "ok" if self.ok else "MISMATCH"
        extra = " ".join(f"{k}={v}" for k, v in self.info.items())
        return f"{status:8} {self.name} {extra}".rstrip()


def _range(text: str) -> tuple[int, int]:
    if ".." in text:
        lo, hi = text.split("..")
        return int(lo), int(hi)
    return int(text), int(text)


def verify_entry(e: CatalogEntry, oracle: LinearFactsOracle | None = None) -> EntryReport:
    rep = EntryReport(e.name, True)
    if e.note:
        rep.notes.append(e.note)
    try:
        if e.kind == "system":
            _verify_system(e, rep)
        elif e.kind == "code":
            _verify_code(e, rep)
        elif e.kind == "derived":
            _verify_derived(e, rep)
        else:
            handler = _TABLES.get(e.params.get("name", ""))
            if handler is None:
                rep.mismatches.append(f"unknown table {e.params.get('name')!r}")
            else:
                handler(e, rep, oracle)
    except (ParseError, ValueError, KeyError) as exc:
        rep.mismatches.append(f"malformed entry: {exc}")
    rep.ok = not rep.mismatches
    return rep


def _errata(e: CatalogEntry) -> dict[int, np.ndarray]:
    """Parse ``erratum="k:row/row/...;k2:..."`` (1-based matrix index, replacement rows)."""
    out: dict[int, np.ndarray] = {}
    raw = e.params.get("erratum", "")
    for part in filter(None, (x.strip() for x in raw.split(";"))):
        try:
            idx, rows = part.split(":", 1)
            M = np.array([_parse_row(r, e.location) for r in rows.split("/")], dtype=np.int64)
            out[int(idx)] = M
        except ValueError as exc:
            raise ParseError(f"{e.location}: bad erratum {part!r}") from exc
        if not 1 <= int(idx) <= len(e.matrices) or M.shape != e.matrices[int(idx) - 1].shape:
            raise ParseError(f"{e.location}: erratum {part!r} does not match the listing")
    return out


def corrected_matrices(e: CatalogEntry) -> list[np.ndarray]:
    fix = _errata(e)
    return [fix.get(k + 1, M) for k, M in enumerate(e.matrices)]


def _system_of(e: CatalogEntry, printed: bool = False) -> ProjectiveSystem:
    q, r, h = e.get("q"), e.get("r"), e.get("h")
    S = ProjectiveSystem(q, r, h)
    for M in (e.matrices if printed else corrected_matrices(e)):
        S.add(M)
    return S


def _verify_system(e: CatalogEntry, rep: EntryReport) -> None:
    q, r, h, s, n = (e.get(k) for k in ("q", "r", "h", "s", "n"))
    F = field_of_order(q)
    deficient = [k + 1 for k, M in enumerate(corrected_matrices(e)) if rank(M, F) != h]
    if deficient:
        rep.mismatches.append(f"matrices without full rank: {deficient}")
    S = _system_of(e)
    p = system_params(S)
    fixes = _errata(e)
    if fixes:
        printed = system_params(_system_of(e, printed=True))
        rep.notes.append(f"matrices {sorted(fixes)} replaced per erratum; the listing as printed has "
                         f"hyperplane maximum {printed.s}")
        rep.info["printed_s"] = printed.s
    rep.info.update(n=S.n, s=p.s, distinct=S.distinct)
    if S.n != n:
        rep.mismatches.append(f"element count {S.n} != {n}")
    if p.s > s:
        rep.mismatches.append(f"hyperplane maximum {p.s} > {s}")
    elif p.s < s:
        rep.notes.append(f"hyperplane maximum {p.s} is below the stated {s}")
    if S.distinct != S.n:
        mult = {m: c for m, c in _multiplicity_spectrum(S).items() if m > 1}
        rep.notes.append(f"repeated elements: multiplicity spectrum {mult}")
    ub = griesmer_ub(q, r, h, s)
    rep.info["griesmer_ub"] = ub
    if n > ub:
        rep.mismatches.append(f"n={n} exceeds the Griesmer upper bound {ub}")


def _multiplicity_spectrum(S: ProjectiveSystem) -> dict[int, int]:
    out: dict[int, int] = {}
    for m in S.elements.values():
        out[m] = out.get(m, 0) + 1
    return dict(sorted(out.items()))


def _verify_code(e: CatalogEntry, rep: EntryReport) -> None:
    q, h = e.get("q"), e.get("h")
    C = AdditiveCode(q, h, e.matrices[0])
    we_geo = weight_enumerator(C)
    we_bf = weight_enumerator(C, "bruteforce")
    rep.info.update(n=C.n, d=we_bf.min_distance, enumerator=str(we_bf))
    if we_geo != we_bf:
        rep.mismatches.append("geometric and brute-force enumerators differ")
    if C.n != e.get("n"):
        rep.mismatches.append(f"length {C.n} != {e.get('n')}")
    if we_bf.min_distance != e.get("d"):
        rep.mismatches.append(f"minimum distance {we_bf.min_distance} != {e.get('d')}")
    if "enumerator" in e.params and str(we_bf) != e.params["enumerator"]:
        rep.mismatches.append(f"enumerator {we_bf} != {e.params['enumerator']}")


def _verify_derived(e: CatalogEntry, rep: EntryReport) -> None:
    S = _system_of(e)
    D = derived_linear_code(S)
    we = weight_enumerator(D, "bruteforce")
    rep.info.update(n=D.n, d=we.min_distance, enumerator=str(we))
    if we != weight_enumerator(D):
        rep.mismatches.append("geometric and brute-force enumerators differ")
    if "enumerator" in e.params and str(we) != e.params["enumerator"]:
        rep.mismatches.append(f"enumerator {we} != {e.params['enumerator']}")
    if "d" in e.params and we.min_distance != e.get("d"):
        rep.mismatches.append(f"minimum distance {we.min_distance} != {e.get('d')}")


def _table_griesmer_coding(e: CatalogEntry, rep: EntryReport, oracle: LinearFactsOracle | None) -> None:
    q, r, h = e.get("q"), e.get("r"), e.get("h")
    oracle = oracle if oracle is not None else load_facts()
    for row in e.rows:
        s = int(row["s"])
        g = griesmer_ub(q, r, h, s)
        if g != int(row["griesmer"]):
            rep.mismatches.append(f"s={s}: griesmer {g} != {row['griesmer']}")
        c = coding_ub(q, r, h, s, oracle)
        stated = int(row["coding"]) if row["coding"] else g
        if c != stated:
            rep.mismatches.append(f"s={s}: coding {c} != {stated}")
        lo, hi = _range(row["known"])
        if hi > c:
            rep.mismatches.append(f"s={s}: known value {row['known']} above the coding bound {c}")
    rep.info["rows"] = len(e.rows)


def _table_small(e: CatalogEntry, rep: EntryReport, oracle: LinearFactsOracle | None) -> None:
    r, h = e.get("r"), e.get("h")
    checked = 0
    for row in e.rows:
        q, s = int(row["q"]), int(row["s"])
        g = griesmer_ub(q, r, h, s)
        if g != int(row["griesmer"]):
            rep.mismatches.append(f"q={q} s={s}: griesmer {g} != {row['griesmer']}")
        lo, hi = _range(row["value"])
        if hi > g:
            rep.mismatches.append(f"q={q} s={s}: value {row['value']} above the Griesmer bound {g}")
        cf = closed_forms(q, r, h, s)
        if cf is not None and cf.exact:
            checked += 1
            if not lo <= cf.value <= hi:
                rep.mismatches.append(f"q={q} s={s}: closed form {cf.value} outside {row['value']}")
    rep.info.update(rows=len(e.rows), closed_forms_checked=checked)


def _render_improvements(rows: list[tuple[int, int, int, int, int]]) -> str:
    return "\n".join(",".join(map(str, r)) for r in rows)


def _table_improvements(e: CatalogEntry, rep: EntryReport, oracle: LinearFactsOracle | None) -> None:
    q, r, h = e.get("q"), e.get("r"), e.get("h")
    A = asymptotic_table(q, r, h)
    Q, P = A[0].modulus, A[0].coefficient
    computed = [(x.offset, Q, P, x.constant, x.improvement) for x in improvement_table(q, r, h)]
    stored = [tuple(int(row[c]) for c in e.header) for row in e.rows]
    if _render_improvements(computed) != _render_improvements(stored):  # type: ignore[arg-type]
        cs, ss = set(computed), set(stored)
        rep.mismatches.append(f"rows differ: missing {sorted(cs - ss)}, unexpected {sorted(ss - cs)}")
    rep.info["rows"] = len(stored)


def _table_asymptotic(e: CatalogEntry, rep: EntryReport, oracle: LinearFactsOracle | None) -> None:
    q, r, h = e.get("q"), e.get("r"), e.get("h")
    A = {f.offset: f for f in asymptotic_table(q, r, h)}
    for row in e.rows:
        i = int(row["i"])
        f = A.get(i)
        if f is None:
            rep.mismatches.append(f"offset {i} out of range")
            continue
        got = (f.modulus, f.coefficient, f.constant)
        want = (int(row["modulus"]), int(row["coefficient"]), int(row["constant"]))
        if got != want:
            rep.mismatches.append(f"i={i}: computed {got} != stored {want}")
    missing = sorted(set(A) - {int(row["i"]) for row in e.rows})
    if missing:
        rep.notes.append(f"offsets not listed: {missing}")
    rep.info["rows"] = len(e.rows)


def _table_sporadic(e: CatalogEntry, rep: EntryReport, oracle: LinearFactsOracle | None) -> None:
    oracle = oracle if oracle is not None else load_facts()
    for row in e.rows:
        q, r, h, s = (int(row[k]) for k in ("q", "r", "h", "s"))
        lo, hi = _range(row["n"])
        blo, bhi = _range(row["nbar"])
        ub = coding_ub(q, r, h, s, oracle)
        tag = f"({q},{r},{h};{s})"
        if hi > ub:
            rep.mismatches.append(f"{tag}: n range {row['n']} exceeds the upper bound {ub}")
        lin = nbar_griesmer(q, r, h, s)
        if lin is not None and bhi > lin:
            rep.mismatches.append(f"{tag}: linear value {row['nbar']} exceeds its Griesmer bound {lin}")
        if lo <= blo:
            rep.mismatches.append(f"{tag}: no improvement ({row['n']} vs {row['nbar']})")
    rep.info["rows"] = len(e.rows)


_TABLES = {
    "griesmer_coding": _table_griesmer_coding,
    "planar": _table_small,
    "fivethree": _table_small,
    "improvements": _table_improvements,
    "asymptotic": _table_asymptotic,
    "sporadic": _table_sporadic,
}


@dataclass
class CatalogSummary:
    reports: list[EntryReport]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.reports)

    @property
    def failures(self) -> list[EntryReport]:
        return [r for r in self.reports if not r.ok]

    def text(self) -> str:
        lines = []
        for r in self.reports:
            lines.append(r.line())
            lines += [f"         note: {n}" for n in r.notes]
            lines += [f"         - {m}" for m in r.mismatches]
        lines.append(f"{len(self.reports)} entries, {len(self.failures)} mismatches")
        return "\n".join(lines) + "\n"


def verify_all(entries: list[CatalogEntry] | None = None, oracle: LinearFactsOracle | None = None) -> CatalogSummary:
    entries = load_catalog() if entries is None else entries
    if oracle is None and any(e.kind == "table" for e in entries):
        try:
            oracle = load_facts()
        except ConfigurationError:
            oracle = LinearFactsOracle()
    return CatalogSummary([verify_entry(e, oracle) for e in entries])
