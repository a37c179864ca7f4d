import numpy as np
import pytest

from addcodes.catalog import (_system_of, corrected_matrices, data_dir, load_catalog, load_facts, parse_catalog,
                              verify_all, verify_entry)
from addcodes.errors import ConfigurationError, ParseError
from addcodes.psys import system_params

SMALL = """\
entry kind=system q=2 r=4 h=2 s=1 n=5 src="spread"

1000
0100

0010
0001

1010
0101

1001
0111

1011
0110
"""


def test_parse_empty_and_comments():
    assert parse_catalog("") == []
    assert parse_catalog("# nothing\n\n") == []


def test_small_spread_entry_verifies():
    [e] = parse_catalog(SMALL)
    assert e.kind == "system" and len(e.matrices) == 5 and e.name == "system q=2 r=4 h=2 s=1 n=5"
    rep = verify_entry(e)
    assert rep.ok and rep.info["s"] == 1 and rep.info["griesmer_ub"] == 5


def test_bundled_catalog_has_no_mismatches():
    summary = verify_all()
    assert summary.ok, summary.text()
    assert len(summary.reports) == len(load_catalog()) >= 50
    assert summary.text().rstrip().endswith(f"{len(summary.reports)} entries, 0 mismatches")


def test_every_file_contributes():
    base = data_dir()
    files = sorted((base / "catalog").glob("*.cat")) + sorted((base / "tables").glob("*.cat"))
    for f in files:
        assert parse_catalog(f.read_text(), f.name), f.name


def _fault(path_rel, old, new):
    base = data_dir()
    entries = []
    for f in sorted((base / "catalog").glob("*.cat")) + sorted((base / "tables").glob("*.cat")):
        text = f.read_text()
        rel = f"{f.parent.name}/{f.name}"
        if rel == path_rel:
            assert old in text
            text = text.replace(old, new, 1)
        entries += parse_catalog(text, rel)
    return verify_all(entries, load_facts())


def test_fault_in_matrix_digit_is_reported_once():
    summary = _fault("catalog/01_n2_7_3_s3.cat", "\n0010000\n", "\n0000000\n")
    assert [r.name for r in summary.failures] == ["system q=2 r=7 h=3 s=3 n=23"]


def test_fault_in_stated_parameter_is_reported_once():
    summary = _fault("catalog/01_n2_7_3_s3.cat", "s=3 n=23", "s=3 n=24")
    assert len(summary.failures) == 1


def test_fault_in_table_cell_is_reported_once():
    summary = _fault("tables/griesmer_n2_8_2.cat", "\n4,12,,10\n", "\n4,13,,10\n")
    assert len(summary.failures) == 1 and "griesmer_coding" in summary.failures[0].name


def test_erratum_entries():
    fixed = [e for e in load_catalog() if "erratum" in e.params]
    assert len(fixed) == 2
    for e in fixed:
        s = e.get("s")
        assert system_params(_system_of(e, printed=True)).s == s + 1
        assert system_params(_system_of(e)).s <= s
        changed = [k for k, (A, B) in enumerate(zip(e.matrices, corrected_matrices(e))) if not np.array_equal(A, B)]
        assert len(changed) == 1
        rep = verify_entry(e)
        assert rep.ok and rep.info["printed_s"] == s + 1


def test_bad_erratum_rejected():
    [e] = parse_catalog(SMALL.replace('src="spread"', 'src="spread" erratum="9:1000/0100"'))
    assert not verify_entry(e).ok
    with pytest.raises(ParseError):
        from addcodes.catalog import _errata
        _errata(e)


@pytest.mark.parametrize("text", [
    "1000\n",
    "entry kind=weird src=x\n",
    "entry kind=system q=2 r=4 h=2 s=1 n=1\n\n1000\n0100\n",
    "entry kind=system q=2 r=4 h=2 s=1 n=1 src=x\n\n1000\n010\n",
    "entry kind=system q=2 r=4 h=2 s=1 n=1 src=x\n\n1000\n0100\n0010\n",
    "entry kind=system q=2 r=4 h=2 s=1 n=1 src=x\n\n1000\n0120\n",
    "entry kind=system q=2 r=4 h=2 s=1 n=1 src=x\n\n10a0\n0100\n",
    'entry kind=system q=2 r=4 src="unterminated\n',
])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_catalog(text)


def test_table_column_count_checked():
    with pytest.raises(ParseError):
        parse_catalog("entry kind=table name=sporadic src=x\nq,r\n1,2,3\n")


def test_data_dir_override(tmp_path, monkeypatch):
    (tmp_path / "catalog").mkdir()
    (tmp_path / "catalog" / "one.cat").write_text(SMALL)
    monkeypatch.setenv("ADDCODES_DATA", str(tmp_path))
    assert data_dir() == tmp_path
    assert len(load_catalog()) == 1 and verify_all().ok
    with pytest.raises(ConfigurationError):
        load_facts()
