import io
import json

import pytest
from hypothesis import given, strategies as st

from omin.cli import (
    InputError,
    dispatch,
    dot_graph,
    emit_report,
    load_messages,
    parse_messages,
    render_messages,
)
from omin.conflict import MessageSet, analyze
from omin.sched import schedule
from omin.topology import NetworkConfig

ASA_FILE = "0 4\n1 3\n2 5\n3 6\n4 2\n5 1\n6 0\n7 7\n"
RSA_FILE = "# route selection example\n0 5\n1 1\n2 3\n3 6\n\n4 0\n5 2\n6 4\n7 7  # last\n"


@pytest.fixture
def files(tmp_path):
    a = tmp_path / "asa.txt"
    a.write_text(ASA_FILE)
    r = tmp_path / "rsa.txt"
    r.write_text(RSA_FILE)
    return a, r


def run(argv):
    out = io.StringIO()
    code = dispatch([str(x) for x in argv], out)
    return code, out.getvalue()


def test_load_paper_files(asa_example, rsa_example):
    assert load_messages(io.StringIO(ASA_FILE)) == asa_example
    assert load_messages(io.StringIO(RSA_FILE)) == rsa_example


def test_parse_line_numbers():
    mf = parse_messages("# hi\n0 1\n\n3 2\n")
    assert mf.lines == [2, 4]
    assert mf.messages.cfg.size == 4


def test_size_floor_and_override():
    assert load_messages(io.StringIO("0 0\n")).cfg.size == 4
    assert load_messages(io.StringIO("0 0\n"), floor=8).cfg.size == 8
    assert load_messages(io.StringIO("0 9\n")).cfg.size == 16
    assert load_messages(io.StringIO("0 1\n"), size=32).cfg.size == 32


@pytest.mark.parametrize("text,match", [
    ("0 1\n2 3\n0 4\n", "line 3: duplicate source 0 .first seen on line 1"),
    ("0 x\n", "non-integer"),
    ("0 1 2\n", "expected"),
    ("0 9\n", "address >= N=8"),
])
def test_parse_errors(text, match):
    with pytest.raises(InputError, match=match):
        parse_messages(text, size=8 if "9" in text else None)


@given(st.integers(2, 6).flatmap(lambda n: st.tuples(
    st.just(2**n), st.lists(st.tuples(st.integers(0, 2**n - 1), st.integers(0, 2**n - 1)),
                           unique_by=lambda p: p[0], max_size=2**n))))
def test_render_round_trip(args):
    N, pairs = args
    ms = MessageSet.from_pairs(pairs, N)
    assert parse_messages(render_messages(ms)).messages == ms


def test_schedule_asa_json(files):
    code, out = run(["schedule", files[0], "--algo", "asa"])
    assert code == 0
    d = json.loads(out)
    assert list(d) == ["network", "algorithm", "mode", "passes", "trace", "metrics"]
    assert d["passes"] == [[1, 2, 4, 7], [5, 6, 0, 3]]
    assert d["trace"]["diff"] == [-1, 0, 0, 0, -1, 1, 1, 0]
    assert d["network"] == {"size": 8, "stages": 3}
    assert d["metrics"]["pass_count"] == 2


def test_schedule_rsa_trace(files):
    code, out = run(["schedule", files[1], "--algo", "rsa"])
    d = json.loads(out)
    assert d["trace"]["row_sums"] == [1, 2, 2, 1, 0, 0, 0, 0]
    assert d["trace"]["selected_list"] == [4, 5, 6, 7, 2, 3]
    assert d["passes"][1] == [0, 1, 3]
    assert d["metrics"]["link_occurrences"] == [0, 0]


def test_schedule_deterministic(files):
    assert run(["schedule", files[0], "--algo", "heur-max"]) == run(
        ["schedule", files[0], "--algo", "heur-max"])


@pytest.mark.parametrize("fmt", ["text", "csv"])
def test_schedule_other_formats(files, fmt):
    code, out = run(["schedule", files[0], "--algo", "wm", "--format", fmt])
    assert code == 0 and out


def test_emit_report_empty_passes():
    ms = MessageSet((), NetworkConfig(8))
    d = json.loads(emit_report(schedule(ms, "wm")))
    assert d["passes"] == []
    assert d["metrics"] == {"pass_count": 0, "switch_occurrences": [], "link_occurrences": []}


def test_schedule_asa_floor_applied(tmp_path):
    f = tmp_path / "one.txt"
    f.write_text("0 0\n")
    code, out = run(["schedule", f, "--algo", "asa"])
    assert code == 0 and json.loads(out)["network"]["size"] == 8


def test_schedule_asa_small_size_rejected(tmp_path):
    f = tmp_path / "one.txt"
    f.write_text("0 0\n")
    assert run(["schedule", f, "--algo", "asa", "--size", "4"])[0] == 1


def test_analyze_counts(files, rsa_example):
    code, out = run(["analyze", files[1]])
    d = json.loads(out)
    assert code == 0
    assert d["oracle"]["link"]["occurrences"] == 4
    rep = analyze(rsa_example)
    assert d["oracle"]["switch"]["occurrences"] == rep.switch_count
    assert d["oracle"]["switch"]["distinct_pairs"] == len(rep.switch_pairs)
    assert d["windows"]["agrees_with_oracle"]


def test_analyze_text(files):
    code, out = run(["analyze", files[0], "--format", "text"])
    assert code == 0 and "12 occurrences, 8 distinct pairs" in out


def test_route():
    code, out = run(["route", "--src", 0, "--dst", 0, "--size", 8])
    assert code == 0 and out.splitlines()[0] == "links: 0,0,0,0"
    code, out = run(["route", "--src", 3, "--dst", 6])
    assert out.splitlines()[0] == "links: 3,7,7,6"
    assert run(["route", "--src", 9, "--dst", 0])[0] == 1


def test_usage_errors(capsys):
    assert run(["frobnicate"])[0] == 1
    assert run(["schedule", "x", "--algo", "zero"])[0] == 1
    assert run([])[0] == 1
    assert "usage" in capsys.readouterr().err


def test_missing_file():
    assert run(["analyze", "/nonexistent/file"])[0] == 1


def test_invariant_violation_exit_2(files, monkeypatch):
    import omin.cli as cli
    monkeypatch.setattr(cli, "window_link_occurrences", lambda ms: [])
    assert run(["analyze", files[1]])[0] == 2


def test_bench_cli(tmp_path, monkeypatch):
    monkeypatch.setenv("OMIN_SEED", "11")
    a = run(["bench", "--sizes", "8", "--trials", "2"])
    b = run(["bench", "--sizes", "8", "--trials", "2", "--seed", "11"])
    assert a == b and a[0] == 0
    assert len(a[1].splitlines()) == 1 + 2 * 7
    cfg = tmp_path / "b.json"
    cfg.write_text(json.dumps({"sizes": [16], "trials": 1, "algorithms": ["asa"]}))
    out = tmp_path / "o.csv"
    assert run(["bench", "--config", cfg, "--out", out])[0] == 0
    assert out.read_text().splitlines()[1].startswith("asa,16,")
    assert run(["bench", "--sizes", "6"])[0] == 1


def test_dot_topology(files):
    text = dot_graph(NetworkConfig(8))
    assert text.count("subgraph") == 12
    assert text.count("color=gray80") == 3 * 8 * 2
    code, out = run(["dot", files[1]])
    assert code == 0
    # 4 link occurrences -> both offending edges of each pair drawn red
    assert out.count("color=red") == 8
    path_edges = [l for l in out.splitlines() if "->" in l and "label=" in l]
    assert len(path_edges) == 8 * 3
