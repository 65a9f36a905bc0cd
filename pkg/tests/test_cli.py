import math
from pathlib import Path

import pytest

from interevent import __version__
from interevent.cli import main
from interevent.powerlaw import read_ccdf_tsv
from interevent.report import read_tsv_table
from interevent.tsv import is_undef

DATA = Path(__file__).parent / "data"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def in_data(monkeypatch):
    monkeypatch.chdir(DATA)


def strip_version(text):
    return "\n".join(l for l in text.splitlines() if not l.startswith("# version:"))


def test_analyze_golden(capsys, in_data):
    code, out, _ = run(capsys, "analyze", "small.csv")
    assert code == 0
    assert strip_version(out) == strip_version((DATA / "small_analyze.tsv").read_text())
    assert f"# version: {__version__}" in out


def test_sweep_golden(capsys, in_data):
    code, out, _ = run(capsys, "sweep", "small.csv", "--windows", "5s,1m,1h")
    assert code == 0
    assert strip_version(out) == strip_version((DATA / "small_sweep.tsv").read_text())


def test_analyze_threads_do_not_change_output(capsys, in_data):
    _, single, _ = run(capsys, "analyze", "small.csv")
    _, multi, _ = run(capsys, "analyze", "small.csv", "--threads", "4")
    assert single == multi


def test_every_cell_finite_or_tagged(capsys, in_data):
    _, out, _ = run(capsys, "analyze", "small.csv")
    _, rows = read_tsv_table(out)
    numeric = ("message_count", "span_months", "n_tau", "alpha", "xmin", "ks_stat", "B", "M")
    for row in rows:
        for col in numeric:
            cell = row[col]
            assert is_undef(cell) or math.isfinite(float(cell)), (col, cell)
            assert cell.lower() not in ("nan", "inf", "-inf")


def test_periodic_row(capsys, tmp_path):
    path = tmp_path / "p.csv"
    assert run(capsys, "generate", "--kind", "periodic", "--period", "60", "--n", "50", "-o", path)[0] == 0
    _, out, _ = run(capsys, "analyze", path)
    row = read_tsv_table(out)[1][0]
    assert row["B"] == "-1.0"
    assert row["M"] == "undef(zero-variance)"


def test_single_event_user_skipped(capsys, tmp_path):
    path = tmp_path / "one.csv"
    path.write_text("user_id,timestamp\nsolo,5\n")
    code, out, _ = run(capsys, "analyze", path)
    assert code == 0
    assert "# skipped\tsolo\tinsufficient-events (1 event)" in out
    assert read_tsv_table(out)[1] == []


def test_human_output(capsys, in_data):
    code, out, _ = run(capsys, "analyze", "small.csv", "--human")
    assert code == 0
    assert "skipped:" in out and "\t" not in out


def test_analyze_window_flag(capsys, in_data):
    _, out, _ = run(capsys, "analyze", "small.csv", "--window", "1m")
    header, rows = read_tsv_table(out)
    assert header["window"].startswith("60s")
    assert {r["user_id"]: r["n_tau"] for r in rows} == {"A": "5", "B": "0", "D": "3"}
    assert rows[1]["B"] == "undef(insufficient-events)"


def test_analyze_options_in_header(capsys, in_data):
    _, out, _ = run(capsys, "analyze", "small.csv", "--dedup", "epsilon", "--fit-method", "ccdf-ls",
                    "--xmin", "2s", "--seed", "7")
    header, rows = read_tsv_table(out)
    assert header["dedup"] == "keep-with-epsilon"
    assert header["fit_method"] == "ccdf-ls"
    assert header["xmin"] == "2.0"
    assert header["seed"] == "7"
    d = [r for r in rows if r["user_id"] == "D"][0]
    assert d["message_count"] == "5" and d["n_tau"] == "4"


def test_jsonl_input(capsys, tmp_path):
    path = tmp_path / "e.jsonl"
    path.write_text('{"user":"x","ts":0}\n{"user":"x","ts":"1970-01-01T00:00:05Z"}\n{"user":"x","ts":9}\n')
    _, out, _ = run(capsys, "analyze", path)
    assert read_tsv_table(out)[1][0]["n_tau"] == "2"


def test_strict_parse_failure_exit_2(capsys, tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("user_id,timestamp\nu1,abc\nu1,5\nu1,9\n")
    code, _, err = run(capsys, "analyze", path, "--strict")
    assert code == 2 and "line 2" in err and "invalid timestamp" in err
    code, out, _ = run(capsys, "analyze", path)
    assert code == 0 and "# skipped_lines: 1" in out


def test_unreadable_input_exit_2(capsys, tmp_path):
    code, _, err = run(capsys, "analyze", tmp_path / "missing.csv")
    assert code == 2 and "missing.csv" in err


@pytest.mark.parametrize("argv", [
    ["analyze"],
    ["bogus"],
    ["analyze", "x.csv", "--xmin", "never"],
    ["sweep", "x.csv", "--windows", "2h,1h"],
    ["analyze", "x.csv", "--threads", "0"],
    ["generate", "--kind", "poisson", "--n", "5"],
])
def test_usage_errors_exit_1(capsys, argv):
    with pytest.raises(SystemExit) as info:
        code = main(argv)
        raise SystemExit(code)
    assert info.value.code == 1


def test_ccdf_export(capsys, tmp_path):
    src = tmp_path / "e.csv"
    src.write_text("user_id,timestamp\nu,0\nu,1\nu,3\nu,5\nu,9\nv,0\n")
    out = tmp_path / "ccdf.tsv"
    assert run(capsys, "ccdf", src, "--user", "u", "-o", out)[0] == 0
    assert out.read_text() == "x\tp\n1.0\t1.0\n2.0\t0.75\n4.0\t0.25\n"


def test_ccdf_single_interval_and_user_default(capsys, tmp_path):
    src = tmp_path / "e.csv"
    src.write_text("user_id,timestamp\nu,10\nu,17\n")
    out = tmp_path / "c.tsv"
    assert run(capsys, "ccdf", src, "-o", out)[0] == 0
    assert out.read_text() == "x\tp\n7.0\t1.0\n"


def test_ccdf_errors(capsys, tmp_path):
    src = tmp_path / "e.csv"
    src.write_text("user_id,timestamp\nu,0\nu,1\nv,0\n")
    assert run(capsys, "ccdf", src, "--user", "zz", "-o", tmp_path / "c")[0] == 2
    assert run(capsys, "ccdf", src, "--user", "v", "-o", tmp_path / "c")[0] == 2
    assert run(capsys, "ccdf", src, "-o", tmp_path / "c")[0] == 1


def test_ccdf_fit_writes_model_file(capsys, tmp_path):
    src = tmp_path / "pl.csv"
    run(capsys, "generate", "--kind", "powerlaw", "--alpha", "1.5", "--xmin", "60", "--n", "100000",
        "--seed", "3", "-o", src)
    out = tmp_path / "pl.tsv"
    code, _, err = run(capsys, "ccdf", src, "-o", out, "--fit")
    assert code == 0 and "alpha=" in err
    emp = read_ccdf_tsv(open(out))
    model = read_ccdf_tsv(open(tmp_path / "pl.model.tsv"))
    assert model.x.tolist() == emp.x.tolist()
    assert max(abs(emp.p - model.p)) <= 0.02


def test_sweep_fifteen_rows(capsys, tmp_path):
    src = tmp_path / "three.csv"
    lines = ["user_id,timestamp"]
    for user, step in (("A", 600), ("H", 1800), ("I", 5400)):
        t = 0
        for k in range(40):
            t += step * (1 + k % 7)
            lines.append(f"{user},{t}")
    src.write_text("\n".join(lines) + "\n")
    code, out, _ = run(capsys, "sweep", src, "--users", "A,H,I", "--windows", "1h,2h,3h,4h,5h")
    assert code == 0
    header, rows = read_tsv_table(out)
    assert len(rows) == 15
    assert header["window_interpretation"].startswith("truncation")
    for user in "AHI":
        tails = [int(r["n_tail"]) for r in rows if r["user_id"] == user]
        assert tails == sorted(tails)


def test_sweep_noop_windows_identical_alpha(capsys, tmp_path):
    src = tmp_path / "pl.csv"
    run(capsys, "generate", "--kind", "powerlaw", "--alpha", "2.5", "--xmin", "30", "--n", "500", "-o", src)
    text = src.read_text().splitlines()
    # keep only events whose gaps stay under an hour
    ts = [int(l.split(",")[1]) for l in text[1:]]
    kept, t = [0], 0
    for a, b in zip(ts, ts[1:]):
        if b - a < 3600:
            t += b - a
            kept.append(t)
    src.write_text("user_id,timestamp\n" + "".join(f"s,{k}\n" for k in kept))
    _, out, _ = run(capsys, "sweep", src)
    alphas = {r["alpha"] for r in read_tsv_table(out)[1]}
    assert len(alphas) == 1 and not is_undef(alphas.pop())


def test_sweep_unknown_user(capsys, in_data):
    assert run(capsys, "sweep", "small.csv", "--users", "A,Q")[0] == 2


def test_generate_examples(capsys, tmp_path):
    code, out, err = run(capsys, "generate", "--kind", "periodic", "--period", "5", "--n", "3")
    assert code == 0
    assert out == "user_id,timestamp\nsynthetic,0\nsynthetic,5\nsynthetic,10\nsynthetic,15\n"
    assert "B: -1.0" in err
    _, out, _ = run(capsys, "generate", "--kind", "alternating", "--a", "1", "--b", "9", "--n", "2")
    assert out.splitlines()[1:] == ["synthetic,0", "synthetic,1", "synthetic,10"]


def test_generate_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    flags = ["generate", "--kind", "poisson", "--rate", "0.01", "--n", "2000", "--seed", "99"]
    run(capsys, *flags, "-o", a)
    run(capsys, *flags, "-o", b)
    assert a.read_bytes() == b.read_bytes()


def test_generate_invalid_spec(capsys):
    code, _, err = run(capsys, "generate", "--kind", "alternating", "--a", "2", "--b", "2", "--n", "4")
    assert code == 1
    assert "usage:" in err and "a != b" in err
