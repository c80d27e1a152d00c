import csv
import json
import math

from monolab import cli, states
from monolab.cli import EXIT_BRACKET, EXIT_CONFIG, EXIT_MEASURE, EXIT_OK


def run(*args):
    return cli.main(list(args))


def read_rows(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def check_row_arithmetic(rows):
    for row in rows:
        parts = [float(v) for k, v in row.items() if k.startswith("part_")]
        whole = float(row["whole"])
        delta = float(row["delta"])
        assert whole >= -1e-12
        assert all(p >= -1e-12 for p in parts)
        assert abs(delta - (whole - sum(parts))) <= 1e-12


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

def test_sweep_ghz_grid(tmp_path):
    out = tmp_path / "sweep.csv"
    code = run(
        "sweep", "--measure", "negativity", "--state", "ghz3",
        "--p-grid", "0:1:11", "--r-grid", "1,2", "--out", str(out),
    )
    assert code == EXIT_OK
    rows = read_rows(out)
    assert len(rows) == 22
    assert list(rows[0]) == ["p", "r", "measure", "whole", "part_1", "part_2", "delta"]
    check_row_arithmetic(rows)
    first = rows[0]
    assert abs(float(first["delta"]) - 0.5) < 1e-9  # p = 0, r = 1
    assert all(float(r["delta"]) >= -1e-9 for r in rows)


def test_sweep_single_point(tmp_path):
    out = tmp_path / "one.csv"
    assert run(
        "sweep", "--measure", "negativity", "--state", "ghz3",
        "--p-grid", "0", "--r-grid", "1", "--out", str(out),
    ) == EXIT_OK
    assert len(read_rows(out)) == 1


def test_sweep_w3_lognegativity_nonmonogamous_row(tmp_path):
    out = tmp_path / "w.csv"
    assert run(
        "sweep", "--measure", "lognegativity", "--state", "w3",
        "--p-grid", "0", "--r-grid", "1", "--out", str(out),
    ) == EXIT_OK
    row = read_rows(out)[0]
    assert float(row["delta"]) < 0.0


def test_sweep_byte_identical_reruns(tmp_path, monkeypatch):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = [
        "sweep", "--measure", "negativity", "--state", "w3", "--seed", "3",
        "--p-grid", "0:1:6", "--r-grid", "1,2",
    ]
    assert run(*args, "--out", str(a)) == EXIT_OK
    monkeypatch.setenv("MONOLAB_THREADS", "2")
    assert run(*args, "--out", str(b)) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_sweep_json_format_has_provenance(tmp_path):
    out = tmp_path / "sweep.json"
    assert run(
        "sweep", "--measure", "negativity", "--state", "ghz3",
        "--p-grid", "0,0.5", "--r-grid", "1", "--format", "json", "--out", str(out),
    ) == EXIT_OK
    payload = json.loads(out.read_text())
    assert payload["provenance"]["artifact"] == "monolab"
    assert payload["provenance"]["config"]["seed"] == 0
    assert len(payload["rows"]) == 2


def test_sweep_config_errors(tmp_path):
    # unsorted grid
    assert run(
        "sweep", "--measure", "negativity", "--state", "ghz3",
        "--p-grid", "1,0", "--r-grid", "1",
    ) == EXIT_CONFIG
    # both state sources
    f = tmp_path / "s.json"
    states.save_state(states.ghz(3), f)
    assert run(
        "sweep", "--measure", "negativity", "--state", "ghz3",
        "--state-file", str(f), "--p-grid", "0", "--r-grid", "1",
    ) == EXIT_CONFIG
    # no state source
    assert run(
        "sweep", "--measure", "negativity", "--p-grid", "0", "--r-grid", "1",
    ) == EXIT_CONFIG
    # unknown measure
    assert run(
        "sweep", "--measure", "tangle", "--state", "ghz3",
        "--p-grid", "0", "--r-grid", "1",
    ) == EXIT_CONFIG


def test_sweep_measure_undefined_exit(tmp_path):
    # mixed EoF on the 2x4 whole cut has no exact expression
    assert run(
        "sweep", "--measure", "eof", "--state", "ghz3",
        "--p-grid", "0.5", "--r-grid", "1", "--out", str(tmp_path / "x.csv"),
    ) == EXIT_MEASURE


# ---------------------------------------------------------------------------
# rstar
# ---------------------------------------------------------------------------

def test_rstar_w3_text_and_json(tmp_path):
    out = tmp_path / "r.json"
    code = run(
        "rstar", "--measure", "lognegativity", "--state", "w3",
        "--bracket", "1,2", "--tol", "1e-4", "--format", "json", "--out", str(out),
    )
    assert code == EXIT_OK
    payload = json.loads(out.read_text())
    assert 1.05 <= payload["r_star"] <= 1.07
    assert payload["score_lo"] < 0.0 < payload["score_hi"]
    assert len(payload["trace"]) >= 10  # bisection trace included

    txt = tmp_path / "r.txt"
    assert run(
        "rstar", "--measure", "lognegativity", "--state", "w3",
        "--bracket", "1,2", "--out", str(txt),
    ) == EXIT_OK
    assert txt.read_text().startswith("r_star = 1.05")


def test_rstar_unbracketed_exit_code():
    assert run(
        "rstar", "--measure", "negativity", "--state", "ghz3", "--bracket", "1,2",
    ) == EXIT_BRACKET


def test_rstar_from_state_file_matches_closed_form(tmp_path):
    f = tmp_path / "w3.json"
    states.save_state(states.w(3), f)
    out = tmp_path / "r.json"
    assert run(
        "rstar", "--measure", "lognegativity", "--state-file", str(f),
        "--bracket", "1,2", "--tol", "1e-5", "--format", "json", "--out", str(out),
    ) == EXIT_OK
    ln_whole = math.log2(1.0 + 2.0 * math.sqrt(2.0) / 3.0)
    ln_pair = math.log2((2.0 + math.sqrt(5.0)) / 3.0)
    expected = math.log(2.0) / math.log(ln_whole / ln_pair)
    assert abs(json.loads(out.read_text())["r_star"] - expected) <= 1e-5


def test_rstar_bad_bracket():
    assert run(
        "rstar", "--measure", "negativity", "--state", "w3", "--bracket", "2,1",
    ) == EXIT_CONFIG


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def test_verify_lemmas(tmp_path):
    out = tmp_path / "lemmas.json"
    assert run("verify", "lemmas", "--samples", "20000", "--out", str(out)) == EXIT_OK
    summary = json.loads(out.read_text())["summary"]
    assert summary["violations"] == 0


def test_verify_raising_w3_vacuous(tmp_path):
    out = tmp_path / "raise.json"
    code = run(
        "verify", "raising", "--measure", "lognegativity", "--state", "w3",
        "--r", "1", "--alpha", "1.5,2", "--out", str(out),
    )
    assert code == EXIT_OK
    summary = json.loads(out.read_text())["summary"]
    assert summary["skipped"] == 1
    assert summary["violations"] == 0


def test_verify_strong_random_pure(tmp_path):
    out = tmp_path / "strong.json"
    code = run(
        "verify", "strong", "--state", "random-pure", "--dims", "2,2,2,2",
        "--measure", "concurrence", "--normalized", "--alpha", "2",
        "--count", "25", "--out", str(out),
    )
    assert code == EXIT_OK
    summary = json.loads(out.read_text())["summary"]
    assert summary["count"] == 25 and summary["violations"] == 0


def test_verify_mixed_and_probe(tmp_path):
    out = tmp_path / "mixed.json"
    assert run(
        "verify", "mixed", "--dims", "2,2,2", "--count", "30", "--out", str(out),
    ) == EXIT_OK
    assert json.loads(out.read_text())["summary"]["violations"] == 0
    out2 = tmp_path / "probe.json"
    assert run(
        "verify", "probe-high-power", "--dims", "2,2,2", "--count", "20",
        "--r-grid", "2,3,4", "--out", str(out2),
    ) == EXIT_OK


def test_verify_search_exit_zero_even_with_witness(tmp_path):
    out = tmp_path / "search.json"
    assert run(
        "verify", "search", "--measure", "lognegativity", "--r", "1",
        "--dims", "2,2,2", "--count", "4", "--out", str(out),
    ) == EXIT_OK
    summary = json.loads(out.read_text())["summary"]
    assert summary["worst_margin"] < 0.0  # witness found, still exit 0


def test_verify_lowering_harvest_roundtrip(tmp_path):
    out = tmp_path / "lower.json"
    assert run(
        "verify", "lowering", "--measure", "lognegativity", "--state", "w3",
        "--r", "1", "--alpha", "0.5,0.8", "--out", str(out),
    ) == EXIT_OK
    summary = json.loads(out.read_text())["summary"]
    assert summary["violations"] == 0 and summary["skipped"] == 0


def test_verify_unknown_theorem_is_parse_error():
    assert run("verify", "bogus") == EXIT_CONFIG


# ---------------------------------------------------------------------------
# figure
# ---------------------------------------------------------------------------

def test_figure_1(tmp_path):
    out = tmp_path / "fig1.csv"
    assert run("figure", "1", "--out", str(out)) == EXIT_OK
    rows = read_rows(out)
    assert len(rows) == 51 * 2 * 2  # p-grid x {neg, logneg} x {r=1, r=2}
    check_row_arithmetic(rows)
    assert all(float(r["delta"]) >= -1e-9 for r in rows)
    meta = json.loads((tmp_path / "fig1.meta.json").read_text())
    assert meta["conventions"]["negativity_normalized"] is False
    assert meta["conventions"]["log_base"] == 2


def test_figure_2_w_state(tmp_path):
    out = tmp_path / "fig2.csv"
    assert run("figure", "2", "--out", str(out)) == EXIT_OK
    rows = read_rows(out)
    neg = [r for r in rows if r["measure"] == "negativity"]
    logneg = [r for r in rows if r["measure"] == "lognegativity"]
    assert all(float(r["delta"]) >= -1e-9 for r in neg)
    start = [r for r in logneg if float(r["p"]) == 0.0 and float(r["r"]) == 1.0]
    assert float(start[0]["delta"]) < 0.0
    at_two = [r for r in logneg if float(r["r"]) == 2.0]
    assert all(float(r["delta"]) >= -1e-9 for r in at_two)
    # p = 1 is the maximally mixed state: scores vanish for both measures
    end_rows = [r for r in rows if float(r["p"]) == 1.0]
    assert all(float(r["delta"]) == 0.0 for r in end_rows)


def test_figure_3_crossing(tmp_path):
    out = tmp_path / "fig3.csv"
    assert run("figure", "3", "--out", str(out)) == EXIT_OK
    rows = read_rows(out)
    assert len(rows) == 101
    signs = [(float(r["r"]), float(r["delta"])) for r in rows]
    crossings = [
        (lo[0], hi[0]) for lo, hi in zip(signs, signs[1:]) if lo[1] < 0.0 <= hi[1]
    ]
    assert len(crossings) == 1
    assert 1.05 <= crossings[0][0] and crossings[0][1] <= 1.07


def test_figure_unknown_id_exit_2():
    assert run("figure", "7") == EXIT_CONFIG


# ---------------------------------------------------------------------------
# state-export
# ---------------------------------------------------------------------------

def test_state_export_roundtrip(tmp_path):
    out = tmp_path / "ghz3.json"
    assert run("state-export", "--state", "ghz3", "--out", str(out)) == EXIT_OK
    loaded = states.load_state(out)
    assert loaded.dims == (2, 2, 2)
    # exported file feeds back into other commands
    assert run(
        "sweep", "--measure", "negativity", "--state-file", str(out),
        "--p-grid", "0", "--r-grid", "1", "--out", str(tmp_path / "s.csv"),
    ) == EXIT_OK


def test_state_export_random_reproducible(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert run(
            "state-export", "--state", "random-mixed", "--dims", "2,2",
            "--rank", "2", "--seed", "9", "--out", str(path),
        ) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_unknown_command_exits_2():
    assert run("frobnicate") == EXIT_CONFIG
