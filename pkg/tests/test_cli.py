import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from ergosq.cli import main
from ergosq.signal import GridSpec, make_signal, save_signal


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def _rows(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


def test_halfline_end_to_end(tmp_path, capsys):
    sig, sel = tmp_path / "h.json", tmp_path / "l.json"
    code, _, _ = run(["construct", "halfline", "--W", 20, "--signal-out", sig,
                      "--selector-out", sel], capsys)
    assert code == 0
    K = 20
    code, out, _ = run(["compute", "--signal", sig, "--selector", f"file:{sel}",
                        "--scales", f"1:{K}", "--x-range", "0:1"], capsys)
    assert code == 0
    header = json.loads(out.splitlines()[0][len("# config: "):])
    assert header["scales"] == f"1:{K}" and header["command"] == "compute"
    rows = _rows(out)
    assert [float(r["x"]) for r in rows] == [0.5]
    assert all(float(r["value"]) >= 0.5 * math.sqrt(K) for r in rows)


def test_constant_signal_gives_zero_csv(tmp_path, capsys):
    # constant on [0, 4) at level -2; evaluate where every window stays inside
    f = make_signal(np.full(64, 2.0), GridSpec(-2, -24, 64))
    save_signal(f, tmp_path / "c.csv")
    code, out, _ = run(["compute", "--signal", tmp_path / "c.csv", "--selector", "centered",
                        "--scales", "-2:0", "--x-range", "-1:1"], capsys)
    assert code == 0
    rows = _rows(out)
    assert rows and all(float(r["value"]) == 0.0 for r in rows)


def test_certify_theorem1ii(tmp_path, capsys):
    sig = tmp_path / "theorem1ii.json"
    run(["construct", "theorem1ii", "--ell-max", 3, "--resolution", 7, "--signal-out", sig,
         "--selector-out", tmp_path / "m.json"], capsys)
    code, out, _ = run(["certify", "--signal", sig, "--scales", "-7:13"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["failures"] == 0 and doc["count"] > 100


def test_certify_failure_exits_one(tmp_path, capsys, monkeypatch):
    from ergosq import cli, norms

    real = norms.certify_sweep

    def broken(*args, **kw):
        certs = real(*args, **kw)
        c = certs[0]
        bad = norms.Inequality("forced", 1.0, 0.0, False)
        return [norms.Theorem2Certificate(**{**c.__dict__,
                                             "inequalities": c.inequalities + [bad]})] + certs[1:]

    monkeypatch.setattr(cli, "certify_sweep", broken)
    f = make_signal(np.r_[np.zeros(8), np.ones(8), np.zeros(16)], GridSpec(-3, 0, 32))
    save_signal(f, tmp_path / "s.json")
    code, out, err = run(["certify", "--signal", tmp_path / "s.json", "--levels", "-3:-2"], capsys)
    assert code == 1
    assert err.startswith("error: certificate:")
    assert json.loads(out)["failures"] == 1


def test_sup_bmo_pnorm_tail(tmp_path, capsys):
    rng = np.random.default_rng(2)
    f = make_signal(rng.integers(-8, 9, 48) / 8.0, GridSpec(-3, -10, 48))
    save_signal(f, tmp_path / "s.json")
    code, out, _ = run(["sup", "--signal", tmp_path / "s.json", "--scales", "-3:8",
                        "--format", "json", "--dump-terms"], capsys)
    doc = json.loads(out)
    assert code == 0 and len(doc["value"]) == 48 and len(doc["per_scale_terms"][0]) == 12
    code, out2, _ = run(["sup", "--lower", "--signal", tmp_path / "s.json", "--scales", "-3:8",
                         "--format", "json"], capsys)
    lo = json.loads(out2)["value"]
    assert all(a <= b for a, b in zip(lo, doc["value"]))
    code, out, _ = run(["bmo", "--signal", tmp_path / "s.json", "--scales", "-3:8"], capsys)
    assert code == 0 and json.loads(out)["bmo"] >= 0
    code, out, _ = run(["pnorm", "--signal", tmp_path / "s.json", "--p", 4,
                        "--selector", "random:3"], capsys)
    assert code == 0 and json.loads(out)["ratio"] > 0
    code, out, _ = run(["tail", "--signal", tmp_path / "s.json", "--k-hi", 5], capsys)
    assert json.loads(out)["tail_bound"] == pytest.approx(2 * f.l1_norm / 32 / math.sqrt(3))


def test_adversary_cli(tmp_path, capsys):
    sig, sel = tmp_path / "t.json", tmp_path / "m.json"
    run(["construct", "theorem1ii", "--ell-max", 4, "--resolution", 8, "--signal-out", sig,
         "--selector-out", sel], capsys)
    out_sel = tmp_path / "adv.json"
    code, out, _ = run(["adversary", "--signal", sig, "--scales", "-8:12", "--seed", 1,
                        "--selector-out", out_sel], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["max_realization_error"] <= 1e-8
    assert json.loads(out_sel.read_text())["kind"] == "tabulated"
    code, out, _ = run(["bmo", "--signal", sig, "--scales", "-8:12", "--selector",
                        f"file:{out_sel}"], capsys)
    assert json.loads(out)["bmo"] >= rep["bound"] - 1e-12


def test_integer_construct(tmp_path, capsys):
    sig = tmp_path / "z.csv"
    code, _, _ = run(["construct", "integer", "--W", 5, "--signal-out", sig,
                      "--selector-out", tmp_path / "l.json"], capsys)
    assert code == 0 and sig.read_text().startswith("k_min,origin_index,mode")


def test_bench_table(capsys):
    code, out, _ = run(["bench", "--length", 1024, "--span", 4], capsys)
    lines = out.splitlines()
    assert code == 0 and lines[1] == "k,naive_s,deque_s,speedup"
    assert lines[-1].startswith("total,") and len(lines) == 2 + 5 + 1


def test_exit_codes(tmp_path, capsys):
    code, _, err = run(["compute", "--signal", tmp_path / "missing.json", "--selector", "left"],
                       capsys)
    assert code == 1 and err.startswith("error: io:") and err.count("\n") == 1
    f = make_signal(np.ones(8), GridSpec(0, 0, 8))
    save_signal(f, tmp_path / "s.json")
    code, _, err = run(["compute", "--signal", tmp_path / "s.json", "--selector", "left",
                        "--scales", "-3:2"], capsys)
    assert code == 1 and err.startswith("error: contract:") and err.count("\n") == 1
    code, _, err = run(["compute", "--signal", tmp_path / "s.json", "--selector", "sideways"],
                       capsys)
    assert code == 1 and "unrecognised selector" in err
    for argv in (["frobnicate"], ["compute", "--signal", tmp_path / "s.json"],
                 ["compute", "--signal", tmp_path / "s.json", "--selector", "left",
                  "--scales", "3:1"]):
        with pytest.raises(SystemExit) as exc:
            main([str(a) for a in argv])
        assert exc.value.code == 2
    capsys.readouterr()


def test_determinism_across_runs_and_threads(tmp_path, capsys):
    rng = np.random.default_rng(9)
    save_signal(make_signal(rng.standard_normal(200), GridSpec(-4, 3, 200)), tmp_path / "s.json")
    base = ["compute", "--signal", tmp_path / "s.json", "--selector", "random:5",
            "--format", "json", "--dump-terms"]
    outs = []
    for threads in (1, 1, 4):
        _, out, _ = run(base + ["--threads", threads], capsys)
        outs.append(json.loads(out))
    _, again, _ = run(base + ["--threads", 1], capsys)
    _, first, _ = run(base + ["--threads", 1], capsys)
    assert again == first  # byte-identical
    for doc in outs:
        doc.pop("config")
    assert outs[0] == outs[1] == outs[2]


def test_out_file_and_help(tmp_path, capsys):
    f = make_signal(np.ones(4), GridSpec(0, 0, 4))
    save_signal(f, tmp_path / "s.json")
    code, out, _ = run(["tail", "--signal", tmp_path / "s.json", "--k-hi", 1,
                        "--out", tmp_path / "o.json"], capsys)
    assert code == 0 and out == ""
    assert json.loads((tmp_path / "o.json").read_text())["k_hi"] == 1
    proc = subprocess.run([sys.executable, "-m", "ergosq.cli", "compute", "--help"],
                          capture_output=True, text=True)
    for flag in ("--selector", "--scales", "--format", "--dump-terms", "--threads"):
        assert flag in proc.stdout
