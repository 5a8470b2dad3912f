"""Command-line front end: dispatch, config validation, file formats,
byte-level determinism and exit codes."""

import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from dualattack import cli
from dualattack import codes as C
from dualattack.krawtchouk import krawtchouk_exact


def _read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def test_krawtchouk_stdout(capsys):
    assert cli.run(["krawtchouk", "--n", "8", "--w", "3"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "t,value"
    assert len(lines) == 10
    for t, line in enumerate(lines[1:]):
        assert line == f"{t},{krawtchouk_exact(8, 3, t)}"


def test_krawtchouk_csv_and_metadata(tmp_path):
    out = tmp_path / "table.csv"
    assert cli.run(["krawtchouk", "--n", "6", "--w", "2",
                    "--out", str(out)]) == 0
    raw = out.read_bytes()
    assert b"\r" not in raw
    header, rows = _read_csv(out)
    assert header == ["t", "value"]
    assert [int(r[1]) for r in rows] == [krawtchouk_exact(6, 2, t)
                                         for t in range(7)]
    meta = json.loads((tmp_path / "table.meta.json").read_text())
    assert meta["format_version"] == 1
    assert meta["subcommand"] == "krawtchouk"
    assert meta["config"] == {"n": 6, "w": 2}
    assert "git_describe" in meta and "wall_time_s" in meta


def test_krawtchouk_bad_range(capsys):
    assert cli.run(["krawtchouk", "--n", "6", "--w", "9"]) == 2
    assert "--w" in capsys.readouterr().err


DECODE_INI = """\
[instance]
n = 24
k = 12
t = 3
seed = 5

[params]
s = 10
u = 2
w = 3
k_aux = 4
t_aux = 1
"""


def test_decode_record_and_soundness(tmp_path, capsys):
    cfg = tmp_path / "dec.ini"
    cfg.write_text(DECODE_INI)
    out = tmp_path / "dec.json"
    assert cli.run(["decode", "--config", str(cfg),
                    "--out", str(out)]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert set(rec) == {"format_version", "found", "e", "trials_used",
                        "wall_time_ms"}
    assert json.loads(out.read_text()) == rec
    assert rec["trials_used"] >= 1
    if rec["found"]:
        bits = np.unpackbits(np.frombuffer(bytes.fromhex(rec["e"]),
                                           np.uint8))[:24]
        assert int(bits.sum()) == 3
        code = C.random_code(24, 12, seed=[5, 101])
        inst = C.DecodingInstance.plant(code, 3, seed=[5, 102])
        assert code.contains((inst.y + bits) % 2)


def test_decode_missing_field(tmp_path, capsys):
    cfg = tmp_path / "dec.ini"
    cfg.write_text("[instance]\nn = 24\nk = 12\n")
    assert cli.run(["decode", "--config", str(cfg)]) == 2
    assert "'t'" in capsys.readouterr().err


def test_decode_bad_value_names_line(tmp_path, capsys):
    cfg = tmp_path / "dec.ini"
    cfg.write_text("[instance]\nn = 24\nk = twelve\nt = 3\n"
                   "[params]\ns = 10\nu = 2\nw = 3\nk_aux = 4\nt_aux = 1\n")
    assert cli.run(["decode", "--config", str(cfg)]) == 2
    err = capsys.readouterr().err
    assert f"{cfg}:3" in err and "'k'" in err


def test_decode_inconsistent_params_exit_2(tmp_path, capsys):
    cfg = tmp_path / "dec.ini"
    cfg.write_text(DECODE_INI.replace("u = 2", "u = 9"))
    assert cli.run(["decode", "--config", str(cfg)]) == 2


SURV_INI = """\
[model]
n = 24
k = 12
t = 4
s = 10
u = 2
w = 3
k_aux = 4
t_aux = 1

[experiment]
seed = 3
trials = 20000
"""


def test_survival_three_labeled_curves(tmp_path):
    cfg = tmp_path / "surv.ini"
    cfg.write_text(SURV_INI)
    out = tmp_path / "curves.csv"
    assert cli.run(["survival", "--config", str(cfg),
                    "--out", str(out)]) == 0
    header, rows = _read_csv(out)
    assert header == ["label", "threshold", "count", "ci_low", "ci_high"]
    labels = {r[0] for r in rows}
    assert labels == {"experimental", "poisson", "independence"}
    for label in labels:
        sub = [r for r in rows if r[0] == label]
        ts = [float(r[1]) for r in sub]
        cs = [float(r[2]) for r in sub]
        assert ts == sorted(ts)
        assert all(a >= b for a, b in zip(cs, cs[1:]))
        for r in sub:
            assert float(r[3]) <= float(r[2]) + 1e-12 <= float(r[4]) + 2e-12
    meta = json.loads((tmp_path / "curves.meta.json").read_text())
    assert set(meta["curves"]) == labels
    assert meta["seed"] == 3


def test_survival_explicit_grid_shared(tmp_path):
    cfg = tmp_path / "surv.ini"
    cfg.write_text(SURV_INI + "\n[grid]\nmin = -10\nmax = 30\npoints = 9\n")
    out = tmp_path / "curves.csv"
    assert cli.run(["survival", "--config", str(cfg),
                    "--out", str(out)]) == 0
    _, rows = _read_csv(out)
    want = np.linspace(-10.0, 30.0, 9)
    for label in ("experimental", "poisson", "independence"):
        ts = [float(r[1]) for r in rows if r[0] == label]
        assert np.allclose(ts, want)


def test_survival_unknown_field_line_precise(tmp_path, capsys):
    cfg = tmp_path / "surv.ini"
    cfg.write_text("[model]\nn = 24\nbogus = 1\n")
    assert cli.run(["survival", "--config", str(cfg),
                    "--out", str(tmp_path / "x.csv")]) == 2
    assert f"{cfg}:3" in capsys.readouterr().err


def test_survival_unknown_section(tmp_path, capsys):
    cfg = tmp_path / "surv.ini"
    cfg.write_text(SURV_INI + "\n[plotting]\ncolor = red\n")
    assert cli.run(["survival", "--config", str(cfg),
                    "--out", str(tmp_path / "x.csv")]) == 2
    assert "[plotting]" in capsys.readouterr().err


def test_byte_identical_reruns(tmp_path):
    cfg = tmp_path / "surv.ini"
    cfg.write_text(SURV_INI)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.run(["survival", "--config", str(cfg), "--out", str(a)]) == 0
    assert cli.run(["survival", "--config", str(cfg), "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_exponent_csv(tmp_path):
    out = tmp_path / "fig1.csv"
    assert cli.run(["exponent", "--algs", "prange,dumer", "--rmin", "0.2",
                    "--rmax", "0.4", "--step", "0.1",
                    "--out", str(out)]) == 0
    header, rows = _read_csv(out)
    assert header == ["algorithm", "R", "tau", "alpha", "feasible",
                      "sigma", "R_aux", "tau_aux", "omega", "mu"]
    assert [r[0] for r in rows] == ["prange"] * 3 + ["dumer"] * 3
    assert [float(r[1]) for r in rows[:3]] == [0.2, 0.3, 0.4]
    for pr, du in zip(rows[:3], rows[3:]):
        assert float(du[3]) <= float(pr[3]) + 1e-12
    for r in rows:
        assert r[4] == "true"
        assert r[5:] == [""] * 5


def test_exponent_flag_validation(capsys):
    assert cli.run(["exponent", "--algs", "sterno", "--rmin", "0.2",
                    "--rmax", "0.4", "--step", "0.1"]) == 2
    assert cli.run(["exponent", "--rmin", "0.4", "--rmax", "0.2",
                    "--step", "0.1"]) == 2
    assert cli.run(["exponent", "--rmin", "0.2", "--rmax", "0.4",
                    "--step", "-1"]) == 2
    capsys.readouterr()


def test_lattice_score_preset(tmp_path):
    out = tmp_path / "curve.csv"
    assert cli.run(["lattice-score", "--preset", "fig3-left",
                    "--points", "6", "--trials", "100000",
                    "--out", str(out)]) == 0
    header, rows = _read_csv(out)
    assert header == ["model", "threshold", "survival", "ci_low", "ci_high"]
    models = [r[0] for r in rows]
    assert models == ["refined"] * 6 + ["floor"] * 6 + ["independence"] * 6
    for r in rows:
        s = float(r[2])
        assert 0.0 <= float(r[3]) <= s <= float(r[4]) <= 1.0
    meta = json.loads((tmp_path / "curve.meta.json").read_text())
    assert meta["config"]["preset"] == "fig3-left"
    assert meta["curve"]["threshold_units"] == "raw score"


def test_lattice_score_custom_matches_preset(tmp_path):
    from dualattack.lattice import preset_params
    p = preset_params("fig3-left")
    cfg = tmp_path / "lat.ini"
    cfg.write_text("[lattice]\nn = %d\nq = %d\nlog_volume = %r\n"
                   "N = %d\nw = %r\n" % (p.n, p.q, p.log_volume, p.N, p.w))
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    common = ["--points", "5", "--trials", "100000", "--seed", "9"]
    assert cli.run(["lattice-score", "--preset", "fig3-left",
                    *common, "--out", str(a)]) == 0
    assert cli.run(["lattice-score", "--preset", "custom",
                    "--config", str(cfg), *common, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_lattice_score_flag_conflicts(tmp_path, capsys):
    assert cli.run(["lattice-score", "--preset", "custom"]) == 2
    cfg = tmp_path / "lat.ini"
    cfg.write_text("[lattice]\nn = 60\nq = 3329\nlog_volume = 255.0\n"
                   "N = 5040\nw = 0.032\n")
    assert cli.run(["lattice-score", "--preset", "fig3-left",
                    "--config", str(cfg)]) == 2
    assert cli.run(["lattice-score", "--preset", "nope"]) == 2
    capsys.readouterr()


def test_duality_check_summary(capsys):
    assert cli.run(["duality-check", "--n", "12", "--k", "6", "--s", "5",
                    "--kaux", "2", "--trials", "20"]) == 0
    assert capsys.readouterr().out.strip() == "20/20 exact"


def test_duality_check_budget_exit(capsys):
    # s > k leaves every partition rank-deficient, so no instance ever
    # yields samples and the attempt budget runs out
    assert cli.run(["duality-check", "--n", "6", "--k", "2", "--s", "4",
                    "--kaux", "1", "--trials", "2"]) == 1
    assert "budget" in capsys.readouterr().err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "dualattack",
                          "krawtchouk", "--n", "4", "--w", "1"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout.splitlines()[0] == "t,value"


def test_missing_subcommand_and_bad_flag(capsys):
    assert cli.run([]) == 2
    assert cli.run(["krawtchouk", "--n", "4"]) == 2
    assert cli.run(["krawtchouk", "--n", "x", "--w", "1"]) == 2
    capsys.readouterr()
