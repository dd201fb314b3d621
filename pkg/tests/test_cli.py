import csv
import io
import json
import subprocess
import sys

import pytest

from ggrbf_lab.cli import SCHEMA_VERSION, main, read_config


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def data_rows(text):
    return [r for r in csv.reader(io.StringIO(text)) if r and not r[0].startswith("#")]


def test_kernel_eval_rows(capsys):
    code, out, _ = run(["kernel-eval", "--kernel", "ggrbf:sigma=1,sigma0=1", "--rmax", "3",
                        "--steps", "4"], capsys)
    assert code == 0
    rows = data_rows(out)
    assert rows[0] == ["r", "k(r)"]
    assert len(rows) == 5
    assert rows[1] == ["0", "1"]
    header = json.loads(out.splitlines()[0][2:])
    assert header["schema_version"] == SCHEMA_VERSION
    assert header["config"]["kernel"] == "ggrbf:sigma=1,sigma0=1"


def test_kernel_eval_reduction(capsys):
    _, a, _ = run(["kernel-eval", "--kernel", "ggrbf:sigma=1,sigma0=0"], capsys)
    _, b, _ = run(["kernel-eval", "--kernel", "grbf:sigma=1"], capsys)
    assert data_rows(a) == data_rows(b)


def test_kernel_eval_pairs(tmp_path, capsys):
    pairs = tmp_path / "pairs.csv"
    pairs.write_text("x,z\n0,0\n0,1\n")
    code, out, _ = run(["kernel-eval", "--kernel", "grbf:sigma=1", "--pairs", str(pairs)], capsys)
    assert code == 0
    rows = data_rows(out)
    assert len(rows) == 3
    assert float(rows[1][1]) == 1.0
    assert float(rows[2][1]) == pytest.approx(0.36787944117144233, rel=1e-15)


@pytest.mark.parametrize("argv, flag", [
    (["kernel-eval", "--kernel", "ggrbf"], "sigma"),
    (["kernel-eval", "--kernel", "ggrbf:sigma=-1,sigma0=0"], "--kernel"),
    (["rkhs-verify", "--sigma", "0"], "--sigma"),
    (["regress", "--ridges", "-1"], "--ridges"),
    (["svm", "--C", "0"], "--C"),
    (["mercer", "--modes", "0"], "--modes"),
    (["hermite", "--a", "0"], "--a"),
])
def test_validation_exit_2(argv, flag, capsys):
    with pytest.raises(SystemExit) as e:
        main(argv)
    assert e.value.code == 2
    assert flag in capsys.readouterr().err


def test_rkhs_verify_default_passes(capsys):
    code, out, _ = run(["rkhs-verify"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["all_passed"]
    assert doc["config"]["sigma"] == 1.0
    names = {c["check"].split("[")[0] for c in doc["checks"]}
    assert {"moment_vs_quadrature", "onb_identity", "reproducing_residual", "kernel_vs_basis_sum",
            "eval_bound", "parseval"} <= names
    for c in doc["checks"]:
        assert {"check", "computed", "reference", "rel_err", "pass"} <= set(c)


def test_rkhs_verify_paper_constants_fails(capsys):
    code, out, err = run(["rkhs-verify", "--paper-constants"], capsys)
    doc = json.loads(out)
    assert code == 1 and "checks failed" in err
    bad = [c for c in doc["checks"] if c["check"].startswith("moment_vs_quadrature")]
    assert all(not c["pass"] and c["ratio"] == pytest.approx(2.0) for c in bad)
    assert doc["constants"]["moment_ratio_2pi_over_pi"] == pytest.approx(2.0)


def test_rkhs_verify_n_max_zero(capsys):
    code, out, _ = run(["rkhs-verify", "--n-max", "0"], capsys)
    assert code == 0 and json.loads(out)["all_passed"]


def test_hermite_columns(capsys):
    code, out, _ = run(["hermite", "--n", "6"], capsys)
    rows = data_rows(out)
    assert code == 0
    assert rows[0] == ["x", "H0", "H1", "H2", "H3", "H4", "H5", "H6"]
    assert all(len(r) == 8 for r in rows)


def test_mercer_field(capsys):
    code, out, _ = run(["mercer", "--sigma", "0.5", "--modes", "30"], capsys)
    doc = json.loads(out)
    assert code == 0
    assert doc["reconstruction_max_rel_err"] <= 1e-6
    assert "variant_form" in doc


def test_regress_small(capsys):
    code, out, _ = run(["regress", "--function", "1", "--seed", "7", "--grid", "small"], capsys)
    doc = json.loads(out)
    assert code == 0
    assert [r["method"] for r in doc["rows"]] == ["GRBF", "GGRBF"]
    assert doc["config"]["seed"] == 7


def test_regress_csv_table(capsys):
    code, out, _ = run(["regress", "--grid", "small", "--format", "csv"], capsys)
    rows = data_rows(out)
    assert code == 0 and rows[0][0] == "method" and len(rows) == 3


def test_nn_small(capsys):
    code, out, _ = run(["nn", "--width", "4", "--depth", "3", "--epochs", "2", "--count", "60"],
                       capsys)
    doc = json.loads(out)
    assert code == 0
    assert any(r["method"] == "dcnn-ggrbf" for r in doc["rows"])


def test_out_writes_artifacts(tmp_path, capsys):
    target = tmp_path / "m" / "mercer.json"
    assert main(["mercer", "--out", str(target)]) == 0
    assert target.exists()
    assert (tmp_path / "m" / "mercer.series.csv").exists()
    assert (tmp_path / "m" / "mercer.png").read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    other = tmp_path / "h.csv"
    assert main(["hermite", "--out", str(other), "--no-plots"]) == 0
    assert not (tmp_path / "h.png").exists()


@pytest.mark.parametrize("argv", [
    ["kernel-eval", "--kernel", "ggrbf:sigma=2,sigma0=0.5"],
    ["hermite", "--n", "3", "--steps", "11"],
    ["regress", "--grid", "small", "--function", "2", "--seed", "3"],
    ["svm", "--grid", "small", "--seeds", "2"],
    ["rkhs-verify", "--n-max", "3", "--format", "json"],
])
def test_replay_byte_identical(argv, tmp_path, capsys):
    first = tmp_path / ("a.csv" if argv[0] in ("kernel-eval", "hermite") else "a.json")
    main(argv + ["--out", str(first)])
    again = tmp_path / ("b" + first.suffix)
    main(["replay", str(first), "--out", str(again)])
    assert first.read_bytes() == again.read_bytes()
    assert (tmp_path / "a.png").read_bytes() == (tmp_path / "b.png").read_bytes()
    assert read_config(first) == read_config(again)


def test_replay_rejects_foreign_file(tmp_path):
    bogus = tmp_path / "x.json"
    bogus.write_text('{"schema_version": 99, "config": {}}')
    with pytest.raises(SystemExit) as e:
        main(["replay", str(bogus)])
    assert e.value.code == 2


def test_thread_count_does_not_change_output(monkeypatch, capsys):
    argv = ["svm", "--grid", "small", "--seeds", "2"]
    _, one, _ = run(argv, capsys)
    monkeypatch.setenv("GGRBF_LAB_THREADS", "4")
    _, four, _ = run(argv, capsys)
    assert one == four


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "ggrbf_lab.cli", "kernel-eval", "--kernel",
                        "grbf:sigma=1", "--steps", "2"], capture_output=True, text=True)
    assert r.returncode == 0 and data_rows(r.stdout)[1] == ["0", "1"]


def test_kernel_eval_bad_pairs(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("0,1,2\n")
    with pytest.raises(SystemExit) as e:
        main(["kernel-eval", "--kernel", "grbf:sigma=1", "--pairs", str(bad)])
    assert e.value.code == 2
