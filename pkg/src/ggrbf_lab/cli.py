"""Command-line entry point: ``ggrbf-lab <subcommand> [options]``.

Every subcommand produces one main artifact (CSV or JSON) whose first
record is the fully resolved configuration, so ``ggrbf-lab replay FILE``
regenerates it.  With ``--out`` a PNG figure and, where useful, a
plot-ready ``.series.csv`` are written next to it.

Exit codes: 0 when every in-artifact check passes, 1 when a check fails
or the computation aborts, 2 for invalid options.
"""

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import plotting
from .kernels import KernelSelectorError, parse_kernel
from .learn.data import gen_test_function_1, gen_test_function_2, train_test_split
from .learn.krr import krr_fit
from .learn.mlp import MlpDivergenceError, TrainConfig
from .learn.reports import (
    default_nn_specs,
    default_regression_grid,
    default_svm_grid,
    nn_report,
    regression_report,
    svm_report,
)
from .special_fn import QuadratureError
from .spectral import hermite_report, hermite_table, mercer_report
from .verify import check_entry, rkhs_verify

SCHEMA_VERSION = 1
PROG = "ggrbf-lab"

_DEFAULT_FORMAT = {"kernel-eval": "csv", "hermite": "csv"}
_GLOBAL_DEFAULTS = {"seed": 0, "out": None, "format": None, "paper_constants": False,
                    "no_plots": False}
# flags that change where output goes, not what it contains
_NOT_CONFIG = ("out", "no_plots", "artifact")

_GRIDS = {
    "regress": {
        "default": {"sigmas": [2.0, 5.0, 10.0, 20.0], "sigma0s": [0.0, 2.0, 5.0, 10.0, 20.0],
                    "ridges": [1e-8, 1e-6, 1e-4, 1e-2]},
        "small": {"sigmas": [2.0, 5.0], "sigma0s": [0.0, 2.0], "ridges": [1e-6, 1e-2]},
    },
    "svm": {
        "default": {"sigmas": [0.25, 0.5, 1.0, 2.0], "sigma0s": [0.0, 0.5, 1.0, 2.0],
                    "gammas": [0.05, 0.1, 0.5], "coef0s": [0.0, -1.0]},
        "small": {"sigmas": [0.5, 1.0], "sigma0s": [0.0, 1.0], "gammas": [0.1], "coef0s": [0.0]},
    },
}


class ValidationError(ValueError):
    """Bad option value; reported with exit code 2."""


@dataclass
class Result:
    payload: dict
    table: Optional[dict] = None
    series: Optional[dict] = None
    figure: Optional[Callable] = None
    passed: bool = True


# --------------------------------------------------------------------------
# Formatting
# --------------------------------------------------------------------------

def _num(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        s = repr(float(v))
        return s[:-2] if s.endswith(".0") else s
    return str(v)


def _header(config):
    return "# " + json.dumps({"schema_version": SCHEMA_VERSION, "config": config},
                             sort_keys=True) + "\n"


def render_csv(config, table):
    buf = io.StringIO()
    buf.write(_header(config))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table["columns"])
    for row in table["rows"]:
        w.writerow([_num(v) for v in row])
    return buf.getvalue()


def render_json(config, payload):
    doc = {"schema_version": SCHEMA_VERSION, "config": config}
    doc.update(payload)
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def _rows_table(rows, columns):
    return {"columns": columns, "rows": [[r.get(c) for c in columns] for r in rows]}


# --------------------------------------------------------------------------
# Option parsing
# --------------------------------------------------------------------------

def _float_list(text):
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("list must not be empty")
    return vals


def _global_flags(defaults):
    p = argparse.ArgumentParser(add_help=False)
    d = (lambda k: argparse.SUPPRESS) if not defaults else (lambda k: _GLOBAL_DEFAULTS[k])
    p.add_argument("--seed", type=int, default=d("seed"), help="RNG seed (default 0)")
    p.add_argument("--out", default=d("out"), help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default=d("format"),
                   help="artifact format")
    p.add_argument("--paper-constants", action="store_true", default=d("paper_constants"),
                   help="use the 2*pi moment/normalization pair and the supremum-based "
                        "evaluation bound")
    p.add_argument("--no-plots", action="store_true", default=d("no_plots"),
                   help="skip PNG figures when writing to --out")
    return p


def build_parser():
    top = argparse.ArgumentParser(prog=PROG, parents=[_global_flags(True)],
                                  description="GGRBF kernel toolkit: verification suites and experiments.")
    sub = top.add_subparsers(dest="command", required=True, metavar="COMMAND")
    g = [_global_flags(False)]

    p = sub.add_parser("kernel-eval", parents=g, help="kernel values on a distance grid or point pairs")
    p.add_argument("--kernel", required=True, help="selector, e.g. ggrbf:sigma=1,sigma0=1")
    p.add_argument("--rmax", type=float, default=3.0)
    p.add_argument("--steps", type=int, default=101)
    p.add_argument("--pairs", default=None, help="CSV of point pairs (x_0..x_d-1, z_0..z_d-1)")

    p = sub.add_parser("rkhs-verify", parents=g, help="function-space check bundle")
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--sigma0", type=float, default=1.0)
    p.add_argument("--n-max", type=int, default=10)

    p = sub.add_parser("regress", parents=g, help="kernel ridge regression grid on a test function")
    p.add_argument("--function", type=int, choices=(1, 2), default=1)
    p.add_argument("--grid", choices=sorted(_GRIDS["regress"]), default="default")
    p.add_argument("--sigmas", type=_float_list, default=None)
    p.add_argument("--sigma0s", type=_float_list, default=None)
    p.add_argument("--ridges", type=_float_list, default=None)
    p.add_argument("--count", type=int, default=101)
    p.add_argument("--scaling", choices=("unit", "integer"), default="unit")
    p.add_argument("--test-fraction", type=float, default=0.25)

    p = sub.add_parser("svm", parents=g, help="SMO classifier over a kernel grid")
    p.add_argument("--grid", choices=sorted(_GRIDS["svm"]), default="default")
    p.add_argument("--sigmas", type=_float_list, default=None)
    p.add_argument("--sigma0s", type=_float_list, default=None)
    p.add_argument("--gammas", type=_float_list, default=None)
    p.add_argument("--coef0s", type=_float_list, default=None)
    p.add_argument("--C", type=float, default=1.0, dest="C")
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--seeds", type=int, default=5, help="number of seeds starting at --seed")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--separation", type=float, default=2.0)
    p.add_argument("--spread", type=float, default=1.0)

    p = sub.add_parser("nn", parents=g, help="GGRBF versus leaky-ReLU dense networks")
    p.add_argument("--width", type=int, default=16)
    p.add_argument("--depth", type=int, default=7)
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--learning-rate", type=float, default=1e-2)
    p.add_argument("--momentum", type=float, default=0.9)
    p.add_argument("--batch-size", type=int, default=16)
    p.add_argument("--leak", type=float, default=0.1)
    p.add_argument("--seeds", type=int, default=3)
    p.add_argument("--count", type=int, default=300)
    p.add_argument("--classes", type=int, default=3)
    p.add_argument("--spread", type=float, default=0.8)

    p = sub.add_parser("mercer", parents=g, help="Nystrom versus closed-form Gaussian eigenpairs")
    p.add_argument("--sigma", type=float, default=0.5)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--modes", type=int, default=30)
    p.add_argument("--nodes", type=int, default=200)

    p = sub.add_parser("hermite", parents=g, help="Hermite-like family table and diagnostics")
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--a", default="0.091", help="weight constant a (exact decimal)")
    p.add_argument("--b", default="0.81", help="weight constant b (exact decimal)")
    p.add_argument("--xmin", type=float, default=-6.0)
    p.add_argument("--xmax", type=float, default=6.0)
    p.add_argument("--steps", type=int, default=241)

    p = sub.add_parser("replay", parents=g, help="regenerate an artifact from its embedded config")
    p.add_argument("artifact", help="CSV or JSON artifact written by this tool")
    return top


def _resolve(ns):
    cfg = dict(_GLOBAL_DEFAULTS)
    cfg.update(vars(ns))
    if cfg["format"] is None:
        cfg["format"] = _DEFAULT_FORMAT.get(cfg["command"], "json")
    return cfg


def config_of(cfg):
    """The reproducible part of a resolved option set."""
    return {k: v for k, v in sorted(cfg.items()) if k not in _NOT_CONFIG}


def _require(cond, msg):
    if not cond:
        raise ValidationError(msg)


def _fill_grid(cfg, keys):
    preset = _GRIDS[cfg["command"]][cfg["grid"]]
    for k in keys:
        if cfg.get(k) is None:
            cfg[k] = list(preset[k])


def validate(cfg):
    """Check every option before any computation; fills grid presets."""
    cmd = cfg["command"]
    if cmd == "kernel-eval":
        try:
            parse_kernel(cfg["kernel"])
        except KernelSelectorError as e:
            raise ValidationError(f"--kernel: {e}") from None
        _require(cfg["rmax"] >= 0 and math.isfinite(cfg["rmax"]), "--rmax must be finite and >= 0")
        _require(cfg["steps"] >= 1, "--steps must be >= 1")
        if cfg["pairs"] is not None:
            _require(Path(cfg["pairs"]).is_file(), f"--pairs: no such file {cfg['pairs']!r}")
    elif cmd == "rkhs-verify":
        _require(cfg["sigma"] > 0, "--sigma must be positive")
        _require(cfg["sigma0"] >= 0, "--sigma0 must be nonnegative")
        _require(cfg["n_max"] >= 0, "--n-max must be nonnegative")
    elif cmd == "regress":
        _fill_grid(cfg, ("sigmas", "sigma0s", "ridges"))
        _require(min(cfg["sigmas"]) > 0, "--sigmas must be positive")
        _require(min(cfg["sigma0s"]) >= 0, "--sigma0s must be nonnegative")
        _require(min(cfg["ridges"]) >= 0, "--ridges must be nonnegative")
        _require(cfg["count"] >= 4, "--count must be >= 4")
        _require(0 < cfg["test_fraction"] < 1, "--test-fraction must lie in (0, 1)")
    elif cmd == "svm":
        _fill_grid(cfg, ("sigmas", "sigma0s", "gammas", "coef0s"))
        _require(min(cfg["sigmas"]) > 0, "--sigmas must be positive")
        _require(min(cfg["sigma0s"]) >= 0, "--sigma0s must be nonnegative")
        _require(cfg["C"] > 0, "--C must be positive")
        _require(cfg["tol"] > 0, "--tol must be positive")
        _require(cfg["seeds"] >= 1, "--seeds must be >= 1")
        _require(cfg["count"] >= 8, "--count must be >= 8")
        _require(cfg["spread"] > 0, "--spread must be positive")
    elif cmd == "nn":
        _require(cfg["width"] >= 1 and cfg["depth"] >= 1, "--width and --depth must be >= 1")
        _require(cfg["epochs"] >= 1, "--epochs must be >= 1")
        _require(cfg["learning_rate"] > 0, "--learning-rate must be positive")
        _require(0 <= cfg["momentum"] < 1, "--momentum must lie in [0, 1)")
        _require(cfg["batch_size"] >= 1, "--batch-size must be >= 1")
        _require(cfg["seeds"] >= 3, "--seeds must be >= 3")
        _require(cfg["classes"] >= 2, "--classes must be >= 2")
        _require(cfg["count"] >= 4 * cfg["classes"], "--count too small for --classes")
        _require(cfg["spread"] > 0, "--spread must be positive")
    elif cmd == "mercer":
        _require(cfg["sigma"] > 0, "--sigma must be positive")
        _require(cfg["alpha"] > 0, "--alpha must be positive")
        _require(cfg["modes"] >= 1, "--modes must be >= 1")
        _require(cfg["nodes"] >= cfg["modes"], "--nodes must be >= --modes")
    elif cmd == "hermite":
        _require(cfg["n"] >= 0, "--n must be nonnegative")
        for key in ("a", "b"):
            try:
                Fraction(cfg[key])
            except (ValueError, ZeroDivisionError):
                raise ValidationError(f"--{key} must be a decimal number") from None
        _require(Fraction(cfg["a"]) > 0, "--a must be positive")
        _require(Fraction(cfg["b"]) >= 0, "--b must be nonnegative")
        _require(cfg["xmin"] < cfg["xmax"], "--xmin must be below --xmax")
        _require(cfg["steps"] >= 2, "--steps must be >= 2")
    return cfg


# --------------------------------------------------------------------------
# Subcommands
# --------------------------------------------------------------------------

def _read_pairs(path):
    rows = [r for r in csv.reader(Path(path).read_text().splitlines())
            if r and not r[0].lstrip().startswith("#")]
    try:
        float(rows[0][0])
    except (IndexError, ValueError):
        rows = rows[1:]  # header line
    try:
        raw = np.array([[float(v) for v in r] for r in rows], dtype=float)
    except ValueError as e:
        raise ValidationError(f"--pairs: {e}") from None
    _require(raw.ndim == 2 and raw.size > 0, "--pairs: no rows of equal length")
    _require(raw.shape[1] % 2 == 0, "--pairs: need an even number of columns")
    return raw


def cmd_kernel_eval(cfg):
    spec = parse_kernel(cfg["kernel"])
    if cfg["pairs"] is not None:
        raw = _read_pairs(cfg["pairs"])
        d = raw.shape[1] // 2
        k = np.array([float(spec.matrix(x[None, :], z[None, :])[0, 0])
                      for x, z in zip(raw[:, :d], raw[:, d:])])
        table = {"columns": ["pair", "k"], "rows": [[i, v] for i, v in enumerate(k)]}
        return Result({"kernel": spec.tag, **table}, table=table)
    r = np.linspace(0.0, cfg["rmax"], cfg["steps"])
    # radial profile: k(r e_1, 0)
    k = spec.matrix(r[:, None], np.zeros((1, 1)))[:, 0]
    table = {"columns": ["r", "k(r)"], "rows": [[float(a), float(b)] for a, b in zip(r, k)]}
    return Result({"kernel": spec.tag, **table}, table=table,
                  figure=lambda path: plotting.plot_kernel_profile(r, k, spec.tag, path))


def cmd_rkhs_verify(cfg):
    report, passed = rkhs_verify(cfg["sigma"], cfg["sigma0"], cfg["n_max"], cfg["seed"],
                                 cfg["paper_constants"])
    cols = ["check", "computed", "reference", "abs_err", "rel_err", "pass"]
    return Result(report, table=_rows_table(report["checks"], cols), passed=passed,
                  figure=lambda path: plotting.plot_rkhs_checks(report["checks"], path))


def _superset_check(rows, key):
    best = {r["method"]: r[key] for r in rows}
    if "GRBF" not in best or "GGRBF" not in best:
        return None
    return check_entry("ggrbf_best_le_grbf_best", best["GGRBF"], best["GRBF"], 0.0, kind="le")


_TABLE_COLUMNS = ["method", "figure_ref", "min_error", "misclass_pct", "accuracy_pct",
                  "reference_value", "best_kernel"]


def cmd_regress(cfg):
    gen = gen_test_function_1 if cfg["function"] == 1 else gen_test_function_2
    data = gen(cfg["count"], cfg["seed"], cfg["scaling"])
    grid = default_regression_grid(cfg["sigmas"], cfg["sigma0s"], cfg["ridges"])
    report = regression_report(data, grid, cfg["test_fraction"], cfg["seed"], cfg["function"])
    checks = []
    if 0.0 in cfg["sigma0s"]:
        c = _superset_check(report["rows"], "min_error")
        if c is not None:
            checks.append(c)
    report["checks"] = checks
    passed = all(c["pass"] for c in checks)

    train, _ = train_test_split(data, cfg["test_fraction"], cfg["seed"])
    x = data.inputs[:, 0]
    preds = {}
    for row in report["rows"]:
        model = krr_fit(train, row["best_kernel"], row["best_ridge"])
        preds[row["method"]] = model.predict(x)
    series = {"columns": ["x", "y"] + [f"pred_{m}" for m in preds],
              "rows": [[float(x[i]), float(data.targets[i])] + [float(p[i]) for p in preds.values()]
                       for i in range(len(x))]}
    title = f"test function {cfg['function']} (seed {cfg['seed']})"
    return Result(report, table=_rows_table(report["rows"], _TABLE_COLUMNS), series=series,
                  passed=passed,
                  figure=lambda path: plotting.plot_regression(x, data.targets, preds, title, path))


def cmd_svm(cfg):
    grid = default_svm_grid(cfg["sigmas"], cfg["sigma0s"], cfg["gammas"], cfg["coef0s"])
    seeds = tuple(range(cfg["seed"], cfg["seed"] + cfg["seeds"]))
    report = svm_report(grid, seeds, cfg["C"], cfg["tol"], cfg["count"], cfg["separation"],
                        cfg["spread"])
    checks = []
    if 0.0 in cfg["sigma0s"]:
        c = _superset_check(report["rows"], "misclass_pct")
        if c is not None:
            checks.append(c)
    bad = [c["kernel"] for c in report["configs"] if not c["converged"]]
    checks.append(check_entry("smo_converged", len(bad), 0, 0.0, kind="abs", failing=bad))
    kkt = max(c["max_kkt_violation"] for c in report["configs"])
    checks.append(check_entry("kkt_violation_le_tol", kkt, cfg["tol"], 0.0, kind="le"))
    report["checks"] = checks
    return Result(report, table=_rows_table(report["rows"], _TABLE_COLUMNS),
                  passed=all(c["pass"] for c in checks),
                  figure=lambda path: plotting.plot_svm(report["configs"], path))


def cmd_nn(cfg):
    specs = default_nn_specs(cfg["width"], cfg["depth"], 2, cfg["classes"], cfg["leak"])
    tc = TrainConfig(epochs=cfg["epochs"], learning_rate=cfg["learning_rate"],
                     momentum=cfg["momentum"], batch_size=cfg["batch_size"])
    seeds = tuple(range(cfg["seed"], cfg["seed"] + cfg["seeds"]))
    report = nn_report(specs, seeds, tc, cfg["count"], cfg["classes"], cfg["spread"])
    return Result(report, table=_rows_table(report["rows"], _TABLE_COLUMNS),
                  figure=lambda path: plotting.plot_nn(report["rows"], path))


def cmd_mercer(cfg):
    report, table, passed = mercer_report(cfg["sigma"], cfg["alpha"], cfg["modes"], cfg["nodes"])
    return Result(report, table=table, series=table, passed=passed,
                  figure=lambda path: plotting.plot_mercer(table, report, path))


def cmd_hermite(cfg):
    a, b = Fraction(cfg["a"]), Fraction(cfg["b"])
    report, passed = hermite_report(cfg["n"], a, b, cfg["seed"])
    table = hermite_table(cfg["n"], a, b, cfg["xmin"], cfg["xmax"], cfg["steps"])
    return Result({**report, "table": table}, table=table, series=table, passed=passed,
                  figure=lambda path: plotting.plot_hermite(table, path))


COMMANDS = {
    "kernel-eval": cmd_kernel_eval,
    "rkhs-verify": cmd_rkhs_verify,
    "regress": cmd_regress,
    "svm": cmd_svm,
    "nn": cmd_nn,
    "mercer": cmd_mercer,
    "hermite": cmd_hermite,
}


# --------------------------------------------------------------------------
# Driver
# --------------------------------------------------------------------------

def read_config(path):
    """Configuration embedded in an artifact written by this tool."""
    try:
        text = Path(path).read_text()
        doc = json.loads(text.split("\n", 1)[0][2:] if text.startswith("# ") else text)
    except (OSError, ValueError) as e:
        raise ValidationError(f"cannot read artifact {path}: {e}") from None
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ValidationError(f"{path}: unsupported schema_version {doc.get('schema_version')!r}")
    return doc["config"]


def execute(cfg):
    """Run a validated configuration; returns ``(main_text, result)``."""
    config = config_of(cfg)
    result = COMMANDS[cfg["command"]](cfg)
    if cfg["format"] == "csv":
        if result.table is None:
            raise ValidationError(f"{cfg['command']} has no CSV form; use --format json")
        text = render_csv(config, result.table)
    else:
        text = render_json(config, result.payload)
    return text, result


def write_outputs(out, cfg, text, result, plots=True):
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text)
    written = [out]
    stem = out.with_suffix("")
    if result.series is not None and not (cfg["format"] == "csv" and result.series is result.table):
        p = Path(f"{stem}.series.csv")
        p.write_text(render_csv(config_of(cfg), result.series))
        written.append(p)
    if plots and result.figure is not None:
        written.append(Path(result.figure(f"{stem}.png")))
    return written


def main(argv=None):
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        if ns.command == "replay":
            stored = read_config(ns.artifact)
            cfg = dict(_GLOBAL_DEFAULTS)
            cfg.update(stored)
            cfg["out"] = getattr(ns, "out", None)
            cfg["no_plots"] = getattr(ns, "no_plots", False)
        else:
            cfg = _resolve(ns)
        validate(cfg)
        text, result = execute(cfg)
    except ValidationError as e:
        parser.error(str(e))
    except (QuadratureError, MlpDivergenceError, np.linalg.LinAlgError, RuntimeError) as e:
        print(f"{PROG}: {cfg['command']} failed: {e}", file=sys.stderr)
        return 1
    if cfg["out"]:
        write_outputs(cfg["out"], cfg, text, result, plots=not cfg["no_plots"])
    else:
        sys.stdout.write(text)
    if not result.passed:
        print(f"{PROG}: {cfg['command']}: one or more checks failed", file=sys.stderr)
    return 0 if result.passed else 1


if __name__ == "__main__":
    sys.exit(main())
