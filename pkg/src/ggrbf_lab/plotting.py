"""Static figures for CLI artifacts.

Every function takes the same plain data that goes into the CSV/JSON
artifact and writes one PNG.  The Agg backend is forced and the PNG
software tag is dropped so repeated runs produce identical bytes.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

__all__ = [
    "plot_hermite",
    "plot_kernel_profile",
    "plot_mercer",
    "plot_nn",
    "plot_regression",
    "plot_rkhs_checks",
    "plot_svm",
]

_STYLE = {
    "figure.figsize": (6.0, 4.0),
    "figure.dpi": 100,
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.4,
    "savefig.bbox": "tight",
}


def _save(fig, path):
    fig.savefig(path, format="png", metadata={"Software": None})
    plt.close(fig)
    return path


def plot_kernel_profile(r, k, label, path):
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        ax.plot(r, k, label=label)
        ax.set_xlabel("r")
        ax.set_ylabel("k(r)")
        ax.legend()
        return _save(fig, path)


def plot_regression(x, y, predictions, title, path):
    """Samples plus the best fit of each kernel family."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        ax.plot(x, y, "k.", ms=3, label="samples")
        for label, pred in predictions.items():
            ax.plot(x, pred, label=label)
        ax.set_xlabel("x")
        ax.set_ylabel("f(x)")
        ax.set_title(title)
        ax.legend()
        return _save(fig, path)


def plot_svm(configs, path):
    """Mean held-out misclassification for every kernel in the grid."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(7.0, 0.22 * len(configs) + 1.0))
        colors = {"grbf": "C0", "ggrbf": "C1", "sigmoid": "C2"}
        y = np.arange(len(configs))
        ax.barh(y, [c["misclass_pct"] for c in configs],
                color=[colors[c["family"]] for c in configs])
        ax.set_yticks(y, [c["kernel"] for c in configs], fontsize=6)
        ax.invert_yaxis()
        ax.set_xlabel("misclassification (%)")
        return _save(fig, path)


def plot_nn(rows, path):
    """Median held-out accuracy with the interquartile range as error bars."""
    rows = [r for r in rows if r.get("accuracy_pct") is not None]
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        med = np.array([r["accuracy_pct"] for r in rows])
        lo = med - np.array([r["accuracy_iqr"][0] for r in rows])
        hi = np.array([r["accuracy_iqr"][1] for r in rows]) - med
        x = np.arange(len(rows))
        ax.bar(x, med, yerr=[lo, hi], capsize=4, color="C0")
        ax.scatter(x, [r["reference_value"] for r in rows], color="k", marker="_", s=300,
                   zorder=3, label="reference")
        ax.set_xticks(x, [r["method"] for r in rows])
        ax.set_ylabel("accuracy (%)")
        ax.set_ylim(min(50.0, float(np.min(med - lo)) - 5.0), 100.0)
        ax.legend()
        return _save(fig, path)


def plot_mercer(table, report, path):
    """Eigenvalues (three routes) and reconstruction error against mode count."""
    rows = np.array(table["rows"], dtype=float)
    with plt.rc_context(_STYLE):
        fig, (a1, a2) = plt.subplots(1, 2, figsize=(9.0, 3.6))
        keep = rows[:, 1] > 0
        a1.semilogy(rows[keep, 0], rows[keep, 1], "o", ms=3, label="Nystrom")
        a1.semilogy(rows[:, 0], rows[:, 2], "-", label="standard form")
        a1.semilogy(rows[:, 0], rows[:, 3], "--", label="variant form")
        a1.set_xlabel("mode")
        a1.set_ylabel("eigenvalue")
        a1.legend()
        a2.semilogy(np.arange(1, len(rows) + 1), rows[:, 4], label="max rel (grid)")
        a2.semilogy(np.arange(1, len(rows) + 1), report["weighted_l2_by_modes"],
                    label="weighted L2 (nodes)")
        a2.set_xlabel("modes")
        a2.set_ylabel("reconstruction error")
        a2.legend()
        return _save(fig, path)


def plot_hermite(table, path):
    rows = np.array(table["rows"], dtype=float)
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        for k, name in enumerate(table["columns"][1:], start=1):
            col = rows[:, k]
            # same vertical scale for every degree
            ax.plot(rows[:, 0], col / max(np.max(np.abs(col)), 1e-300), label=name)
        ax.set_xlabel("x")
        ax.set_ylabel("H_n(x) / max|H_n|")
        ax.legend(ncol=2)
        return _save(fig, path)


def plot_rkhs_checks(checks, path):
    """Observed error of every check against its tolerance, on a log scale."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(7.0, 0.2 * len(checks) + 1.0))
        y = np.arange(len(checks))
        err = [max(abs(c["computed"] - c["reference"]) if c["computed"] is not None else 1.0,
                   1e-18) for c in checks]
        ax.barh(y, err, color=["C2" if c["pass"] else "C3" for c in checks], log=True)
        ax.set_yticks(y, [c["check"] for c in checks], fontsize=6)
        ax.invert_yaxis()
        ax.set_xlabel("|computed - reference|")
        return _save(fig, path)
