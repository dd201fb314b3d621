"""Seeded synthetic datasets and their CSV form.

Every generator is a pure function of ``(count, seed, options)``; the
``generator_tag`` records those so a dataset can be rebuilt bit for bit.
"""

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Dataset",
    "blobs",
    "gen_test_function_1",
    "gen_test_function_2",
    "moons",
    "multiclass_blobs",
    "regenerate",
    "sample_grid",
    "train_test_split",
]

POLE_TOL = 1e-3


@dataclass(frozen=True)
class Dataset:
    inputs: np.ndarray
    targets: np.ndarray
    seed: int
    generator_tag: str

    def __post_init__(self):
        x = np.asarray(self.inputs, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        y = np.asarray(self.targets)
        if x.shape[0] != y.shape[0] or x.shape[0] < 1:
            raise ValueError("inputs and targets must have the same nonzero length")
        object.__setattr__(self, "inputs", x)
        object.__setattr__(self, "targets", y)

    def __len__(self):
        return self.inputs.shape[0]

    @property
    def dim(self):
        return self.inputs.shape[1]

    def subset(self, idx):
        return Dataset(self.inputs[idx], self.targets[idx], self.seed, self.generator_tag)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([f"x_{i}" for i in range(self.dim)] + ["y"])
        for x, y in zip(self.inputs, self.targets):
            w.writerow([repr(float(v)) for v in x] + [repr(y.item())])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text, seed=0, generator_tag="csv"):
        rows = list(csv.reader(io.StringIO(text)))
        header, body = rows[0], [r for r in rows[1:] if r]
        if header[-1] != "y" or any(h != f"x_{i}" for i, h in enumerate(header[:-1])):
            raise ValueError(f"unexpected dataset header {header!r}")
        x = np.array([[float(v) for v in r[:-1]] for r in body])
        raw = [r[-1] for r in body]
        try:
            y = np.array([int(v) for v in raw])
        except ValueError:
            y = np.array([float(v) for v in raw])
        return cls(x, y, seed, generator_tag)


# --------------------------------------------------------------------------
# Regression test functions
# --------------------------------------------------------------------------

def sample_grid(count, scaling="unit"):
    """Sample locations ``x_n``, n = 0..count-1.

    ``"unit"`` spreads them over [0, 1] (``x_n = n/(count-1)``);
    ``"integer"`` uses ``x_n = n``.  Points within ``POLE_TOL`` of a pole
    of ``tan`` are nudged right by ``POLE_TOL``.
    """
    if count < 2:
        raise ValueError("count must be >= 2")
    n = np.arange(count, dtype=float)
    if scaling == "unit":
        x = n / (count - 1)
    elif scaling == "integer":
        x = n.copy()
    else:
        raise ValueError(f"unknown grid scaling {scaling!r}")
    near_pole = np.abs(np.cos(x)) < POLE_TOL
    x[near_pole] += POLE_TOL
    return x


def _test_function_1(x, theta):
    return np.exp((1.0 - 9.0 * x * x) / 4.0) + np.tan(x) + x ** (1.0 / 6.0) + np.sin(x ** theta)


def _test_function_2(x, theta):
    return np.exp(np.sin(x) - np.sin(x * x)) + math.sqrt(2.0 * math.pi) * np.abs(x + np.cos(theta))


def _theta(count, seed):
    return np.random.default_rng(seed).uniform(0.0, 1.0, count)


def gen_test_function_1(count=101, seed=0, scaling="unit"):
    """``exp((1-9x^2)/4) + tan x + x^(1/6) + sin(x^theta_n)``, theta_n ~ U(0, 1)."""
    x = sample_grid(count, scaling)
    y = _test_function_1(x, _theta(count, seed))
    return Dataset(x, y, seed, f"test_function_1:count={count},scaling={scaling}")


def gen_test_function_2(count=101, seed=0, scaling="unit"):
    """``exp(sin x - sin x^2) + sqrt(2 pi) |x + cos theta_n|``, theta_n ~ U(0, 1)."""
    x = sample_grid(count, scaling)
    y = _test_function_2(x, _theta(count, seed))
    return Dataset(x, y, seed, f"test_function_2:count={count},scaling={scaling}")


# --------------------------------------------------------------------------
# Classification sets
# --------------------------------------------------------------------------

def blobs(count=100, seed=0, separation=3.0, spread=1.0, dim=2):
    """Two Gaussian blobs with labels -1/+1 at ``+-separation/2`` on the first axis."""
    rng = np.random.default_rng(seed)
    y = np.where(np.arange(count) % 2 == 0, -1, 1)
    centers = np.zeros((count, dim))
    centers[:, 0] = y * separation / 2.0
    x = centers + spread * rng.standard_normal((count, dim))
    return Dataset(x, y, seed, f"blobs:count={count},separation={separation},spread={spread},dim={dim}")


def moons(count=100, seed=0, noise=0.15):
    """Two interleaved half circles, labels -1/+1."""
    rng = np.random.default_rng(seed)
    y = np.where(np.arange(count) % 2 == 0, -1, 1)
    t = rng.uniform(0.0, math.pi, count)
    x = np.where(y[:, None] < 0,
                 np.column_stack([np.cos(t), np.sin(t)]),
                 np.column_stack([1.0 - np.cos(t), 0.5 - np.sin(t)]))
    x = x + noise * rng.standard_normal((count, 2))
    return Dataset(x, y, seed, f"moons:count={count},noise={noise}")


def multiclass_blobs(count=300, seed=0, classes=3, radius=2.0, spread=0.8, dim=2):
    """``classes`` Gaussian blobs on a circle, labels ``0..classes-1``."""
    rng = np.random.default_rng(seed)
    y = np.arange(count) % classes
    ang = 2.0 * math.pi * y / classes
    centers = np.zeros((count, dim))
    centers[:, 0] = radius * np.cos(ang)
    centers[:, 1] = radius * np.sin(ang)
    x = centers + spread * rng.standard_normal((count, dim))
    return Dataset(x, y, seed,
                   f"multiclass_blobs:count={count},classes={classes},radius={radius},spread={spread},dim={dim}")


_GENERATORS = {
    "test_function_1": gen_test_function_1,
    "test_function_2": gen_test_function_2,
    "blobs": blobs,
    "moons": moons,
    "multiclass_blobs": multiclass_blobs,
}


def regenerate(generator_tag, seed):
    """Rebuild a dataset from its tag and seed."""
    name, _, body = generator_tag.partition(":")
    kwargs = {}
    for item in filter(None, body.split(",")):
        k, _, v = item.partition("=")
        try:
            kwargs[k] = int(v)
        except ValueError:
            try:
                kwargs[k] = float(v)
            except ValueError:
                kwargs[k] = v
    return _GENERATORS[name](seed=seed, **kwargs)


def train_test_split(data, test_fraction=0.25, seed=0):
    """Seeded permutation split; returns ``(train, test)``."""
    n = len(data)
    perm = np.random.default_rng(seed).permutation(n)
    n_test = max(1, int(round(test_fraction * n)))
    return data.subset(np.sort(perm[n_test:])), data.subset(np.sort(perm[:n_test]))
