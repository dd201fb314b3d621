import json
import math

import numpy as np
import pytest

from ggrbf_lab.kernels import KernelParams, ggrbf, parse_kernel
from ggrbf_lab.learn.activations import (
    alpha_relu,
    alpha_relu_grad,
    ggrbf_activation,
    ggrbf_activation_grads,
)
from ggrbf_lab.learn.data import (
    Dataset,
    blobs,
    gen_test_function_1,
    gen_test_function_2,
    multiclass_blobs,
    regenerate,
    sample_grid,
    train_test_split,
)
from ggrbf_lab.learn.krr import KrrFactorizationError, krr_fit, krr_predict
from ggrbf_lab.learn.mlp import (
    MlpDivergenceError,
    MlpSpec,
    TrainConfig,
    accuracy,
    init_mlp,
    loss_and_grads,
    mlp_train,
)
from ggrbf_lab.learn.reports import (
    REFERENCE,
    default_nn_specs,
    default_regression_grid,
    nn_report,
    regression_report,
    svm_report,
)
from ggrbf_lab.learn.svm import SmoConvergenceWarning, kkt_violations, smo_fit


def _pm_to_index(data):
    return Dataset(data.inputs, (data.targets > 0).astype(int), data.seed, data.generator_tag)


# -- data -------------------------------------------------------------------

def test_test_function_1():
    a = gen_test_function_1(101, seed=3)
    b = gen_test_function_1(101, seed=3)
    assert len(a) == 101
    assert np.array_equal(a.targets, b.targets)
    assert a.targets[0] == pytest.approx(math.exp(0.25), rel=1e-15)
    assert not np.array_equal(a.targets, gen_test_function_1(101, seed=4).targets)


def test_test_function_2():
    a = gen_test_function_2(101, seed=5)
    theta0 = np.random.default_rng(5).uniform(0, 1, 101)[0]
    assert a.targets[0] == pytest.approx(1 + math.sqrt(2 * math.pi) * math.cos(theta0), rel=1e-15)
    assert np.array_equal(a.targets, gen_test_function_2(101, seed=5).targets)


def test_grid_pole_nudge():
    x = sample_grid(12, "integer")
    assert np.all(np.abs(np.cos(x)) >= 1e-3 - 1e-15)
    with pytest.raises(ValueError):
        sample_grid(1)
    with pytest.raises(ValueError):
        sample_grid(5, "log")


def test_regenerate_bit_identical():
    for d in (gen_test_function_1(20, 2), blobs(30, 4), multiclass_blobs(30, 1)):
        r = regenerate(d.generator_tag, d.seed)
        assert np.array_equal(r.inputs, d.inputs) and np.array_equal(r.targets, d.targets)


def test_dataset_csv_round_trip():
    d = blobs(10, 2)
    back = Dataset.from_csv(d.to_csv(), d.seed, d.generator_tag)
    assert np.array_equal(back.inputs, d.inputs) and np.array_equal(back.targets, d.targets)


def test_dataset_invariants():
    with pytest.raises(ValueError):
        Dataset(np.zeros((3, 1)), np.zeros(2), 0, "x")
    with pytest.raises(ValueError):
        Dataset(np.zeros((0, 1)), np.zeros(0), 0, "x")


def test_split_disjoint():
    d = blobs(40, 0)
    tr, te = train_test_split(d, 0.25, 1)
    assert len(tr) == 30 and len(te) == 10
    rows = {tuple(r) for r in tr.inputs} | {tuple(r) for r in te.inputs}
    assert len(rows) == 40


# -- kernel ridge regression ---------------------------------------------------

def test_krr_interpolates():
    d = gen_test_function_1(21, 0)
    m = krr_fit(d, "grbf:sigma=20.0", 1e-12)
    assert np.max(np.abs(m.predict(d.inputs[:, 0]) - d.targets)) < 1e-6
    assert m.residual <= 1e-8 * np.linalg.norm(d.targets)


def test_krr_large_ridge():
    d = gen_test_function_2(21, 0)
    m = krr_fit(d, "ggrbf:sigma=2.0,sigma0=1.0", 1e14)
    assert np.max(np.abs(m.weights)) < 1e-12
    assert abs(m.predict(0.5)) < 1e-12


def test_krr_reduction_bit_identical():
    d = gen_test_function_1(31, 1)
    a = krr_fit(d, "grbf:sigma=3.0", 1e-6)
    b = krr_fit(d, "ggrbf:sigma=3.0,sigma0=0.0", 1e-6)
    assert np.array_equal(a.weights, b.weights)


def test_krr_factorization_error():
    x = np.array([[0.0], [0.0], [1.0]])
    d = Dataset(x, np.array([1.0, 2.0, 3.0]), 0, "dup")
    with pytest.raises(KrrFactorizationError, match="leading minor"):
        krr_fit(d, "grbf:sigma=1.0", 0.0)
    with pytest.raises(ValueError):
        krr_fit(d, "grbf:sigma=1.0", -1.0)


def test_krr_rejects_inaccurate_solve():
    # nearly singular Gram: Cholesky succeeds but the solve misses the targets
    d = gen_test_function_1(21, 0)
    with pytest.raises(KrrFactorizationError, match="residual"):
        krr_fit(d, "grbf:sigma=2.0", 1e-12)


def test_krr_predict_smooth_and_dimension():
    d = gen_test_function_2(21, 2)
    m = krr_fit(d, "grbf:sigma=2.0", 1e-4)
    x0 = 0.437
    steps = [abs(krr_predict(m, x0 + h) - krr_predict(m, x0)) for h in (1e-3, 1e-5, 1e-7)]
    assert steps[0] > steps[1] > steps[2] and steps[2] < 1e-5
    m2 = krr_fit(blobs(20, 0), "grbf:sigma=1.0", 1e-4)
    with pytest.raises(ValueError):
        krr_predict(m2, np.zeros((2, 3)))
    zero = type(m2)(m2.centers, np.zeros(20), m2.kernel, 0.0, 0.0)
    assert np.array_equal(zero.predict(np.ones((4, 2))), np.zeros(4))


def test_krr_training_loss_ridge_order():
    d = gen_test_function_1(21, 3)
    errs = [np.mean((krr_fit(d, "grbf:sigma=2.0", lam).predict(d.inputs[:, 0]) - d.targets) ** 2)
            for lam in (1e-6, 1e-4, 1e-1, 10.0)]
    assert all(a <= b + 1e-15 for a, b in zip(errs, errs[1:]))


# -- SMO --------------------------------------------------------------------------

def _svm_post(m, tol):
    assert np.all(m.alpha >= 0) and np.all(m.alpha <= m.C)
    assert abs(float(np.sum(m.alpha * m.labels))) <= 1e-8
    assert np.max(kkt_violations(m)) <= tol


def test_smo_two_points():
    d = Dataset(np.array([[-1.0, 0.0], [1.0, 0.0]]), np.array([-1, 1]), 0, "pair")
    m = smo_fit(d, "grbf:sigma=1.0", C=10.0)
    assert m.converged
    assert np.array_equal(m.predict(d.inputs), d.targets)
    assert m.alpha[0] == pytest.approx(m.alpha[1], rel=1e-12)
    _svm_post(m, 1e-3)


@pytest.mark.parametrize("kernel", ["grbf:sigma=1.0", "ggrbf:sigma=1.0,sigma0=0.5"])
@pytest.mark.parametrize("seed", range(3))
def test_smo_separable_blobs(kernel, seed):
    d = blobs(40, seed, separation=6.0, spread=0.6)
    m = smo_fit(d, kernel, C=10.0, tol=1e-4)
    assert m.converged
    assert np.mean(m.predict(d.inputs) == d.targets) == 1.0
    _svm_post(m, 1e-4)


def test_smo_sigmoid_and_budget():
    d = blobs(60, 1, separation=2.0)
    m = smo_fit(d, "sigmoid:gamma=0.1,coef0=0.0", C=1.0)
    _svm_post(m, 1e-3)
    with pytest.warns(SmoConvergenceWarning):
        short = smo_fit(d, "grbf:sigma=1.0", C=1.0, tol=1e-9, max_passes=0)
    assert not short.converged


def test_smo_errors():
    d = blobs(10, 0)
    with pytest.raises(ValueError):
        smo_fit(d, "grbf:sigma=1.0", C=0.0)
    one = Dataset(d.inputs, np.ones(10, dtype=int), 0, "one")
    with pytest.raises(ValueError):
        smo_fit(one, "grbf:sigma=1.0")


# -- activations -------------------------------------------------------------------

def test_activation_examples():
    assert ggrbf_activation(0.0, 0.3, 2.0) == 1.0
    assert ggrbf_activation(1.0, 1.0, 1.0) == pytest.approx(0.19551453415258811695, rel=1e-14)
    assert ggrbf_activation(40.0, 1.0, 1.0) == 0.0
    with pytest.raises(ValueError):
        ggrbf_activation(1.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        ggrbf_activation_grads(1.0, 1.0, 0.0)


def test_activation_is_kernel():
    x = np.linspace(-4, 4, 81)
    for a, b in ((1.0, 1.0), (0.4, 2.5), (3.0, 0.2)):
        k = ggrbf(x[:, None], np.zeros((1, 1)), KernelParams(1 / a, 1 / b))
        assert np.array_equal(ggrbf_activation(x, a, b), np.ravel(k))


def test_activation_grads():
    assert ggrbf_activation_grads(0.0, 0.7, 1.3) == (0.0, 0.0, 0.0)
    rng = np.random.default_rng(0)
    h = 1e-5
    for x, a, b in [(1.0, 1.0, 1.0)] + [tuple(rng.uniform(0.3, 2.0, 3)) for _ in range(20)]:
        dx, da, db = ggrbf_activation_grads(x, a, b)
        fd = [
            (ggrbf_activation(x + h, a, b) - ggrbf_activation(x - h, a, b)) / (2 * h),
            (ggrbf_activation(x, a + h, b) - ggrbf_activation(x, a - h, b)) / (2 * h),
            (ggrbf_activation(x, a, b + h) - ggrbf_activation(x, a, b - h)) / (2 * h),
        ]
        for g, f in zip((dx, da, db), fd):
            assert g == pytest.approx(f, rel=1e-5, abs=1e-12)
        assert da > 0


def test_alpha_relu():
    assert alpha_relu(2.0) == 2.0
    assert alpha_relu(-2.0, 0.1) == pytest.approx(-0.2)
    x = np.linspace(-3, 3, 13)
    assert np.array_equal(alpha_relu(x, 1.0), x)
    assert alpha_relu_grad(0.0, 0.25) == 0.25
    assert alpha_relu_grad(1.0) == 1.0


# -- MLP -------------------------------------------------------------------------

def _flat(arrays):
    return np.concatenate([np.ravel(a) for a in arrays])


@pytest.mark.parametrize("activation", ["ggrbf", "alpha_relu"])
def test_mlp_gradient_check(activation):
    spec = MlpSpec((2, 3, 2), activation)
    rng = np.random.default_rng(11)
    h = 1e-6
    worst = 0.0
    for draw in range(100):
        model = init_mlp(spec, draw)
        X = rng.normal(size=(5, 2))
        y = rng.integers(0, 2, 5)
        _, grads = loss_and_grads(model, X, y)
        fd = []
        for p in model.parameters():
            g = np.zeros_like(p)
            for idx in np.ndindex(p.shape):
                old = p[idx]
                p[idx] = old + h
                lp, _ = loss_and_grads(model, X, y)
                p[idx] = old - h
                lm, _ = loss_and_grads(model, X, y)
                p[idx] = old
                g[idx] = (lp - lm) / (2 * h)
            fd.append(g)
        a, f = _flat(grads), _flat(fd)
        worst = max(worst, np.linalg.norm(a - f) / max(np.linalg.norm(f), 1e-8))
    assert worst <= 1e-4


def test_mlp_parameter_shapes():
    spec = MlpSpec((2, 5, 4, 3), "ggrbf")
    m = init_mlp(spec, 0)
    assert [w.shape for w in m.weights] == [(2, 5), (5, 4), (4, 3)]
    assert [a.shape for a in m.alphas] == [(5,), (4,)]
    assert all(np.all(a >= 1e-3) for a in m.alphas + m.betas)
    relu = init_mlp(MlpSpec((2, 5, 3), "alpha_relu"), 0)
    assert relu.alphas == [] and relu.betas == []


def test_mlp_one_point_loss_vanishes():
    d = Dataset(np.array([[0.5, -1.0]]), np.array([1]), 0, "one")
    _, trace = mlp_train(MlpSpec((2, 2)), d, TrainConfig(epochs=300, learning_rate=0.5, batch_size=1))
    assert trace["loss"][-1] < 1e-3
    assert trace["loss"][-1] < trace["loss"][0]


@pytest.mark.parametrize("activation", ["ggrbf", "alpha_relu"])
def test_mlp_separable_blobs(activation):
    spec = MlpSpec((2, 16, 16, 2), activation)
    for seed in range(5):
        d = _pm_to_index(blobs(100, seed, separation=6.0, spread=0.8))
        model, trace = mlp_train(spec, d, TrainConfig(epochs=500, stop_at_accuracy=0.95), seed)
        assert len(trace["loss"]) <= 500
        assert accuracy(model, d) >= 0.95


def test_mlp_deterministic():
    d = _pm_to_index(blobs(40, 1))
    spec = MlpSpec((2, 4, 2))
    _, t1 = mlp_train(spec, d, TrainConfig(epochs=5), 3)
    _, t2 = mlp_train(spec, d, TrainConfig(epochs=5), 3)
    assert t1 == t2


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_mlp_divergence():
    d = _pm_to_index(blobs(40, 1))
    with pytest.raises(MlpDivergenceError, match="non-finite loss"):
        mlp_train(MlpSpec((2, 8, 8, 2), "alpha_relu"), d, TrainConfig(epochs=50, learning_rate=1e6), 0)


def test_mlp_spec_errors():
    with pytest.raises(ValueError):
        MlpSpec((2,))
    with pytest.raises(ValueError):
        MlpSpec((2, 2), "tanh")
    with pytest.raises(ValueError):
        mlp_train(MlpSpec((3, 2)), _pm_to_index(blobs(10, 0)))


# -- reports ---------------------------------------------------------------------

def test_regression_report_single():
    d = gen_test_function_1(41, 0)
    rep = regression_report(d, [("grbf:sigma=2.0", 1e-4)], function_id=1)
    assert len(rep["configs"]) == 1
    assert rep["rows"][0]["min_error"] == rep["configs"][0]["error"]
    assert rep["rows"][0]["reference_value"] == REFERENCE["regression"][1]["GRBF"]
    with pytest.raises(ValueError):
        regression_report(d, [])


def test_regression_superset():
    d = gen_test_function_2(61, 1)
    grid = default_regression_grid(sigmas=(2.0, 5.0), sigma0s=(0.0, 2.0), ridges=(1e-6, 1e-2))
    rep = regression_report(d, grid, function_id=2)
    best = {r["method"]: r["min_error"] for r in rep["rows"]}
    assert best["GGRBF"] <= best["GRBF"]
    assert json.loads(json.dumps(rep)) == rep


def test_svm_report():
    rep = svm_report(["grbf:sigma=1.0", "ggrbf:sigma=1.0,sigma0=0.0", "ggrbf:sigma=1.0,sigma0=1.0",
                      "sigmoid:gamma=0.1,coef0=0.0"], seeds=(0, 1, 2, 3, 4))
    best = {r["method"]: r["misclass_pct"] for r in rep["rows"]}
    assert best["GGRBF"] <= best["GRBF"]
    assert {r["reference_value"] for r in rep["rows"]} == {5.75, 4.5, 3.75}
    assert all(c["converged"] for c in rep["configs"])
    single = svm_report(["grbf:sigma=1.0"], seeds=(0,))
    assert len(single["rows"]) == 1


def test_nn_report_deterministic():
    specs = default_nn_specs(width=6, depth=3)
    cfg = TrainConfig(epochs=3)
    a = nn_report(specs, seeds=(0, 1, 2), config=cfg, count=60)
    b = nn_report(specs, seeds=(0, 1, 2), config=cfg, count=60)
    assert a == b
    assert json.loads(json.dumps(a)) == a
    refs = {r["method"]: r["reference_value"] for r in a["rows"]}
    assert refs["ggrbf"] == 97.74 and refs["alpha_relu"] == 94.76
    assert refs["dcnn-ggrbf"] == 96.33 and refs["dcnn-alpha_relu"] == 91.87
    with pytest.raises(ValueError):
        nn_report(specs, seeds=(0, 1))


def test_parse_kernel_roundtrip():
    tag = parse_kernel("ggrbf:sigma=1.0,sigma0=0.5").tag
    assert parse_kernel(tag).tag == tag
