"""Small dense networks with a softmax head, trained by momentum SGD.

Hidden layers use either the learnable GGRBF activation (one ``alpha``
and ``beta`` per unit, initialized Uniform(0, 1) and kept above
``eps``) or the leaky rectifier.  Back-propagation is written out by hand.
"""

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .activations import alpha_relu, alpha_relu_grad, ggrbf_activation, ggrbf_activation_grads

__all__ = [
    "MlpDivergenceError",
    "MlpModel",
    "MlpSpec",
    "TrainConfig",
    "accuracy",
    "init_mlp",
    "loss_and_grads",
    "mlp_train",
    "predict",
]

ACTIVATIONS = ("ggrbf", "alpha_relu")


class MlpDivergenceError(FloatingPointError):
    """Training loss became non-finite."""


@dataclass(frozen=True)
class MlpSpec:
    """Layer widths from input to output, plus the hidden activation."""

    sizes: tuple
    activation: str = "ggrbf"
    leak: float = 0.1

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        if len(self.sizes) < 2 or min(self.sizes) < 1:
            raise ValueError("need at least input and output sizes, all positive")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"activation must be one of {ACTIVATIONS}")


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 500
    learning_rate: float = 1e-2
    momentum: float = 0.9
    batch_size: int = 16
    eps: float = 1e-3
    stop_at_accuracy: Optional[float] = None


@dataclass
class MlpModel:
    spec: MlpSpec
    weights: list
    biases: list
    alphas: list = field(default_factory=list)
    betas: list = field(default_factory=list)
    seed: int = 0

    def parameters(self):
        """Flat list of parameter arrays in a fixed order."""
        return list(self.weights) + list(self.biases) + list(self.alphas) + list(self.betas)

    def copy(self):
        return replace(self, weights=[w.copy() for w in self.weights],
                       biases=[b.copy() for b in self.biases],
                       alphas=[a.copy() for a in self.alphas],
                       betas=[b.copy() for b in self.betas])


def init_mlp(spec, seed=0):
    rng = np.random.default_rng(seed)
    weights, biases, alphas, betas = [], [], [], []
    for k, (m, n) in enumerate(zip(spec.sizes[:-1], spec.sizes[1:])):
        weights.append(rng.standard_normal((m, n)) * np.sqrt(2.0 / (m + n)))
        biases.append(np.zeros(n))
        hidden = k < len(spec.sizes) - 2
        if hidden and spec.activation == "ggrbf":
            alphas.append(rng.uniform(0.0, 1.0, n))
            betas.append(rng.uniform(0.0, 1.0, n))
    model = MlpModel(spec, weights, biases, alphas, betas, seed)
    _clamp(model, TrainConfig().eps)
    return model


def _clamp(model, eps):
    for a in model.alphas:
        np.maximum(a, eps, out=a)
    for b in model.betas:
        np.maximum(b, eps, out=b)


def _forward(model, X):
    acts = [X]
    pre = []
    h = X
    last = len(model.weights) - 1
    for k, (W, b) in enumerate(zip(model.weights, model.biases)):
        z = h @ W + b
        pre.append(z)
        if k == last:
            h = z
        elif model.spec.activation == "ggrbf":
            h = ggrbf_activation(z, model.alphas[k], model.betas[k])
        else:
            h = alpha_relu(z, model.spec.leak)
        acts.append(h)
    return pre, acts


def predict(model, X):
    _, acts = _forward(model, np.atleast_2d(np.asarray(X, dtype=float)))
    return np.argmax(acts[-1], axis=1)


def accuracy(model, data):
    return float(np.mean(predict(model, data.inputs) == data.targets))


def loss_and_grads(model, X, labels):
    """Mean softmax cross-entropy and its gradient for every parameter array.

    Gradients come back in the order of :meth:`MlpModel.parameters`.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    labels = np.asarray(labels, dtype=int)
    n = X.shape[0]
    pre, acts = _forward(model, X)
    logits = acts[-1]
    shifted = logits - logits.max(axis=1, keepdims=True)
    logp = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    loss = -float(np.mean(logp[np.arange(n), labels]))
    delta = np.exp(logp)
    delta[np.arange(n), labels] -= 1.0
    delta /= n
    L = len(model.weights)
    gW, gb = [None] * L, [None] * L
    ga, gbeta = [None] * len(model.alphas), [None] * len(model.betas)
    for k in range(L - 1, -1, -1):
        gW[k] = acts[k].T @ delta
        gb[k] = delta.sum(axis=0)
        if k == 0:
            break
        dh = delta @ model.weights[k].T
        z = pre[k - 1]
        if model.spec.activation == "ggrbf":
            dz, da, db = ggrbf_activation_grads(z, model.alphas[k - 1], model.betas[k - 1])
            ga[k - 1] = np.sum(dh * da, axis=0)
            gbeta[k - 1] = np.sum(dh * db, axis=0)
            delta = dh * dz
        else:
            delta = dh * alpha_relu_grad(z, model.spec.leak)
    return loss, gW + gb + ga + gbeta


def mlp_train(spec, data, config=TrainConfig(), seed=0):
    """Train a fresh network on ``data`` (integer class labels).

    Returns ``(model, trace)`` where ``trace`` holds the per-epoch mean
    loss and training accuracy.  Everything is driven by ``seed``.
    """
    labels = np.asarray(data.targets, dtype=int)
    if spec.sizes[0] != data.dim:
        raise ValueError(f"input width {spec.sizes[0]} does not match data dimension {data.dim}")
    if labels.min() < 0 or labels.max() >= spec.sizes[-1]:
        raise ValueError("labels must lie in 0..output_size-1")
    model = init_mlp(spec, seed)
    _clamp(model, config.eps)
    rng = np.random.default_rng(seed + 1)
    params = model.parameters()
    velocity = [np.zeros_like(p) for p in params]
    trace = {"loss": [], "train_accuracy": []}
    n = len(data)
    for epoch in range(config.epochs):
        order = rng.permutation(n)
        losses = []
        for start in range(0, n, config.batch_size):
            idx = order[start:start + config.batch_size]
            loss, grads = loss_and_grads(model, data.inputs[idx], labels[idx])
            if not np.isfinite(loss):
                raise MlpDivergenceError(f"non-finite loss at epoch {epoch}, batch starting {start}")
            for p, v, g in zip(params, velocity, grads):
                v *= config.momentum
                v -= config.learning_rate * g
                p += v
            _clamp(model, config.eps)
            losses.append(loss * len(idx))
        trace["loss"].append(float(np.sum(losses) / n))
        trace["train_accuracy"].append(accuracy(model, data))
        if config.stop_at_accuracy is not None and trace["train_accuracy"][-1] >= config.stop_at_accuracy:
            break
    return model, trace
