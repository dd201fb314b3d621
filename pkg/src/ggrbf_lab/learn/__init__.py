"""Learning harnesses: kernel ridge regression, SMO SVM and small MLPs."""

from .activations import alpha_relu, alpha_relu_grad, ggrbf_activation, ggrbf_activation_grads
from .data import (Dataset, blobs, gen_test_function_1, gen_test_function_2, moons,
                   multiclass_blobs, train_test_split)
from .krr import KrrFactorizationError, KrrModel, krr_fit, krr_predict
from .mlp import MlpDivergenceError, MlpModel, MlpSpec, TrainConfig, mlp_train
from .reports import nn_report, regression_report, svm_report
from .svm import SvmModel, kkt_violations, smo_fit

__all__ = [
    "Dataset",
    "KrrFactorizationError",
    "KrrModel",
    "MlpDivergenceError",
    "MlpModel",
    "MlpSpec",
    "SvmModel",
    "TrainConfig",
    "alpha_relu",
    "alpha_relu_grad",
    "blobs",
    "gen_test_function_1",
    "gen_test_function_2",
    "ggrbf_activation",
    "ggrbf_activation_grads",
    "kkt_violations",
    "krr_fit",
    "krr_predict",
    "mlp_train",
    "moons",
    "multiclass_blobs",
    "nn_report",
    "regression_report",
    "smo_fit",
    "svm_report",
    "train_test_split",
]
