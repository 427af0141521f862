"""Periodic physics-informed network baseline for the torus diffusion-reaction
problem, trained on the solver package's shared point dumps."""

__version__ = "0.1.0"

from .data import read_eval_dump, read_meta, read_sample_dump  # noqa: F401
from .loss import operator_values, residual_loss  # noqa: F401
from .model import FrozenFourierFeatures, PeriodicNetConfig, build_model  # noqa: F401
from .problem import ExactTorchSolution, TorusProblem, load_problem  # noqa: F401
from .train import evaluate_model, train_and_evaluate, write_result_row  # noqa: F401
