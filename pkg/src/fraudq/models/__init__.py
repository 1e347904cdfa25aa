"""Classical baselines, the kernel-SVM dual solver, and the shared
artifact + prediction interface every model family implements."""

from .base import TrainedModel, load_model, predict, save_model, sigmoid
from .linear import LogisticRegressionModel
from .tree import DecisionTreeModel
from .forest import RandomForestModel
from .boosting import GradientBoostedModel
from .svm import KernelSvmModel, smo_solve

# the quantum families live under fraudq.quantum but register here so that
# load_model can resolve every artifact kind after a plain models import
from ..quantum.qsvm import QsvmModel
from ..quantum.vqc import VqcModel
from ..quantum.hqnn import HqnnModel

__all__ = [
    "TrainedModel",
    "load_model",
    "predict",
    "save_model",
    "sigmoid",
    "LogisticRegressionModel",
    "DecisionTreeModel",
    "RandomForestModel",
    "GradientBoostedModel",
    "KernelSvmModel",
    "smo_solve",
    "QsvmModel",
    "VqcModel",
    "HqnnModel",
]
