"""From-scratch classifiers over byte-histogram features."""

from .base_model import (
    DimensionMismatch,
    EmptyDataset,
    LearnerError,
    MalformedModel,
    Model,
    ModelKind,
    ModelSpecError,
    NonFinite,
    Prediction,
    UnknownClass,
    UnsupportedVersion,
    predict,
)
from .dataset import Dataset, select_columns
from .factory import ModelFactory, ModelSpec, parse_model_spec, train_model
from .forest import RandomForestModel, train_forest
from .knn import KNNModel, train_knn
from .logistic import LogisticRegressionModel, loss_and_gradient, train_logreg
from .naive_bayes import GaussianNBModel, train_gnb
from .serialization import load_model, load_model_file, save_model, save_model_file
from .tree import DecisionTreeModel, RandomTreeModel, train_random_tree, train_tree

__all__ = [
    "Dataset",
    "DecisionTreeModel",
    "DimensionMismatch",
    "EmptyDataset",
    "GaussianNBModel",
    "KNNModel",
    "LearnerError",
    "LogisticRegressionModel",
    "MalformedModel",
    "Model",
    "ModelFactory",
    "ModelKind",
    "ModelSpec",
    "ModelSpecError",
    "NonFinite",
    "Prediction",
    "RandomForestModel",
    "RandomTreeModel",
    "UnknownClass",
    "UnsupportedVersion",
    "load_model",
    "load_model_file",
    "loss_and_gradient",
    "parse_model_spec",
    "predict",
    "save_model",
    "save_model_file",
    "select_columns",
    "train_forest",
    "train_gnb",
    "train_knn",
    "train_logreg",
    "train_model",
    "train_random_tree",
    "train_tree",
]
