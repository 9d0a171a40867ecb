"""
Model factory: spec strings to trainers, serialized kinds to model classes.

Spec strings look like ``knn:k=3``, ``tree:min_leaf=2``, ``forest:trees=100``,
``rtree``, ``gnb`` or ``logreg:l2=1e-4,epochs=500,learn_rate=0.5``. Omitted
values come from :class:`LearnerDefaults`.
"""

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional, Type

from ..core.config_models import LearnerDefaults
from .base_model import Model, ModelKind, ModelSpecError
from .dataset import Dataset
from .forest import RandomForestModel, train_forest
from .knn import KNNModel, train_knn
from .logistic import LogisticRegressionModel, train_logreg
from .naive_bayes import GaussianNBModel, train_gnb
from .tree import DecisionTreeModel, RandomTreeModel, train_random_tree, train_tree


def _parse_bool(text: str) -> bool:
    lowered = text.lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


# Accepted parameters per kind with their parsers.
_PARAMETERS: Dict[ModelKind, Dict[str, Callable[[str], Any]]] = {
    ModelKind.KNN: {"k": int},
    ModelKind.GNB: {},
    ModelKind.TREE: {"min_leaf": int},
    ModelKind.RANDOM_TREE: {"min_leaf": int, "max_features": int},
    ModelKind.FOREST: {"trees": int, "min_leaf": int, "bootstrap": _parse_bool},
    ModelKind.LOGREG: {"l2": float, "epochs": int, "learn_rate": float},
}


@dataclass(frozen=True)
class ModelSpec:
    """Parsed model spec string."""
    kind: ModelKind
    params: Dict[str, Any] = field(default_factory=dict)
    text: str = ""

    def __str__(self) -> str:
        return self.text or self.kind.value


def parse_model_spec(spec: str) -> ModelSpec:
    """
    Parse ``kind[:name=value,...]``.

    Raises:
        ModelSpecError: On an unknown kind, unknown parameter or unparsable value
    """
    text = spec.strip()
    kind_text, _, rest = text.partition(":")
    try:
        kind = ModelKind(kind_text.strip().lower())
    except ValueError:
        known = ", ".join(k.value for k in ModelKind)
        raise ModelSpecError(f"Unknown model kind {kind_text!r} (expected one of {known})") from None

    accepted = _PARAMETERS[kind]
    params: Dict[str, Any] = {}
    for item in filter(None, (part.strip() for part in rest.split(","))):
        name, sep, value = item.partition("=")
        name = name.strip()
        if not sep or name not in accepted:
            raise ModelSpecError(f"Unknown parameter {item!r} for {kind.value}")
        if name in params:
            raise ModelSpecError(f"Parameter {name!r} given twice in {text!r}")
        try:
            params[name] = accepted[name](value.strip())
        except ValueError:
            raise ModelSpecError(f"Bad value {value!r} for {kind.value} parameter {name!r}") from None
    return ModelSpec(kind=kind, params=params, text=text)


class ModelFactory:
    """Maps model kinds to their classes and trainers."""

    _model_map: Dict[ModelKind, Type[Model]] = {
        ModelKind.KNN: KNNModel,
        ModelKind.GNB: GaussianNBModel,
        ModelKind.TREE: DecisionTreeModel,
        ModelKind.RANDOM_TREE: RandomTreeModel,
        ModelKind.FOREST: RandomForestModel,
        ModelKind.LOGREG: LogisticRegressionModel,
    }

    @classmethod
    def model_class(cls, kind: ModelKind) -> Type[Model]:
        return cls._model_map[ModelKind(kind)]

    @classmethod
    def supported_kinds(cls) -> list[ModelKind]:
        return list(cls._model_map.keys())

    @classmethod
    def train(
        cls,
        data: Dataset,
        spec: "ModelSpec | str",
        seed: int = 42,
        defaults: Optional[LearnerDefaults] = None,
        jobs: int = 1,
    ) -> Model:
        """
        Train the model described by ``spec``.

        Raises:
            ModelSpecError: If the spec is invalid or a value is out of range
            EmptyDataset: If the dataset has no rows
        """
        if isinstance(spec, str):
            spec = parse_model_spec(spec)
        d = defaults or LearnerDefaults()
        p = spec.params

        if spec.kind is ModelKind.KNN:
            return train_knn(data, k=p.get("k", d.knn_k))
        if spec.kind is ModelKind.GNB:
            return train_gnb(data)
        if spec.kind is ModelKind.TREE:
            return train_tree(data, min_leaf=p.get("min_leaf", d.tree_min_leaf))
        if spec.kind is ModelKind.RANDOM_TREE:
            return train_random_tree(data, min_leaf=p.get("min_leaf", d.random_tree_min_leaf),
                                     seed=seed, max_features=p.get("max_features"))
        if spec.kind is ModelKind.FOREST:
            return train_forest(data, trees=p.get("trees", d.forest_trees), seed=seed,
                                bootstrap=p.get("bootstrap", True), min_leaf=p.get("min_leaf", 1),
                                jobs=jobs)
        return train_logreg(data, l2=p.get("l2", d.logreg_l2), epochs=p.get("epochs", d.logreg_epochs),
                            learn_rate=p.get("learn_rate", d.logreg_learn_rate))


def train_model(
    data: Dataset,
    spec: "ModelSpec | str",
    seed: int = 42,
    defaults: Optional[LearnerDefaults] = None,
    jobs: int = 1,
) -> Model:
    """Convenience wrapper around :meth:`ModelFactory.train`."""
    return ModelFactory.train(data, spec, seed=seed, defaults=defaults, jobs=jobs)
