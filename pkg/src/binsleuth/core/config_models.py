"""Configuration data models for binsleuth."""

from enum import Enum
from typing import List

from pydantic import BaseModel, Field, field_validator


class LogLevel(str, Enum):
    """Supported root logger levels."""
    DEBUG = "DEBUG"
    INFO = "INFO"
    WARNING = "WARNING"
    ERROR = "ERROR"


class LoggingConfig(BaseModel):
    """Logging settings applied once by the CLI."""
    level: LogLevel = Field(default=LogLevel.WARNING, description="Root logger level")
    format: str = Field(
        default="%(levelname)s %(name)s: %(message)s",
        description="logging.basicConfig format string"
    )

    model_config = {"extra": "forbid"}

    @field_validator('level', mode='before')
    @classmethod
    def normalize_level(cls, v):
        return v.upper() if isinstance(v, str) else v


class LearnerDefaults(BaseModel):
    """Hyperparameter defaults used when a model spec omits a value."""
    knn_k: int = Field(default=1, ge=1, description="Neighbours for k-NN")
    tree_min_leaf: int = Field(default=2, ge=1, description="Minimum instances per tree leaf")
    forest_trees: int = Field(default=100, ge=1, description="Trees per random forest")
    random_tree_min_leaf: int = Field(default=1, ge=1, description="Minimum instances per random-tree leaf")
    logreg_l2: float = Field(default=1e-4, ge=0.0, description="L2 penalty for logistic regression")
    logreg_learn_rate: float = Field(default=0.5, gt=0.0, description="Gradient descent step size")
    logreg_epochs: int = Field(default=500, ge=1, description="Full-batch gradient descent epochs")

    model_config = {"extra": "forbid"}


class EvaluationConfig(BaseModel):
    """Cross-validation and size-sweep defaults."""
    folds: int = Field(default=10, ge=2, description="Stratified cross-validation folds")
    sweep_sizes: List[int] = Field(
        default_factory=lambda: [4 ** i for i in range(1, 11)],
        description="Fragment sizes for the size sweep, 4 bytes to 1 MiB"
    )
    sweep_models: List[str] = Field(
        default_factory=lambda: ["knn:k=1", "knn:k=3", "gnb", "tree", "forest", "logreg"],
        description="Model specs evaluated by the size sweep"
    )

    model_config = {"extra": "forbid"}

    @field_validator('sweep_sizes')
    @classmethod
    def validate_sizes(cls, v):
        if not v:
            raise ValueError("sweep_sizes must not be empty")
        if any(size < 4 for size in v):
            raise ValueError("every sweep size must be at least 4 bytes")
        return sorted(set(v))


class SynthConfig(BaseModel):
    """Synthetic corpus defaults."""
    files_per_spec: int = Field(default=200, ge=1, description="Files generated per synthetic ISA")
    bytes_per_file: int = Field(default=32768, ge=8, description="Bytes per generated file")

    model_config = {"extra": "forbid"}


class AppConfig(BaseModel):
    """Main application configuration."""
    seed: int = Field(default=42, ge=0, lt=2 ** 64, description="Master seed for every random stream")
    jobs: int = Field(default=1, ge=1, description="Worker threads for featurization, folds and forests")
    logging: LoggingConfig = Field(default_factory=LoggingConfig)
    learners: LearnerDefaults = Field(default_factory=LearnerDefaults)
    evaluation: EvaluationConfig = Field(default_factory=EvaluationConfig)
    synth: SynthConfig = Field(default_factory=SynthConfig)

    config_version: str = Field(default="1.0", description="Configuration schema version")

    model_config = {"extra": "forbid"}
