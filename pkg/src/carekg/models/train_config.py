"""Shared training hyperparameters for the embedding models."""

from dataclasses import dataclass

from ..errors import ConfigurationError


@dataclass
class TrainConfig:
    """Knobs for TransE and RDF2Vec training.

    The walk parameters only matter for RDF2Vec; margin and
    transe_negatives only matter for TransE. Keeping one config class
    makes experiment specs simpler to write.
    """

    epochs: int = 30
    seed: int = 0
    dim: int = 100
    batch_size: int = 4096
    margin: float = 1.0
    transe_negatives: int = 1
    cbow_negatives: int = 5
    window: int = 1
    walks: int = 10
    depth: int = 3
    max_windows: int = 1_500_000
    lr: float = 1e-3

    def validate(self):
        for field in ("epochs", "dim", "batch_size", "transe_negatives",
                      "cbow_negatives", "window", "walks", "depth", "max_windows"):
            v = getattr(self, field)
            if not isinstance(v, int) or v <= 0:
                raise ConfigurationError(f"TrainConfig.{field} must be a positive integer, got {v!r}")
        if self.margin <= 0:
            raise ConfigurationError(f"TrainConfig.margin must be positive, got {self.margin!r}")
        if self.lr <= 0:
            raise ConfigurationError(f"TrainConfig.lr must be positive, got {self.lr!r}")
        return self
