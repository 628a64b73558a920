from .tabular import TabularMatrix, encode_tabular
from .logreg import train_logreg
from .forest import train_rf
from .nn import train_nn

__all__ = ["TabularMatrix", "encode_tabular", "train_logreg", "train_rf", "train_nn"]
