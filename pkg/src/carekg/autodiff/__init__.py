from .tensor import (
    Tensor, parameter, constant, backward,
    matmul, add, sub, mul, scale, tanh, prelu, relu,
    softmax_cross_entropy, softmax, l1_norm, gather_rows, scatter_add_rows,
    mean, rowdot, concat_rows, rel_aggregate, StackedAdjacency, check_finite,
)
from .adam import AdamState, adam_step

__all__ = [
    "Tensor", "parameter", "constant", "backward",
    "matmul", "add", "sub", "mul", "scale", "tanh", "prelu", "relu",
    "softmax_cross_entropy", "softmax", "l1_norm", "gather_rows", "scatter_add_rows",
    "mean", "rowdot", "concat_rows", "rel_aggregate", "StackedAdjacency", "check_finite",
    "AdamState", "adam_step",
]
