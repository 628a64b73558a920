"""Feed-forward classifier: tanh hidden layers, softmax output.

Doubles as the classification head for frozen patient embeddings. When a
validation set is supplied, the parameters from the epoch with the best
validation macro-F1 are kept, mirroring the graph model's selection rule.
"""

import numpy as np

from ..autodiff import (parameter, constant, backward, AdamState, adam_step,
                        matmul, add, tanh, softmax, softmax_cross_entropy)
from ..errors import UsageError
from ..evalharness.metrics import f1_scores


class NNModel:
    def __init__(self, weights, biases):
        self.weights = weights
        self.biases = biases

    def predict_proba(self, X):
        h = np.asarray(X, dtype=np.float64)
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            h = h @ w + b
            if i != last:
                h = np.tanh(h)
        return softmax(h)

    def predict(self, X):
        return self.predict_proba(X).argmax(axis=1)


def train_nn(X, y, n_classes=3, seed=0, epochs=200, hidden=(100, 50, 10),
             lr=1e-3, weight_decay=5e-4, X_val=None, y_val=None, patience=20):
    """Train the network with Adam; early-stops on validation macro-F1."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise UsageError(f"train_nn needs a non-empty 2-d matrix, got shape {X.shape}")
    if y.shape[0] != X.shape[0]:
        raise UsageError("X and y row counts differ")
    rng = np.random.default_rng(seed)
    dims = [X.shape[1]] + list(hidden) + [n_classes]
    weights, biases = [], []
    for i in range(len(dims) - 1):
        std = np.sqrt(2.0 / (dims[i] + dims[i + 1]))
        if i == len(dims) - 2:
            std *= 0.3
        weights.append(parameter(rng.normal(0.0, std, size=(dims[i], dims[i + 1]))))
        biases.append(parameter(np.zeros((1, dims[i + 1]))))
    params = weights + biases
    state = AdamState(lr=lr, weight_decay=weight_decay)
    Xc = constant(X)
    has_val = X_val is not None and y_val is not None

    def forward(inputs):
        h = inputs
        for i in range(len(weights)):
            h = add(matmul(h, weights[i]), biases[i])
            if i != len(weights) - 1:
                h = tanh(h)
        return h

    best_score, best_snap, stale = -np.inf, None, 0
    for _ in range(epochs):
        loss = softmax_cross_entropy(forward(Xc), y)
        grads = backward(loss, params)
        adam_step(params, grads, state)
        if has_val:
            model = NNModel([w.value for w in weights], [b.value for b in biases])
            pred = model.predict(X_val)
            score = f1_scores(np.asarray(y_val, dtype=np.int64), pred, n_classes)["f1_macro"]
            if score > best_score:
                best_score = score
                best_snap = [p.value.copy() for p in params]
                stale = 0
            else:
                stale += 1
                if stale > patience:
                    break
    if has_val and best_snap is not None:
        for p, v in zip(params, best_snap):
            p.value[...] = v
    return NNModel([w.value.copy() for w in weights], [b.value.copy() for b in biases])
