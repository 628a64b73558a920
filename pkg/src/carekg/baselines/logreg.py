"""Multinomial logistic regression on the grad engine."""

import numpy as np

from ..autodiff import (parameter, constant, backward, AdamState, adam_step,
                        matmul, add, mean, rowdot, scale, softmax,
                        softmax_cross_entropy)
from ..errors import UsageError


class LogRegModel:
    def __init__(self, w, b):
        self.w = w
        self.b = b

    def predict_proba(self, X):
        return softmax(np.asarray(X, dtype=np.float64) @ self.w + self.b)

    def predict(self, X):
        return self.predict_proba(X).argmax(axis=1)


def train_logreg(X, y, n_classes=3, seed=0, epochs=500, lr=0.01, l2=1e-4):
    """Softmax regression, Adam on cross-entropy plus an L2 penalty.

    The penalty covers the weight matrix only; the bias is free, so with
    uninformative features the fitted probabilities settle at the class
    priors.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise UsageError(f"train_logreg needs a non-empty 2-d matrix, got shape {X.shape}")
    if y.shape[0] != X.shape[0]:
        raise UsageError("X and y row counts differ")
    n, d = X.shape
    rng = np.random.default_rng(seed)
    w = parameter(rng.normal(0.0, 0.01, size=(d, n_classes)))
    b = parameter(np.zeros((1, n_classes)))
    Xc = constant(X)
    state = AdamState(lr=lr, weight_decay=0.0)
    for _ in range(epochs):
        logits = add(matmul(Xc, w), b)
        # mean(rowdot(w, w)) is sum(w^2)/d; rescale to get the plain sum
        penalty = scale(mean(rowdot(w, w)), l2 * d)
        loss = add(softmax_cross_entropy(logits, y), penalty)
        grads = backward(loss, [w, b])
        adam_step([w, b], grads, state)
    return LogRegModel(w.value.copy(), b.value.copy())
