"""Adam with classic L2-style weight decay.

Decay enters as an additive lambda*theta term in the gradient before the
moment updates (not the decoupled variant), since only a decay strength is
specified for the training setups. Bias correction is the standard
step-count form. Updates are deterministic.
"""

from dataclasses import dataclass, field

import numpy as np

from ..errors import UsageError, NumericError


@dataclass
class AdamState:
    lr: float = 1e-3
    weight_decay: float = 5e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)


def adam_step(params, grads, state):
    """One in-place update over parallel lists of parameters and gradients."""
    if len(params) != len(grads):
        raise UsageError("adam_step: params and grads length mismatch")
    state.step += 1
    t = state.step
    b1, b2 = state.beta1, state.beta2
    bias1 = 1.0 - b1 ** t
    bias2 = 1.0 - b2 ** t
    for i, (p, g) in enumerate(zip(params, grads)):
        if g is None:
            g = np.zeros_like(p.value)
        if g.shape != p.value.shape:
            raise UsageError(f"adam_step: gradient shape {g.shape} != parameter shape {p.value.shape}")
        if not np.all(np.isfinite(g)):
            raise NumericError("adam_step: non-finite gradient")
        if state.weight_decay:
            g = g + state.weight_decay * p.value
        if i not in state.m:
            state.m[i] = np.zeros_like(p.value)
            state.v[i] = np.zeros_like(p.value)
        m = state.m[i]
        v = state.v[i]
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * (g * g)
        p.value -= state.lr * (m / bias1) / (np.sqrt(v / bias2) + state.eps)
    return params, state
