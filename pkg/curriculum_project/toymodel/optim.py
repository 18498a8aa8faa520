"""SGD and AdamW updates under a linear decay schedule with no warm-up.

AdamW (decoupled weight decay, bias-corrected moments):
    m_t = b1 * m_{t-1} + (1 - b1) * g
    v_t = b2 * v_{t-1} + (1 - b2) * g^2
    theta <- theta - lr_t * (m_t / (1 - b1^t) / (sqrt(v_t / (1 - b2^t)) + eps) + wd * theta)
Weight decay is applied to the weights only, not the bias.
"""

import logging

import numpy as np

from .exceptions import NonFiniteGradient
from .models import OptimizerKind

logger = logging.getLogger(__name__)


def optimizer_step(model, grads, state):
    """Apply one update in place and return (model, state)."""
    if grads.weights.shape != model.weights.shape or grads.bias.shape != model.bias.shape:
        raise ValueError(f'gradient shapes {grads.weights.shape}/{grads.bias.shape} do not match the model')
    if not grads.is_finite():
        raise NonFiniteGradient(detail=f'non-finite gradient at step {state.step}')

    config = state.config
    lr = state.current_lr
    if config.kind is OptimizerKind.SGD:
        model.weights -= lr * grads.weights
        model.bias -= lr * grads.bias
    else:
        t = state.step + 1
        first, second = state.first_moment, state.second_moment
        correction1 = 1.0 - config.beta1 ** t
        correction2 = 1.0 - config.beta2 ** t
        for name in ('weights', 'bias'):
            grad = getattr(grads, name)
            m = getattr(first, name)
            v = getattr(second, name)
            m *= config.beta1
            m += (1.0 - config.beta1) * grad
            v *= config.beta2
            v += (1.0 - config.beta2) * np.square(grad)
            update = (m / correction1) / (np.sqrt(v / correction2) + config.eps)
            param = getattr(model, name)
            if name == 'weights' and config.weight_decay:
                param -= lr * config.weight_decay * param
            param -= lr * update

    state.step += 1
    return model, state
