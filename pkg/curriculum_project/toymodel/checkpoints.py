"""Versioned JSON container for a LinearModel and its optimizer state.

Only weight columns with a non-zero entry are stored. Floats are written with
their shortest round-trip representation, so load(save(m)) == m exactly.
"""

import json
from pathlib import Path

import numpy as np

from .exceptions import CheckpointFormatError
from .models import Gradients, LinearModel, OptimizerConfig, OptimizerState

FORMAT = 'toymodel'
VERSION = 1


def _sparse_columns(matrix):
    columns = np.flatnonzero(np.any(matrix != 0, axis=0))
    return {'columns': columns.tolist(), 'values': matrix[:, columns].tolist()}


def _dense_columns(payload, shape):
    matrix = np.zeros(shape)
    if payload['columns']:
        matrix[:, np.asarray(payload['columns'], dtype=np.int64)] = np.asarray(payload['values'], dtype=np.float64)
    return matrix


def _moment(moment):
    if moment is None:
        return None
    return {'weights': _sparse_columns(moment.weights), 'bias': moment.bias.tolist()}


def checkpoint_payload(model, state=None):
    payload = {
        'format': FORMAT,
        'version': VERSION,
        'dim': model.dim,
        'class_count': model.class_count,
        'weights': _sparse_columns(model.weights),
        'bias': model.bias.tolist(),
        'optimizer': None,
    }
    if state is not None:
        config = state.config
        payload['optimizer'] = {
            'kind': config.kind.value,
            'lr': config.lr,
            'weight_decay': config.weight_decay,
            'beta1': config.beta1,
            'beta2': config.beta2,
            'eps': config.eps,
            'total_steps': state.total_steps,
            'step': state.step,
            'first_moment': _moment(state.first_moment),
            'second_moment': _moment(state.second_moment),
        }
    return payload


def save_model(model, path, state=None, manifest=None):
    """`manifest` names the run manifest the checkpoint belongs to; load_model ignores it."""
    path = Path(path)
    payload = checkpoint_payload(model, state)
    if manifest is not None:
        payload['manifest'] = manifest
    temp_path = path.with_suffix(path.suffix + '.tmp')
    temp_path.write_text(json.dumps(payload, sort_keys=True), encoding='utf-8')
    temp_path.replace(path)
    return path


def load_model(path):
    """Return (model, optimizer state or None)."""
    try:
        with open(path, encoding='utf-8') as handle:
            payload = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise CheckpointFormatError(detail=f'cannot read checkpoint {path}: {exc}')
    if payload.get('format') != FORMAT or payload.get('version') != VERSION:
        raise CheckpointFormatError(
            detail=f'{path} is not a {FORMAT} v{VERSION} checkpoint '
                   f'(format={payload.get("format")!r}, version={payload.get("version")!r})'
        )
    try:
        shape = (payload['class_count'], payload['dim'])
        model = LinearModel(weights=_dense_columns(payload['weights'], shape),
                            bias=np.asarray(payload['bias'], dtype=np.float64))
        state = None
        optimizer = payload['optimizer']
        if optimizer is not None:
            config = OptimizerConfig(kind=optimizer['kind'], lr=optimizer['lr'],
                                     weight_decay=optimizer['weight_decay'], beta1=optimizer['beta1'],
                                     beta2=optimizer['beta2'], eps=optimizer['eps'])
            state = OptimizerState(config=config, total_steps=optimizer['total_steps'], step=optimizer['step'])
            for name in ('first_moment', 'second_moment'):
                moment = optimizer[name]
                if moment is not None:
                    setattr(state, name, Gradients(weights=_dense_columns(moment['weights'], shape),
                                                   bias=np.asarray(moment['bias'], dtype=np.float64)))
    except (KeyError, TypeError, ValueError) as exc:
        raise CheckpointFormatError(detail=f'malformed checkpoint {path}: {exc}')
    return model, state
