"""Run configuration: settings defaults, then the YAML --config file, then command-line flags."""

import copy
import logging
import math

from django.conf import settings
from ruamel.yaml import YAML
from ruamel.yaml.error import YAMLError

from corpus.presets import PRESETS, get_preset
from toymodel.models import DEFAULT_LR, OptimizerConfig, OptimizerKind
from trainer.models import TrainConfig

from .exceptions import ConfigError
from .serializers import RunConfigSerializer, flatten

logger = logging.getLogger(__name__)

# command option dest -> config key
FLAG_KEYS = {
    'format': 'data.format',
    'class_count': 'data.class_count',
    'preset': 'data.preset',
    'max_tokens': 'data.max_tokens',
    'split_seed': 'data.split_seed',
    'dim': 'model.dim',
    'optimizer': 'optim.kind',
    'lr': 'optim.lr',
    'strategy': 'train.strategy',
    'epochs': 'train.epochs',
    'batch_size': 'train.batch_size',
    'seed': 'train.seeds',
    'checkpoint_fraction': 'train.checkpoint_fraction',
    'scores': 'scores.path',
    'probe_fraction': 'probe.fraction',
    'probe_epochs': 'probe.epochs',
    'rescore': 'analysis.rescore',
    'rescore_split': 'analysis.split',
    'bins': 'analysis.bins',
    'k': 'fewshot.k',
    'strategies': 'compare.strategies',
    'jobs': 'compare.jobs',
}


def read_config_file(path):
    """Flat dotted keys from a YAML file; `version` must match the current schema."""
    yaml = YAML(typ='safe')
    try:
        with open(path, encoding='utf-8') as handle:
            content = yaml.load(handle)
    except OSError as exc:
        raise ConfigError(detail=f'cannot read config file {path}: {exc.strerror}')
    except YAMLError as exc:
        raise ConfigError(detail=f'config file {path} is not valid YAML: {exc}')
    if content is None:
        return {}
    if not isinstance(content, dict):
        raise ConfigError(detail=f'config file {path} must hold a mapping of keys to values')

    content = dict(content)
    version = content.pop('version', settings.CURRICULUM_CONFIG_VERSION)
    if version != settings.CURRICULUM_CONFIG_VERSION:
        raise ConfigError(detail=f'config file {path} has version {version!r}, '
                                 f'expected {settings.CURRICULUM_CONFIG_VERSION}')
    unknown = sorted(set(content) - set(settings.CURRICULUM_DEFAULTS))
    if unknown:
        raise ConfigError(detail=f'unknown config keys in {path}: {", ".join(unknown)}')
    return content


def default_partition(batch_size, reference=(9, 7)):
    """The 9/7 split of a 16-example batch, rescaled to another batch size."""
    first = min(batch_size, math.ceil(batch_size * reference[0] / sum(reference)))
    return [first, batch_size - first]


def resolve_config(options, config_path=None):
    """Merge defaults < config file < flags and validate; returns the flat resolved mapping."""
    merged = copy.deepcopy(settings.CURRICULUM_DEFAULTS)
    explicit = set()
    if config_path:
        from_file = read_config_file(config_path)
        merged.update(from_file)
        explicit.update(from_file)
    for dest, key in FLAG_KEYS.items():
        value = options.get(dest)
        if value is not None and value is not False:
            merged[key] = list(value) if isinstance(value, (list, tuple)) else value
            explicit.add(key)

    if merged.get('data.preset') in PRESETS:
        preset = get_preset(merged['data.preset'])
        if 'data.split' not in explicit:
            merged['data.split'] = list(preset.split)
        if 'data.class_count' not in explicit:
            merged['data.class_count'] = preset.class_count
    if 'train.partition' not in explicit and merged['train.batch_size'] != 16:
        merged['train.partition'] = default_partition(merged['train.batch_size'])

    serializer = RunConfigSerializer(data=merged)
    if not serializer.is_valid():
        lines = []
        for key, messages in serializer.errors.items():
            if isinstance(messages, dict):
                messages = [f'{index}: {" ".join(str(m) for m in inner)}' for index, inner in messages.items()]
            lines.append(f'{key}: {" ".join(str(message) for message in messages)}')
        raise ConfigError(detail='invalid configuration\n' + '\n'.join(lines))
    resolved = flatten(serializer.validated_data)
    if resolved['optim.lr'] is None:
        resolved['optim.lr'] = DEFAULT_LR[OptimizerKind(resolved['optim.kind'])]
    logger.debug('Resolved configuration: %s', resolved)
    return resolved


def train_config(resolved, strategy=None):
    """TrainConfig for one strategy (defaults to `train.strategy`)."""
    return TrainConfig(
        strategy=strategy or resolved['train.strategy'],
        epochs=resolved['train.epochs'],
        batch_size=resolved['train.batch_size'],
        partition=tuple(resolved['train.partition']),
        checkpoint_fraction=resolved['train.checkpoint_fraction'],
        seeds=tuple(resolved['train.seeds']),
        optimizer=OptimizerConfig(
            kind=resolved['optim.kind'],
            lr=resolved['optim.lr'],
            weight_decay=resolved['optim.weight_decay'],
            beta1=resolved['optim.beta1'],
            beta2=resolved['optim.beta2'],
            eps=resolved['optim.eps'],
        ),
        dim=resolved['model.dim'],
        max_tokens=resolved['data.max_tokens'],
        preset=resolved['data.preset'],
        scores_path=resolved['scores.path'],
        probe_fraction=resolved['probe.fraction'],
        probe_epochs=resolved['probe.epochs'],
        rescore=resolved['analysis.rescore'],
        rescore_split=resolved['analysis.split'],
        bins=resolved['analysis.bins'],
    )
