"""Validation of the merged run configuration (flat dotted keys such as `train.epochs`)."""

from rest_framework import serializers

from corpus.presets import PRESETS
from samplers.exceptions import UnknownStrategy
from samplers.models import Strategy
from toymodel.models import is_power_of_two


def strategy_name(value):
    try:
        Strategy.parse(value)
    except UnknownStrategy as exc:
        raise serializers.ValidationError(exc.detail)


def power_of_two(value):
    if not is_power_of_two(value):
        raise serializers.ValidationError(f'{value} is not a power of two.')


def positive(value):
    if value <= 0:
        raise serializers.ValidationError('Ensure this value is greater than 0.')


class RunConfigSerializer(serializers.Serializer):
    """Every configuration key with its constraint.

    Field names are the dotted keys, so errors read `train.epochs: ...`; the
    validated data comes back nested (`validated_data['train']['epochs']`).
    """

    def get_fields(self):
        return {
            'version': serializers.IntegerField(min_value=1, required=False),
            'data.format': serializers.ChoiceField(choices=['jsonl', 'csv']),
            'data.class_count': serializers.IntegerField(min_value=2),
            'data.split': serializers.ListField(child=serializers.FloatField(min_value=0, max_value=1),
                                                min_length=2, max_length=3),
            'data.split_seed': serializers.IntegerField(min_value=0),
            'data.max_tokens': serializers.IntegerField(min_value=1, allow_null=True),
            'data.preset': serializers.ChoiceField(choices=sorted(PRESETS), allow_null=True),
            'model.dim': serializers.IntegerField(min_value=2, validators=[power_of_two]),
            'optim.kind': serializers.ChoiceField(choices=['sgd', 'adamw']),
            'optim.lr': serializers.FloatField(allow_null=True, validators=[positive]),
            'optim.weight_decay': serializers.FloatField(min_value=0),
            'optim.beta1': serializers.FloatField(min_value=0, max_value=1),
            'optim.beta2': serializers.FloatField(min_value=0, max_value=1),
            'optim.eps': serializers.FloatField(validators=[positive]),
            'train.strategy': serializers.CharField(validators=[strategy_name]),
            'train.epochs': serializers.IntegerField(min_value=1),
            'train.batch_size': serializers.IntegerField(min_value=1),
            'train.partition': serializers.ListField(child=serializers.IntegerField(min_value=0),
                                                     min_length=2, max_length=2),
            'train.checkpoint_fraction': serializers.FloatField(max_value=1, validators=[positive]),
            'train.seeds': serializers.ListField(child=serializers.IntegerField(min_value=0), allow_empty=False),
            'scores.path': serializers.CharField(allow_null=True),
            'probe.fraction': serializers.FloatField(max_value=1, validators=[positive]),
            'probe.epochs': serializers.IntegerField(min_value=1),
            'analysis.rescore': serializers.BooleanField(),
            'analysis.split': serializers.ChoiceField(choices=['train', 'validation']),
            'analysis.bins': serializers.IntegerField(min_value=2),
            'fewshot.k': serializers.IntegerField(min_value=1),
            'compare.strategies': serializers.ListField(child=serializers.CharField(validators=[strategy_name]),
                                                        allow_empty=False),
            'compare.jobs': serializers.IntegerField(min_value=1),
        }

    def validate(self, data):
        train = data['train']
        if sum(train['partition']) != train['batch_size']:
            raise serializers.ValidationError({
                'train.partition': f'{train["partition"]} does not sum to the batch size {train["batch_size"]}.'
            })
        split = data['data']['split']
        if abs(sum(split) - 1.0) > 1e-9 or min(split) <= 0:
            raise serializers.ValidationError({'data.split': 'Fractions must be positive and sum to 1.'})
        return data


def flatten(nested, prefix=''):
    """{'train': {'epochs': 5}} -> {'train.epochs': 5}."""
    flat = {}
    for key, value in nested.items():
        name = f'{prefix}{key}'
        if isinstance(value, dict):
            flat.update(flatten(value, prefix=f'{name}.'))
        else:
            flat[name] = value
    return flat
