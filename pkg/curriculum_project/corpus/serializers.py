"""Serializers validating the records read from dataset, score and prediction files."""

from rest_framework import serializers


class ExampleRecordSerializer(serializers.Serializer):
    """One dataset record. `id` is optional; when given it must follow file order."""

    id = serializers.IntegerField(min_value=0, required=False, allow_null=True)
    text = serializers.CharField(allow_blank=True, trim_whitespace=False)
    text_pair = serializers.CharField(required=False, allow_null=True, allow_blank=True, trim_whitespace=False)
    label = serializers.IntegerField(min_value=0)


class ScoreRecordSerializer(serializers.Serializer):
    """One externally computed probability record: class probabilities or verbalizer token probabilities."""

    id = serializers.IntegerField(min_value=0)
    probs = serializers.ListField(child=serializers.FloatField(), required=False, allow_empty=False)
    token_probs = serializers.DictField(child=serializers.FloatField(), required=False, allow_empty=False)

    def validate(self, data):
        if ('probs' in data) == ('token_probs' in data):
            raise serializers.ValidationError('exactly one of "probs" or "token_probs" is required')
        return data


class PredictionRecordSerializer(serializers.Serializer):
    """A predicted label next to the gold label, for histogram correctness splits."""

    id = serializers.IntegerField(min_value=0)
    prediction = serializers.IntegerField(min_value=0)
    label = serializers.IntegerField(min_value=0)


def first_error(errors):
    """Flatten serializer errors into one `field: message` line."""
    parts = []
    for name, messages in errors.items():
        if isinstance(messages, dict):
            messages = [f'{key}: {value}' for key, value in messages.items()]
        parts.append(f'{name}: {" ".join(str(message) for message in messages)}')
    return '; '.join(parts)
