"""Serializers for score-file output records and histogram rows."""

from rest_framework import serializers


class ScoredRecordSerializer(serializers.Serializer):
    """Record written by the `score` command: the probabilities and their difficulty score."""

    id = serializers.IntegerField()
    probs = serializers.ListField(child=serializers.FloatField())
    score = serializers.FloatField()


class HistogramRowSerializer(serializers.Serializer):
    bin_lo = serializers.FloatField()
    bin_hi = serializers.FloatField()
    correct_count = serializers.IntegerField()
    incorrect_count = serializers.IntegerField()
    epoch_tag = serializers.IntegerField()


def scored_records(table):
    for example_id in range(len(table)):
        yield ScoredRecordSerializer({
            'id': example_id,
            'probs': [float(value) for value in table.probs[example_id]],
            'score': float(table.scores[example_id]),
        }).data
