"""Serializer for the rows of an epoch plan dump."""

from rest_framework import serializers


class PlanRowSerializer(serializers.Serializer):
    epoch = serializers.IntegerField(min_value=1)
    position = serializers.IntegerField(min_value=0)
    example_id = serializers.IntegerField(min_value=0)
    partition_tag = serializers.ChoiceField(choices=['B1', 'B2', 'whole'])


def plan_records(plan):
    for row in plan.rows():
        yield PlanRowSerializer(row).data
