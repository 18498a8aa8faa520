"""Serializers for run reports, the checkpoint progression and the strategy summary."""

from rest_framework import serializers

from scoring.serializers import HistogramRowSerializer


class ClassMetricsSerializer(serializers.Serializer):
    precision = serializers.FloatField()
    recall = serializers.FloatField()
    f1 = serializers.FloatField()
    support = serializers.IntegerField()


class MetricsSerializer(serializers.Serializer):
    accuracy = serializers.FloatField()
    macro_precision = serializers.FloatField()
    macro_recall = serializers.FloatField()
    macro_f1 = serializers.FloatField()
    per_class = ClassMetricsSerializer(many=True, read_only=True)


class CheckpointSerializer(serializers.Serializer):
    epoch = serializers.IntegerField(min_value=1)
    mark = serializers.IntegerField(min_value=1)
    step = serializers.IntegerField(min_value=1)
    fraction_seen = serializers.FloatField()
    loss = serializers.FloatField()
    metrics = MetricsSerializer(read_only=True)


class HistogramSerializer(serializers.Serializer):
    epoch_tag = serializers.IntegerField(min_value=0)
    grouped = serializers.BooleanField()
    rows = serializers.SerializerMethodField()

    def get_rows(self, report):
        return [HistogramRowSerializer(row).data for row in report.rows()]


class RunReportSerializer(serializers.Serializer):
    """Report of one (strategy, seed) run."""

    strategy = serializers.CharField(source='strategy.value')
    seed = serializers.IntegerField()
    train_size = serializers.IntegerField()
    best_index = serializers.IntegerField()
    test_loss = serializers.FloatField()
    test_metrics = MetricsSerializer(read_only=True)
    epoch_losses = serializers.ListField(child=serializers.FloatField())
    checkpoints = CheckpointSerializer(many=True, read_only=True)
    histograms = HistogramSerializer(many=True, read_only=True)
    selected_ids = serializers.ListField(child=serializers.IntegerField(), allow_null=True)


class ProgressionRowSerializer(serializers.Serializer):
    """One CSV row of the validation curve; the short metric names are the CSV column names."""

    epoch = serializers.IntegerField(min_value=1)
    fraction_seen = serializers.FloatField()
    acc = serializers.FloatField()
    macro_f1 = serializers.FloatField()
    macro_p = serializers.FloatField()
    macro_r = serializers.FloatField()
    loss = serializers.FloatField()


def progression_records(report):
    for entry in report.checkpoints:
        metrics = entry.metrics
        yield ProgressionRowSerializer({
            'epoch': entry.epoch,
            'fraction_seen': entry.fraction_seen,
            'acc': metrics.accuracy,
            'macro_f1': metrics.macro_f1,
            'macro_p': metrics.macro_precision,
            'macro_r': metrics.macro_recall,
            'loss': entry.loss,
        }).data


class SummaryRecordSerializer(serializers.Serializer):
    strategy = serializers.CharField()
    seeds = serializers.CharField()
    accuracy = serializers.CharField()
    macro_f1 = serializers.CharField()
    macro_precision = serializers.CharField()
    macro_recall = serializers.CharField()
    failed_seeds = serializers.CharField(allow_blank=True)
