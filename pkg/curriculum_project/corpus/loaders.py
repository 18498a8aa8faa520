"""Read and write datasets (JSONL or CSV) and externally computed probability files."""

import csv
import json
import logging
from pathlib import Path

import numpy as np

from scoring.difficulty import build_score_table, normalize_restricted
from scoring.exceptions import InvalidDistribution
from scoring.models import ScoreSource

from .exceptions import EmptyDataset, LabelOutOfRange, MalformedRecord, ScoreFileError
from .models import Dataset, Example, SplitTag
from .serializers import (
    ExampleRecordSerializer,
    PredictionRecordSerializer,
    ScoreRecordSerializer,
    first_error,
)

logger = logging.getLogger(__name__)

FORMATS = ('jsonl', 'csv')
CSV_FIELDS = ['id', 'text', 'text_pair', 'label']


def default_label_names(class_count):
    return tuple(str(label) for label in range(class_count))


def _jsonl_records(path):
    with open(path, encoding='utf-8') as handle:
        for line_number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedRecord(line_number, detail=f'invalid JSON ({exc.msg})')
            if not isinstance(record, dict):
                raise MalformedRecord(line_number, detail='record is not an object')
            yield line_number, record


def _csv_records(path):
    with open(path, encoding='utf-8', newline='') as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None:
            return
        missing = {'text', 'label'} - set(reader.fieldnames)
        if missing:
            raise MalformedRecord(1, detail=f'header lacks {", ".join(sorted(missing))}')
        for record in reader:
            if None in record:
                raise MalformedRecord(reader.line_num, detail='more fields than header columns')
            # an empty cell is an absent field: an empty text_pair cell means no pair
            record = {key: value for key, value in record.items() if value != '' or key == 'text'}
            yield reader.line_num, record


def _validated(serializer_class, line_number, record):
    serializer = serializer_class(data=record)
    if not serializer.is_valid():
        raise MalformedRecord(line_number, detail=first_error(serializer.errors))
    return serializer.validated_data


def load_dataset(path, format='jsonl', class_count=2, label_names=None, split_tag=SplitTag.TRAIN):
    """Load a labeled dataset; ids are dense 0..N-1 in file order.

    CSV files have no null: an empty `text_pair` cell loads as `text_pair=None`.
    """
    if format not in FORMATS:
        raise ValueError(f'unknown dataset format {format!r}, expected one of {FORMATS}')
    label_names = tuple(label_names) if label_names else default_label_names(class_count)
    if len(label_names) != class_count:
        raise ValueError(f'{len(label_names)} label names given for {class_count} classes')

    records = _jsonl_records(path) if format == 'jsonl' else _csv_records(path)
    examples = []
    for line_number, record in records:
        data = _validated(ExampleRecordSerializer, line_number, record)
        position = len(examples)
        if data.get('id') is not None and data['id'] != position:
            raise MalformedRecord(line_number, detail=f'id {data["id"]} out of sequence (expected {position})')
        if data['label'] >= class_count:
            raise LabelOutOfRange(line_number)
        examples.append(Example(id=position, text=data['text'], label=data['label'],
                                text_pair=data.get('text_pair')))
    if not examples:
        raise EmptyDataset(detail=f'Dataset file {path} holds no records')

    logger.info('Loaded %d examples from %s', len(examples), path)
    return Dataset(examples=tuple(examples), label_names=label_names, split_tag=SplitTag(split_tag))


def save_dataset(dataset, path, format='jsonl'):
    """Write `dataset` so that `load_dataset` reads back the same records."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if format == 'jsonl':
        with open(path, 'w', encoding='utf-8') as handle:
            for example in dataset:
                record = {'id': example.id, 'text': example.text, 'label': example.label}
                if example.text_pair is not None:
                    record['text_pair'] = example.text_pair
                handle.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + '\n')
    elif format == 'csv':
        with open(path, 'w', encoding='utf-8', newline='') as handle:
            writer = csv.DictWriter(handle, fieldnames=CSV_FIELDS)
            writer.writeheader()
            for example in dataset:
                writer.writerow({
                    'id': example.id,
                    'text': example.text,
                    'text_pair': example.text_pair if example.text_pair is not None else '',
                    'label': example.label,
                })
    else:
        raise ValueError(f'unknown dataset format {format!r}, expected one of {FORMATS}')
    return path


def load_external_scores(path, dataset=None, preset=None):
    """Read `{id, probs}` (or `{id, token_probs}` with a verbalizer preset) records into a ScoreTable.

    With a dataset, ids and class count must match it; without one (standalone
    analysis), ids must be dense and the class count is taken from the records.
    """
    records = []
    for line_number, record in _jsonl_records(path):
        data = _validated(ScoreRecordSerializer, line_number, record)
        if 'token_probs' in data:
            if preset is None:
                raise ScoreFileError(detail=f'token_probs at line {line_number} need a verbalizer preset',
                                     example_id=data['id'])
            raw = preset.keyword_vector(data['token_probs'])
        else:
            raw = data['probs']
        records.append((line_number, data['id'], raw))
    if not records:
        raise ScoreFileError(detail=f'score file {path} holds no records')

    size = len(dataset) if dataset is not None else len(records)
    class_count = dataset.class_count if dataset is not None else len(records[0][2])
    probs = np.full((size, class_count), np.nan)
    seen = np.zeros(size, dtype=bool)

    for line_number, example_id, raw in records:
        if example_id >= size:
            raise ScoreFileError(detail=f'unknown id {example_id} at line {line_number}', example_id=example_id)
        if seen[example_id]:
            raise ScoreFileError(detail=f'duplicate id {example_id} at line {line_number}', example_id=example_id)
        if len(raw) != class_count:
            raise ScoreFileError(
                detail=f'id {example_id}: {len(raw)} probabilities for {class_count} classes',
                example_id=example_id,
            )
        if any(value < 0 for value in raw):
            raise ScoreFileError(detail=f'id {example_id}: negative probability', example_id=example_id)
        try:
            probs[example_id] = normalize_restricted(raw).probs
        except InvalidDistribution as exc:
            raise ScoreFileError(detail=f'id {example_id}: {exc.detail}', example_id=example_id)
        seen[example_id] = True

    missing = np.flatnonzero(~seen)
    if len(missing):
        shown = ', '.join(str(i) for i in missing[:10])
        raise ScoreFileError(detail=f'score file {path} is missing id {shown}', example_id=int(missing[0]))

    return build_score_table(probs, source=ScoreSource.EXTERNAL)


def load_predictions(path):
    """Read `{id, prediction, label}` records, returned as id-ordered arrays."""
    rows = {}
    for line_number, record in _jsonl_records(path):
        data = _validated(PredictionRecordSerializer, line_number, record)
        if data['id'] in rows:
            raise MalformedRecord(line_number, detail=f'duplicate id {data["id"]}')
        rows[data['id']] = (data['prediction'], data['label'])
    ids = np.array(sorted(rows), dtype=np.int64)
    predictions = np.array([rows[i][0] for i in ids], dtype=np.int64)
    labels = np.array([rows[i][1] for i in ids], dtype=np.int64)
    return ids, predictions, labels
