"""Report files: every write goes to a temporary sibling first, then replaces the target."""

import csv
import io
import json
import logging
from pathlib import Path

from .exceptions import OutputExists

logger = logging.getLogger(__name__)


def prepare_out_dir(path, force=False):
    """Create the output directory; a non-empty one is only reused with --force."""
    path = Path(path)
    if path.exists() and not path.is_dir():
        raise OutputExists(detail=f'{path} exists and is not a directory')
    if path.is_dir() and any(path.iterdir()) and not force:
        raise OutputExists(detail=f'{path} is not empty, pass --force to overwrite')
    path.mkdir(parents=True, exist_ok=True)
    return path


def write_text(path, content):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    temp_path = path.with_suffix(path.suffix + '.tmp')
    temp_path.write_text(content, encoding='utf-8')
    temp_path.replace(path)
    logger.debug('Wrote %s', path)
    return path


def dump_json(payload):
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + '\n'


def write_json(path, payload):
    return write_text(path, dump_json(payload))


def write_jsonl(path, records):
    return write_text(path, ''.join(json.dumps(record, sort_keys=True) + '\n' for record in records))


def write_csv(path, fieldnames, records):
    buffer = io.StringIO(newline='')
    writer = csv.DictWriter(buffer, fieldnames=list(fieldnames), lineterminator='\n')
    writer.writeheader()
    for record in records:
        writer.writerow(record)
    return write_text(path, buffer.getvalue())
