"""Run manifest: the resolved configuration, input digests, tool version and timestamps.

Timestamps only live here, so every other output is byte-identical across reruns.
"""

import hashlib
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from django.conf import settings

from .output import write_json

MANIFEST_NAME = 'manifest.json'


def manifest_path(out):
    """`manifest.json` inside an output directory, `<file>.manifest.json` next to an output file."""
    out = Path(out)
    return out / MANIFEST_NAME if out.is_dir() else out.with_name(out.name + '.manifest.json')


def file_digest(path):
    digest = hashlib.sha256()
    with open(path, 'rb') as handle:
        for chunk in iter(lambda: handle.read(1 << 16), b''):
            digest.update(chunk)
    return digest.hexdigest()


def utc_now():
    return datetime.now(timezone.utc).replace(microsecond=0).isoformat()


@dataclass
class RunManifest:
    command: str
    config: dict
    inputs: dict = field(default_factory=dict)
    outputs: list = field(default_factory=list)
    version: str = field(default_factory=lambda: settings.VERSION)
    started_at: str = field(default_factory=utc_now)
    finished_at: Optional[str] = None

    @classmethod
    def start(cls, command, config, input_paths):
        inputs = {str(path): file_digest(path) for path in input_paths if path}
        return cls(command=command, config=dict(config), inputs=inputs)

    def add_output(self, path):
        self.outputs.append(Path(path).name)

    def finish(self, path):
        self.finished_at = utc_now()
        return write_json(path, {
            'command': self.command,
            'config': self.config,
            'config_version': settings.CURRICULUM_CONFIG_VERSION,
            'inputs': self.inputs,
            'outputs': sorted(self.outputs),
            'version': self.version,
            'started_at': self.started_at,
            'finished_at': self.finished_at,
        })
