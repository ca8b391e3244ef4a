"""Run manifests: what a command ran with and what it wrote."""
import datetime
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional
from framework import __version__
from framework.utils.fileutils import file_checksum
from framework.utils.fileutils import load_json
from framework.utils.fileutils import save_json

MANIFEST_VERSION = 1
MANIFEST_FILE = 'manifest.json'


def utc_now() -> str:
    """Get the current UTC time in ISO format."""
    return datetime.datetime.now(datetime.timezone.utc).isoformat(
        timespec='seconds')


@dataclass
class RunManifest:
    """Record of a command run.

    The config snapshot is sufficient to reproduce every artifact; passing the
    manifest file as `--config` reruns the command with it.
    """

    command: str
    config: dict
    seeds: List[int]
    started_at: str = field(default_factory=utc_now)
    finished_at: Optional[str] = None
    tool_version: str = __version__
    artifacts: Dict[str, str] = field(default_factory=dict)

    def add_artifacts(self, out_dir, paths):
        """Record the SHA-256 checksum of output files, keyed by path relative to `out_dir`."""
        out_dir = Path(out_dir)
        for path in paths:
            path = Path(path)
            self.artifacts[path.relative_to(out_dir).as_posix()] = \
                file_checksum(path)

    def to_dict(self) -> dict:
        """Convert the manifest into its JSON representation."""
        return {
            'manifest_version': MANIFEST_VERSION,
            'command': self.command,
            'tool_version': self.tool_version,
            'started_at': self.started_at,
            'finished_at': self.finished_at,
            'seeds': list(self.seeds),
            'config': self.config,
            'artifacts': dict(sorted(self.artifacts.items()))
        }

    def save(self, out_dir) -> Path:
        """Stamp the finish time and save the manifest into the output directory."""
        self.finished_at = utc_now()
        path = Path(out_dir) / MANIFEST_FILE
        save_json(self.to_dict(), path)
        return path

    @classmethod
    def load(cls, file_name) -> 'RunManifest':
        """Load a manifest from a JSON file."""
        data = load_json(file_name)
        return cls(command=data['command'],
                   config=data['config'],
                   seeds=data['seeds'],
                   started_at=data['started_at'],
                   finished_at=data['finished_at'],
                   tool_version=data['tool_version'],
                   artifacts=data['artifacts'])
