#!/usr/bin/env python
"""Utility functions for reading and writing JSON artifacts."""
import hashlib
import json
import logging
from pathlib import Path


def ensure_parent_directory(file_name):
    """Create the parent directory of the provided file if it does not exist.

    Parameters
    ----------
    file_name: str or Path, required
        The path of the file about to be written.

    Returns
    -------
    path: Path
        The path of the file.
    """
    path = Path(file_name)
    if not path.parent.exists():
        logging.info("Creating directory %s.", path.parent)
        path.parent.mkdir(parents=True, exist_ok=True)
    return path


def save_json(data, file_name):
    """Save data into a JSON file, creating the parent directory if needed.

    Parameters
    ----------
    data: dict or list, required
        The JSON-serializable data to save.
    file_name: str or Path, required
        The path of the output file.
    """
    path = ensure_parent_directory(file_name)
    with open(str(path), 'w', encoding='utf8') as f:
        json.dump(data, f, indent=2, ensure_ascii=False)
        f.write('\n')


def load_json(file_name):
    """Load the contents of a JSON file.

    Parameters
    ----------
    file_name: str or Path, required
        The path of the file to read.

    Returns
    -------
    data: dict or list
        The parsed contents.
    """
    with open(str(file_name), 'r', encoding='utf8') as f:
        return json.load(f)


def save_json_lines(items, file_name):
    """Save each item on a separate line of a JSON-lines file.

    Floats are written with their shortest round-tripping representation so
    that reading the file back yields bit-identical values.

    Parameters
    ----------
    items: iterable of dict, required
        The items to save.
    file_name: str or Path, required
        The path of the output file.
    """
    path = ensure_parent_directory(file_name)
    with open(str(path), 'w', encoding='utf8', newline='\n') as f:
        for item in items:
            f.write(json.dumps(item, ensure_ascii=False,
                               separators=(',', ':')))
            f.write('\n')


def iter_json_lines(file_name):
    """Iterate over the non-empty lines of a JSON-lines file.

    Parameters
    ----------
    file_name: str or Path, required
        The path of the file to read.

    Returns
    -------
    lines: generator of (int, str) tuples
        The 1-based line number and the raw text of each non-empty line.
    """
    with open(str(file_name), 'r', encoding='utf8') as f:
        for line_number, line in enumerate(f, start=1):
            line = line.strip()
            if len(line) == 0:
                continue
            yield line_number, line


def file_checksum(file_name):
    """Compute the SHA-256 checksum of a file.

    Parameters
    ----------
    file_name: str or Path, required
        The path of the file.

    Returns
    -------
    checksum: str
        The hex digest of the file contents.
    """
    digest = hashlib.sha256()
    with open(str(file_name), 'rb') as f:
        for chunk in iter(lambda: f.read(1 << 16), b''):
            digest.update(chunk)
    return digest.hexdigest()
