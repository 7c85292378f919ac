"""
File IO Utilities

CSV result tables with ``#``-prefixed provenance lines, JSON and JSONL records.
"""

import io
import json
import logging
from collections.abc import Mapping
from pathlib import Path
from typing import Any, Dict, List, Optional, TextIO

import jsonlines
import pandas as pd

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


def ensure_dir(file_path: str) -> None:
    """Create the parent directory of ``file_path`` if missing."""
    Path(file_path).parent.mkdir(parents=True, exist_ok=True)


def load_json(file_path: str) -> Any:
    return json.loads(Path(file_path).read_text(encoding="utf-8"))


def save_json(data: Any, file_path: str, indent: int = 2) -> None:
    ensure_dir(file_path)
    Path(file_path).write_text(json.dumps(data, indent=indent), encoding="utf-8")
    logger.debug(f"JSON -> {file_path}")


def save_jsonl(data: List[Dict[str, Any]], file_path: str) -> None:
    """One JSON object per row, as written by ``--records``."""
    ensure_dir(file_path)
    with jsonlines.open(file_path, "w") as writer:
        writer.write_all(data)
    logger.debug(f"JSONL -> {file_path} ({len(data)} rows)")


def write_csv(
    frame: pd.DataFrame, stream: TextIO, metadata: Optional[Mapping[str, Any]] = None
) -> None:
    """Metadata lines first, then the table with full-precision floats."""
    for key, value in (metadata or {}).items():
        stream.write(f"# {key}: {value}\n")
    frame.to_csv(stream, index=False, float_format=FLOAT_FORMAT)


def save_csv(
    frame: pd.DataFrame, file_path: str, metadata: Optional[Mapping[str, Any]] = None
) -> None:
    """
    Save a result table.

    Args:
        frame: Table to save
        file_path: Target file path
        metadata: Provenance written as ``# key: value`` lines above the header
    """
    ensure_dir(file_path)
    with open(file_path, "w", encoding="utf-8", newline="") as f:
        write_csv(frame, f, metadata)
    logger.debug(f"Saved CSV to: {file_path}")


def load_csv(file_path: str) -> tuple[pd.DataFrame, Dict[str, str]]:
    """
    Load a table written by ``save_csv``.

    Returns:
        (table, metadata) with metadata values kept as strings
    """
    metadata: Dict[str, str] = {}
    body: List[str] = []
    with open(file_path, "r", encoding="utf-8") as f:
        for line in f:
            if line.startswith("#"):
                key, _, value = line[1:].partition(":")
                metadata[key.strip()] = value.strip()
            else:
                body.append(line)
    frame = pd.read_csv(io.StringIO("".join(body)), float_precision="round_trip")
    return frame, metadata
