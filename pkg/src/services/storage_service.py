"""
Storage service for writing result records and tables.
"""

import csv
import json
import logging
import math
import os
from pathlib import Path
from typing import Any, Iterable, List, Sequence

import numpy as np

from src.utils.helpers import format_float

logger = logging.getLogger(__name__)


def to_jsonable(value: Any) -> Any:
    """
    Convert numpy scalars/arrays, tuples and non-finite floats into plain JSON values.

    Non-finite floats become None (null).

    Example:
        >>> to_jsonable({"a": (1, float("nan"))})
        {'a': [1, None]}
    """
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value) if math.isfinite(value) else None
    return value


class StorageService:
    """
    Writes JSON records and CSV tables into an output directory.

    Attributes:
        out_dir: Directory receiving every file of a run
    """

    def __init__(self, out_dir: str = "output"):
        """
        Initialize storage service.

        Args:
            out_dir: Output directory, created on first write
        """
        self.out_dir = Path(out_dir)

    def _ensure_directory(self) -> None:
        """Create the output directory if it doesn't exist."""
        if not self.out_dir.exists():
            os.makedirs(self.out_dir)

    def path_for(self, name: str) -> Path:
        return self.out_dir / name

    def write_json(self, name: str, record: dict) -> Path:
        """
        Write a record as JSON (indent 2, sorted keys, shortest round-trip floats).

        Args:
            name: File name inside the output directory
            record: JSON-compatible mapping

        Returns:
            Path of the written file
        """
        self._ensure_directory()
        path = self.path_for(name)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            json.dump(to_jsonable(record), f, indent=2, sort_keys=True, allow_nan=False)
            f.write("\n")
        logger.info("Wrote %s", path)
        return path

    def write_csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        """
        Write a table as CSV: comma separated, LF line ends, header row.

        Floats are written with 17 significant digits, None as an empty field.

        Returns:
            Path of the written file
        """
        self._ensure_directory()
        path = self.path_for(name)
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([v if isinstance(v, str) else format_float(v) for v in row])
        logger.info("Wrote %s", path)
        return path

    def read_json(self, name: str) -> dict:
        with open(self.path_for(name), "r", encoding="utf-8") as f:
            return json.load(f)

    def read_csv(self, name: str) -> List[dict]:
        with open(self.path_for(name), "r", encoding="utf-8", newline="") as f:
            return list(csv.DictReader(f))

    def file_exists(self, name: str) -> bool:
        """
        Check if an output file exists.

        Returns:
            True if file exists, False otherwise
        """
        return self.path_for(name).exists()
