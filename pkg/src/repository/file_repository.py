"""Flat-file result repository."""
import csv
import io
import json
import logging
import math
from pathlib import Path
from typing import Any, Sequence

from ..domain.errors import OutputExistsError
from .interface import ResultRepositoryInterface

logger = logging.getLogger(__name__)


def format_cell(value: Any) -> str:
    """Floats with 17 significant digits, everything else as str."""
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def render_csv(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(value) for value in row])
    return buffer.getvalue()


def _json_value(value: Any, depth: int) -> str:
    if value is None or isinstance(value, (bool, str)):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite float {value!r} is not JSON compliant")
        text = format_cell(value)
        # keep floats distinguishable from ints on reload
        return text if any(c in text for c in ".e") else text + ".0"
    if isinstance(value, int):
        return str(value)
    inner = "\n" + "  " * (depth + 1)
    outer = "\n" + "  " * depth
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = (
            f"{json.dumps(str(key), ensure_ascii=False)}: {_json_value(item, depth + 1)}"
            for key, item in value.items()
        )
        return "{" + inner + ("," + inner).join(items) + outer + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        items = (_json_value(item, depth + 1) for item in value)
        return "[" + inner + ("," + inner).join(items) + outer + "]"
    raise TypeError(f"object of type {type(value).__name__} is not JSON serializable")


def render_json(payload: Any) -> str:
    """Two-space indented JSON in producer key order, floats as in ``format_cell``."""
    return _json_value(payload, 0) + "\n"


class FileResultRepository(ResultRepositoryInterface):
    """Writes results under ``output_dir``; never overwrites unless ``force``."""

    def __init__(self, output_dir: Path, force: bool = False):
        self.output_dir = Path(output_dir)
        self.force = force

    def _path(self, name: str) -> Path:
        path = self.output_dir / name
        if path.exists() and not self.force:
            raise OutputExistsError(f"{path} already exists (use --force to overwrite)")
        self.output_dir.mkdir(parents=True, exist_ok=True)
        return path

    def exists(self, name: str) -> bool:
        return (self.output_dir / name).exists()

    def save_json(self, name: str, payload: Any) -> str:
        path = self._path(name)
        path.write_text(render_json(payload), encoding="utf-8")
        logger.info(f"Wrote {path}")
        return str(path)

    def save_csv(self, name: str, header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
        path = self._path(name)
        path.write_text(render_csv(header, rows), encoding="utf-8")
        logger.info(f"Wrote {path} ({len(rows)} rows)")
        return str(path)
