"""In-memory result repository for testing."""
import json
import logging
from typing import Any, Dict, List, Sequence

from ..domain.errors import OutputExistsError
from .file_repository import render_csv, render_json
from .interface import ResultRepositoryInterface

logger = logging.getLogger(__name__)


class InMemoryResultRepository(ResultRepositoryInterface):
    """Keeps rendered documents in memory, with the same overwrite rule as files."""

    def __init__(self, force: bool = False):
        self.force = force
        self.documents: Dict[str, str] = {}

    def _claim(self, name: str) -> None:
        if name in self.documents and not self.force:
            raise OutputExistsError(f"{name} already exists (use --force to overwrite)")

    def exists(self, name: str) -> bool:
        return name in self.documents

    def save_json(self, name: str, payload: Any) -> str:
        self._claim(name)
        self.documents[name] = render_json(payload)
        logger.debug(f"Mock: saved {name}")
        return name

    def save_csv(self, name: str, header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
        self._claim(name)
        self.documents[name] = render_csv(header, rows)
        logger.debug(f"Mock: saved {name} ({len(rows)} rows)")
        return name

    def load_json(self, name: str) -> Any:
        return json.loads(self.documents[name])

    def load_csv_rows(self, name: str) -> List[List[str]]:
        return [line.split(",") for line in self.documents[name].splitlines()]
