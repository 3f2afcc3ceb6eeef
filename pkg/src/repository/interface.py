"""Repository interfaces."""
from abc import ABC, abstractmethod
from typing import Any, Sequence


class ResultRepositoryInterface(ABC):
    """Interface for storing analysis results (one file per analysis)."""

    @abstractmethod
    def exists(self, name: str) -> bool:
        pass

    @abstractmethod
    def save_json(self, name: str, payload: Any) -> str:
        """Store a JSON document. Returns its location."""
        pass

    @abstractmethod
    def save_csv(self, name: str, header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
        """Store a CSV table. Returns its location."""
        pass
