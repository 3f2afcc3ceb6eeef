"""Validation of emitted JSON documents against the schemas in ``src/contracts``."""
import json
from functools import lru_cache
from pathlib import Path
from typing import Any

import jsonschema

from ..domain.errors import InvariantViolation

CONTRACTS_DIR = Path(__file__).resolve().parent.parent / "contracts"


@lru_cache()
def load_contract(name: str) -> dict:
    """Schema ``<name>_format.json``."""
    path = CONTRACTS_DIR / f"{name}_format.json"
    if not path.exists():
        raise FileNotFoundError(f"Contract not found: {path}")
    return json.loads(path.read_text(encoding="utf-8"))


def validate_payload(name: str, payload: Any) -> None:
    """Raise InvariantViolation when ``payload`` breaks its output contract."""
    try:
        jsonschema.validate(payload, load_contract(name))
    except jsonschema.ValidationError as e:
        location = "/".join(str(part) for part in e.absolute_path) or "<root>"
        raise InvariantViolation(f"{name} output violates its contract at {location}: {e.message}") from None
