"""Shared fixtures."""
from pathlib import Path

import numpy as np
import pytest

from src.config.settings import Settings
from src.domain.entities import PointerModelSpec
from src.repository.mock_repository import InMemoryResultRepository
from src.service.circuit_service import identity_family
from src.validation.circuit_parser import parse_circuit

CORPUS_DIR = Path(__file__).resolve().parent.parent / "circuits"


@pytest.fixture
def settings():
    return Settings(_env_file=None)


@pytest.fixture
def repository():
    return InMemoryResultRepository()


@pytest.fixture
def hadamard_pair():
    return parse_circuit("qubits 1\ngate h 0\ngate h 0\n")


@pytest.fixture
def hadamard_t():
    return parse_circuit("qubits 1\ngate h 0\ngate t 0\ngate h 0\ngate t 0\n")


@pytest.fixture
def bell_pair():
    return parse_circuit("qubits 2\ngate h 0\ngate cnot 0 1\n")


@pytest.fixture
def identity_spec():
    """n = 2 identity gates, J = 1, M = 10."""
    return PointerModelSpec(identity_family(1)(2), 1.0, 10.0)


@pytest.fixture
def phi0():
    return np.array([1.0, 0.0], dtype=complex)


def corpus_paths():
    return sorted(CORPUS_DIR.glob("*.qc"))
