import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from src.domain.errors import DimensionError, InvariantViolation
from src.service.circuit_service import CNOT, HADAMARD
from src.service.pauli_service import (
    format_letters,
    normalize_letters,
    pauli_decompose,
    pauli_recompose,
    pauli_string_matrix,
)


def test_string_matrix_little_endian():
    # X on qubit 0 flips the least significant bit
    matrix = pauli_string_matrix({0: "X"}, 2).toarray()
    assert matrix[1, 0] == 1 and matrix[0, 1] == 1
    assert matrix[2, 0] == 0


def test_string_matrix_rejects_out_of_range():
    with pytest.raises(DimensionError):
        pauli_string_matrix({3: "Z"}, 2)


def test_normalize_drops_identities():
    assert normalize_letters({2: "z", 0: "I", 1: "X"}) == ((1, "X"), (2, "Z"))
    assert format_letters(((1, "X"), (2, "Z"))) == "X1 Z2"
    assert format_letters(()) == "I"


def test_hadamard_expansion():
    coefficients = pauli_decompose(HADAMARD)
    assert set(coefficients) == {((0, "X"),), ((0, "Z"),)}
    for value in coefficients.values():
        assert value == pytest.approx(1 / math.sqrt(2), abs=1e-15)


def test_cnot_expansion():
    coefficients = pauli_decompose(CNOT)
    expected = {(): 0.5, ((0, "Z"),): 0.5, ((1, "X"),): 0.5, ((0, "Z"), (1, "X")): -0.5}
    assert coefficients.keys() == expected.keys()
    for key, value in expected.items():
        assert coefficients[key] == pytest.approx(value, abs=1e-15)


def test_random_hermitian_round_trip():
    rng = np.random.default_rng(5)
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    hermitian = a + a.conj().T
    assert_allclose(pauli_recompose(pauli_decompose(hermitian), 2), hermitian, atol=1e-12)


def test_decompose_rejects_non_hermitian():
    with pytest.raises(InvariantViolation):
        pauli_decompose(np.array([[0, 1], [0, 0]], dtype=complex))


def test_decompose_rejects_bad_shape():
    with pytest.raises(DimensionError):
        pauli_decompose(np.eye(3))
