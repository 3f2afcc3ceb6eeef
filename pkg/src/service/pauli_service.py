"""Pauli-string algebra on little-endian qubit registers.

Qubit ``q`` is bit ``q`` of the basis index, so a string over ``m`` qubits is the
Kronecker product ``P_{m-1} ⊗ ... ⊗ P_0``.
"""
from functools import reduce
from itertools import product
from typing import Dict, Mapping, Tuple

import numpy as np
import scipy.sparse as sp

from ..domain.errors import DimensionError, InvariantViolation

PAULI_LETTERS = ("I", "X", "Y", "Z")

PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# Coefficients smaller than this are dropped from expansions.
COEFFICIENT_CUTOFF = 1e-14

LetterString = Tuple[Tuple[int, str], ...]


def normalize_letters(letters: Mapping[int, str]) -> LetterString:
    """Sorted (index, letter) pairs with identities removed."""
    pairs = []
    for index, letter in sorted(letters.items()):
        letter = letter.upper()
        if letter not in PAULI_MATRICES:
            raise ValueError(f"unknown Pauli letter {letter!r}")
        if letter != "I":
            pairs.append((int(index), letter))
    return tuple(pairs)


def pauli_string_matrix(letters: Mapping[int, str], num_qubits: int) -> sp.csr_matrix:
    """Sparse matrix of a Pauli string over ``num_qubits`` qubits."""
    for index in letters:
        if not 0 <= index < num_qubits:
            raise DimensionError(f"qubit {index} outside a {num_qubits}-qubit space")
    factors = [sp.csr_matrix(PAULI_MATRICES[letters.get(q, "I").upper()])
               for q in reversed(range(num_qubits))]
    if not factors:
        return sp.csr_matrix(np.ones((1, 1), dtype=complex))
    return reduce(lambda a, b: sp.kron(a, b, format="csr"), factors)


def pauli_decompose(matrix: np.ndarray, tol: float = 1e-12) -> Dict[LetterString, float]:
    """Expand a Hermitian 2^m x 2^m matrix in the Pauli basis.

    Coefficients are ``Tr(P·H) / 2^m``; they must be real for Hermitian input.
    Keys are letter strings over local qubits 0..m-1.
    """
    dim = matrix.shape[0]
    num_qubits = dim.bit_length() - 1
    if matrix.shape != (dim, dim) or 2 ** num_qubits != dim:
        raise DimensionError(f"expected a 2^m x 2^m matrix, got shape {matrix.shape}")

    coefficients: Dict[LetterString, float] = {}
    for labels in product(PAULI_LETTERS, repeat=num_qubits):
        letters = {q: labels[q] for q in range(num_qubits)}
        string = pauli_string_matrix(letters, num_qubits).toarray()
        value = np.trace(string @ matrix) / dim
        if abs(value.imag) > tol:
            raise InvariantViolation(
                f"complex Pauli coefficient {value} for {''.join(labels)}: matrix is not Hermitian"
            )
        if abs(value.real) > COEFFICIENT_CUTOFF:
            coefficients[normalize_letters(letters)] = float(value.real)
    return coefficients


def pauli_recompose(coefficients: Mapping[LetterString, float], num_qubits: int) -> np.ndarray:
    """Dense matrix of a weighted sum of Pauli strings."""
    dim = 2 ** num_qubits
    result = np.zeros((dim, dim), dtype=complex)
    for string, coefficient in coefficients.items():
        result += coefficient * pauli_string_matrix(dict(string), num_qubits).toarray()
    return result


def format_letters(string: LetterString) -> str:
    """Human-readable label like ``Z0 X1`` (``I`` for the identity)."""
    return " ".join(f"{letter}{index}" for index, letter in string) or "I"
