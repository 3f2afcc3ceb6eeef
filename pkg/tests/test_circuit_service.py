import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from src.domain.entities import Circuit, Gate, GateKind, unitarity_defect
from src.domain.errors import CircuitValidationError, NonUnitaryError
from src.service.circuit_service import (
    CNOT,
    HADAMARD,
    PI_OVER_8,
    circuit_product,
    embed_operator,
    gate_hermitian_parts,
    gate_unitary,
    identity_family,
    partial_products,
    random_rotation_family,
    rotation_matrix,
)

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)


def basis(index, dim):
    vector = np.zeros(dim, dtype=complex)
    vector[index] = 1.0
    return vector


@pytest.mark.parametrize("matrix", [HADAMARD, PI_OVER_8, CNOT])
def test_fixed_gates_unitary(matrix):
    assert unitarity_defect(matrix) < 1e-15


def test_rotation_about_z_by_pi():
    assert_allclose(rotation_matrix((0, 0, 1), math.pi), -1j * Z, atol=1e-15)


def test_embed_is_little_endian():
    full = embed_operator(X, (1,), 2)
    assert_allclose(full @ basis(0, 4), basis(2, 4))
    assert_allclose(full @ basis(1, 4), basis(3, 4))


def test_cnot_control_is_first_target():
    forward = gate_unitary(Gate(GateKind.CNOT, (0, 1)), 2)
    assert_allclose(forward @ basis(1, 4), basis(3, 4))
    assert_allclose(forward @ basis(2, 4), basis(2, 4))

    reverse = gate_unitary(Gate(GateKind.CNOT, (1, 0)), 2)
    assert_allclose(reverse @ basis(2, 4), basis(3, 4))
    assert_allclose(reverse @ basis(1, 4), basis(1, 4))


def test_product_applies_first_gate_first():
    circuit = Circuit(1, (Gate(GateKind.HADAMARD, (0,)), Gate(GateKind.PI_OVER_8, (0,))))
    assert_allclose(circuit_product(circuit), PI_OVER_8 @ HADAMARD, atol=1e-15)


def test_partial_products(hadamard_t):
    products = partial_products(hadamard_t)
    assert len(products) == 5
    assert_allclose(products[0], np.eye(2))
    assert_allclose(products[2], PI_OVER_8 @ HADAMARD, atol=1e-15)
    assert_allclose(products[-1], circuit_product(hadamard_t), atol=1e-15)


def test_hadamard_pair_is_identity(hadamard_pair):
    assert_allclose(circuit_product(hadamard_pair), np.eye(2), atol=1e-15)


def test_pi_over_8_parts():
    parts = gate_hermitian_parts(PI_OVER_8)
    assert_allclose(parts.symmetric, np.diag([1, 1 / math.sqrt(2)]), atol=1e-15)
    assert_allclose(parts.antisymmetric, np.diag([0, -1 / math.sqrt(2)]), atol=1e-15)


@pytest.mark.parametrize("matrix", [HADAMARD, CNOT])
def test_real_symmetric_gates_have_no_antisymmetric_part(matrix):
    parts = gate_hermitian_parts(matrix)
    assert np.max(np.abs(parts.antisymmetric)) == 0.0
    assert_allclose(parts.symmetric, matrix)


@pytest.mark.parametrize("axis,angle", [((1, 0, 0), 0.4), ((0, 0.6, 0.8), 2.0), ((0, 0, 1), 5.5)])
def test_rotation_parts(axis, angle):
    parts = gate_hermitian_parts(rotation_matrix(axis, angle))
    generator = axis[0] * X + axis[1] * Y + axis[2] * Z
    assert_allclose(parts.symmetric, math.cos(angle / 2) * np.eye(2), atol=1e-15)
    assert_allclose(parts.antisymmetric, math.sin(angle / 2) * generator, atol=1e-15)


def test_parts_reconstruct_gate():
    matrix = rotation_matrix((0.6, 0, -0.8), 1.3) @ HADAMARD
    parts = gate_hermitian_parts(matrix)
    assert np.max(np.abs(parts.symmetric - 1j * parts.antisymmetric - matrix)) < 1e-12


def test_hermitian_parts_reject_non_unitary():
    with pytest.raises(NonUnitaryError):
        gate_hermitian_parts(np.array([[1, 1], [0, 1]], dtype=complex))


def test_gate_invariants():
    with pytest.raises(CircuitValidationError):
        Gate(GateKind.CNOT, (1, 1))
    with pytest.raises(CircuitValidationError):
        Gate(GateKind.HADAMARD, (0, 1))
    with pytest.raises(CircuitValidationError):
        Gate(GateKind.ROTATION, (0,), axis=(1, 1, 0), angle=0.3)
    with pytest.raises(NonUnitaryError):
        Gate(GateKind.CUSTOM, (0,), matrix=np.array([[1, 0], [0, 2]]))
    with pytest.raises(CircuitValidationError, match="non-finite"):
        Gate(GateKind.CUSTOM, (0,), matrix=np.array([[np.nan, 0], [0, 1]]))
    with pytest.raises(CircuitValidationError, match="non-finite"):
        Gate(GateKind.ROTATION, (0,), axis=(np.nan, 0, 0), angle=1.0)
    with pytest.raises(CircuitValidationError, match="finite"):
        Gate(GateKind.ROTATION, (0,), axis=(0, 0, 1), angle=float("inf"))


def test_circuit_invariants():
    h = Gate(GateKind.HADAMARD, (0,))
    with pytest.raises(CircuitValidationError, match="n must be even"):
        Circuit(1, (h, h, h))
    with pytest.raises(CircuitValidationError):
        Circuit(1, (h, Gate(GateKind.HADAMARD, (1,))))


def test_identity_family():
    circuit = identity_family(2)(4)
    assert circuit.num_gates == 4
    assert [gate.targets for gate in circuit.gates] == [(0,), (1,), (0,), (1,)]
    assert_allclose(circuit_product(circuit), np.eye(4))


def test_random_rotation_family_is_seeded():
    first = random_rotation_family(11)(6)
    assert first == random_rotation_family(11)(6)
    assert first != random_rotation_family(12)(6)
    for gate in first.gates:
        assert abs(np.linalg.norm(gate.axis) - 1.0) <= 1e-12
        assert 0.0 <= gate.angle < 2 * math.pi
