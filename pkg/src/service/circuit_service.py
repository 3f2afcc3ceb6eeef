"""Gate matrices, register embedding and Hermitian decomposition of gates."""
import logging
import math
from typing import Callable, List, Sequence

import numpy as np

from ..domain.entities import (
    HERMITIAN_TOL,
    UNITARY_TOL,
    Circuit,
    Gate,
    GateKind,
    HermitianParts,
    unitarity_defect,
)
from ..domain.errors import CircuitValidationError, NonUnitaryError
from .pauli_service import PAULI_MATRICES

logger = logging.getLogger(__name__)

_SQRT2_INV = 1 / math.sqrt(2)

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT2_INV
# π/8 gate taken as the standard T = diag(1, e^{iπ/4}).
PI_OVER_8 = np.array([[1, 0], [0, np.exp(1j * math.pi / 4)]], dtype=complex)
# Local basis b(control) + 2*b(target): swaps local indices 1 and 3.
CNOT = np.array(
    [[1, 0, 0, 0],
     [0, 0, 0, 1],
     [0, 0, 1, 0],
     [0, 1, 0, 0]],
    dtype=complex,
)


def rotation_matrix(axis: Sequence[float], angle: float) -> np.ndarray:
    """R_n(θ) = exp(-iθ n·σ/2) = cos(θ/2) I - i sin(θ/2) n·σ."""
    nx, ny, nz = axis
    generator = nx * PAULI_MATRICES["X"] + ny * PAULI_MATRICES["Y"] + nz * PAULI_MATRICES["Z"]
    return math.cos(angle / 2) * PAULI_MATRICES["I"] - 1j * math.sin(angle / 2) * generator


def gate_local_matrix(gate: Gate) -> np.ndarray:
    """Gate matrix on its own targets (2^k x 2^k)."""
    if gate.kind is GateKind.HADAMARD:
        return HADAMARD.copy()
    if gate.kind is GateKind.PI_OVER_8:
        return PI_OVER_8.copy()
    if gate.kind is GateKind.ROTATION:
        return rotation_matrix(gate.axis, gate.angle)
    if gate.kind is GateKind.CNOT:
        return CNOT.copy()
    return np.array(gate.matrix, dtype=complex)


def embed_operator(local: np.ndarray, targets: Sequence[int], register_width: int) -> np.ndarray:
    """Lift a k-qubit operator on ``targets`` to the full little-endian register.

    Local index bit j corresponds to register qubit ``targets[j]``.
    """
    k = len(targets)
    dim = 2 ** register_width
    if local.shape != (2 ** k, 2 ** k):
        raise CircuitValidationError(f"operator shape {local.shape} does not match {k} target(s)")
    for target in targets:
        if not 0 <= target < register_width:
            raise CircuitValidationError(
                f"target qubit {target} out of range for a {register_width}-qubit register"
            )

    target_mask = sum(1 << t for t in targets)
    full = np.zeros((dim, dim), dtype=complex)
    for column in range(dim):
        rest = column & ~target_mask
        local_column = sum(((column >> t) & 1) << j for j, t in enumerate(targets))
        for local_row in range(2 ** k):
            row = rest | sum(((local_row >> j) & 1) << t for j, t in enumerate(targets))
            full[row, column] = local[local_row, local_column]
    return full


def gate_unitary(gate: Gate, register_width: int) -> np.ndarray:
    """U_i acting on its targets and as the identity on the rest of the register."""
    unitary = embed_operator(gate_local_matrix(gate), gate.targets, register_width)
    defect = unitarity_defect(unitary)
    if not defect <= UNITARY_TOL:
        raise NonUnitaryError(f"gate {gate!r} is not unitary (defect {defect:.3e})")
    return unitary


def gate_unitaries(circuit: Circuit) -> List[np.ndarray]:
    """[U_1, ..., U_n] on the full register."""
    return [gate_unitary(gate, circuit.register_width) for gate in circuit.gates]


def circuit_product(circuit: Circuit) -> np.ndarray:
    """U_n ··· U_2 U_1 (gate 1 applied first)."""
    product = np.eye(circuit.register_dim, dtype=complex)
    for unitary in gate_unitaries(circuit):
        product = unitary @ product
    return product


def partial_products(circuit: Circuit) -> List[np.ndarray]:
    """[I, U_1, U_2 U_1, ..., U_n ··· U_1]; entry k is the product of the first k gates."""
    products = [np.eye(circuit.register_dim, dtype=complex)]
    for unitary in gate_unitaries(circuit):
        products.append(unitary @ products[-1])
    return products


def gate_hermitian_parts(unitary: np.ndarray) -> HermitianParts:
    """H^s = (U + U†)/2, H^a = (i/2)(U - U†), so that U = H^s - i H^a."""
    unitary = np.asarray(unitary, dtype=complex)
    defect = unitarity_defect(unitary)
    if not defect <= UNITARY_TOL:
        raise NonUnitaryError(f"matrix is not unitary (defect {defect:.3e})")

    adjoint = unitary.conj().T
    symmetric = 0.5 * (unitary + adjoint)
    antisymmetric = 0.5j * (unitary - adjoint)

    for name, part in (("symmetric", symmetric), ("antisymmetric", antisymmetric)):
        if not np.max(np.abs(part - part.conj().T)) <= HERMITIAN_TOL:
            raise NonUnitaryError(f"{name} part is not Hermitian")
    return HermitianParts(symmetric=symmetric, antisymmetric=antisymmetric)


def identity_gate(qubit: int = 0) -> Gate:
    """Zero-angle rotation, exactly the identity."""
    return Gate(GateKind.ROTATION, (qubit,), axis=(0.0, 0.0, 1.0), angle=0.0)


def identity_family(register_width: int = 1) -> Callable[[int], Circuit]:
    """n -> circuit of n identity gates (canonical gap-scaling benchmark)."""
    def build(n: int) -> Circuit:
        return Circuit(register_width, tuple(identity_gate(i % register_width) for i in range(n)))
    return build


def random_rotation_gate(rng: np.random.Generator, qubit: int) -> Gate:
    """Axis uniform on the sphere from two uniform deviates, angle uniform in [0, 2π)."""
    u, v = rng.random(2)
    cos_polar = 2.0 * u - 1.0
    sin_polar = math.sqrt(max(0.0, 1.0 - cos_polar ** 2))
    azimuth = 2.0 * math.pi * v
    axis = np.array([sin_polar * math.cos(azimuth), sin_polar * math.sin(azimuth), cos_polar])
    axis = axis / np.linalg.norm(axis)
    angle = 2.0 * math.pi * rng.random()
    return Gate(GateKind.ROTATION, (qubit,), axis=tuple(float(c) for c in axis), angle=float(angle))


def random_rotation_family(seed: int, register_width: int = 1) -> Callable[[int], Circuit]:
    """n -> circuit of n random single-qubit rotations, reproducible per (seed, n)."""
    def build(n: int) -> Circuit:
        rng = np.random.default_rng([seed, n])
        return Circuit(
            register_width,
            tuple(random_rotation_gate(rng, i % register_width) for i in range(n)),
        )
    return build
