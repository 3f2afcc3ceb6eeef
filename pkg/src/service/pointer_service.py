"""Pointer-chain Hamiltonian H(s), state constructors and the exact dark state."""
import logging
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from scipy.sparse.linalg import LinearOperator

from ..domain.entities import UNITARY_TOL, PointerModelSpec, PointerState
from ..domain.errors import DimensionError, ParameterRangeError
from .circuit_service import circuit_product, gate_unitaries, partial_products

logger = logging.getLogger(__name__)


def check_s(s: float) -> float:
    """Reject (never clamp) interpolation parameters outside [0, 1]."""
    s = float(s)
    if not 0.0 <= s <= 1.0:
        raise ParameterRangeError(f"s must lie in [0, 1], got {s}")
    return s


@dataclass(frozen=True, eq=False)
class Bond:
    """Hopping between counter sites ``left`` and ``left + 1``.

    Forward hop left -> left+1 applies ``strength * block``, the backward hop applies
    ``strength * block†``.
    """
    left: int
    strength: float
    block: np.ndarray


@dataclass(frozen=True, eq=False)
class PointerHamiltonian:
    """Block-tridiagonal H(s) with dense and matrix-free views."""
    num_sites: int
    register_dim: int
    bonds: Tuple[Bond, ...]

    @property
    def dimension(self) -> int:
        return self.num_sites * self.register_dim

    def apply(self, vector: np.ndarray) -> np.ndarray:
        """H·v without assembling H."""
        vector = np.asarray(vector, dtype=complex)
        if vector.shape[0] != self.dimension:
            raise DimensionError(f"vector has dimension {vector.shape[0]}, expected {self.dimension}")
        shape = vector.shape
        blocks = vector.reshape(self.num_sites, self.register_dim, -1)
        out = np.zeros_like(blocks)
        for bond in self.bonds:
            i = bond.left
            out[i + 1] += bond.strength * (bond.block @ blocks[i])
            out[i] += bond.strength * (bond.block.conj().T @ blocks[i + 1])
        return out.reshape(shape)

    def to_dense(self) -> np.ndarray:
        """Dense ``(n + 3) * 2^N`` square matrix."""
        d = self.register_dim
        matrix = np.zeros((self.dimension, self.dimension), dtype=complex)
        for bond in self.bonds:
            i = bond.left
            forward = bond.strength * bond.block
            matrix[(i + 1) * d:(i + 2) * d, i * d:(i + 1) * d] += forward
            matrix[i * d:(i + 1) * d, (i + 1) * d:(i + 2) * d] += forward.conj().T
        return matrix

    def as_linear_operator(self) -> LinearOperator:
        """Matrix-free operator backed by ``apply``."""
        return LinearOperator(
            (self.dimension, self.dimension), matvec=self.apply, rmatvec=self.apply, dtype=complex
        )


def build_h(spec: PointerModelSpec, s: float) -> PointerHamiltonian:
    """H(s) = (1-s) H_init + s H_final.

    Bond (0,1) carries s·J, bond (n+1,n+2) carries (1-s)·J, internal bonds (i,i+1)
    for i = 1..n carry M with U_i on the forward hop. No on-site terms.
    """
    s = check_s(s)
    n = spec.num_gates
    identity = np.eye(spec.register_dim, dtype=complex)
    bonds: List[Bond] = [Bond(0, s * spec.J, identity)]
    for i, unitary in enumerate(gate_unitaries(spec.circuit), start=1):
        bonds.append(Bond(i, spec.M, unitary))
    bonds.append(Bond(n + 1, (1.0 - s) * spec.J, identity))
    return PointerHamiltonian(spec.num_sites, spec.register_dim, tuple(bonds))


def chiral_operator(spec: PointerModelSpec) -> np.ndarray:
    """diag((-1)^site ⊗ identity); anticommutes with every H(s)."""
    signs = np.repeat((-1.0) ** np.arange(spec.num_sites), spec.register_dim)
    return np.diag(signs)


def _check_register_vector(spec: PointerModelSpec, phi: np.ndarray, normalized: bool) -> np.ndarray:
    phi = np.asarray(phi, dtype=complex).reshape(-1)
    if phi.shape[0] != spec.register_dim:
        raise DimensionError(f"register vector has dimension {phi.shape[0]}, expected {spec.register_dim}")
    if not np.all(np.isfinite(phi)):
        raise ParameterRangeError("register vector has non-finite entries")
    norm = np.linalg.norm(phi)
    if normalized and not abs(norm - 1.0) <= UNITARY_TOL:
        raise ParameterRangeError(f"register vector must be normalized, has norm {norm!r}")
    if norm == 0:
        raise ParameterRangeError("register vector is zero")
    return phi


def register_basis_vector(spec: PointerModelSpec, index: int) -> np.ndarray:
    """Register basis vector |index>, little-endian in qubit order."""
    if not 0 <= index < spec.register_dim:
        raise DimensionError(f"register basis index {index} out of range 0..{spec.register_dim - 1}")
    phi = np.zeros(spec.register_dim, dtype=complex)
    phi[index] = 1.0
    return phi


def _state_on_site(spec: PointerModelSpec, site: int, register: np.ndarray) -> PointerState:
    amplitudes = np.zeros((spec.num_sites, spec.register_dim), dtype=complex)
    amplitudes[site] = register
    return PointerState(amplitudes.reshape(-1), spec.num_sites, spec.register_dim)


def initial_state(spec: PointerModelSpec, phi: np.ndarray) -> PointerState:
    """|0>_c |φ>_r."""
    return _state_on_site(spec, 0, _check_register_vector(spec, phi, normalized=True))


def target_state(spec: PointerModelSpec, phi: np.ndarray) -> PointerState:
    """|n+2>_c U_n···U_1 |φ>_r."""
    phi = _check_register_vector(spec, phi, normalized=True)
    return _state_on_site(spec, spec.num_sites - 1, circuit_product(spec.circuit) @ phi)


def analytic_dark_state(spec: PointerModelSpec, s: float, phi: np.ndarray) -> PointerState:
    """Exact zero mode of H(s) seeded by φ (unnormalized).

    Site 0 carries (1-s)J φ, site 2i carries (-1)^i s(1-s)(J²/M) U_{2i-1}···U_1 φ and
    site n+2 carries (-1)^{n/2+1} sJ U_n···U_1 φ; odd sites are empty. The register
    factor on each even site is the product over the bonds traversed to reach it.
    """
    s = check_s(s)
    phi = _check_register_vector(spec, phi, normalized=False)
    n = spec.num_gates
    if n % 2:
        raise ParameterRangeError(f"n must be even, got n={n}")

    products = partial_products(spec.circuit)
    J, M = spec.J, spec.M
    amplitudes = np.zeros((spec.num_sites, spec.register_dim), dtype=complex)
    amplitudes[0] = (1.0 - s) * J * phi
    for i in range(1, n // 2 + 1):
        amplitudes[2 * i] = (-1) ** i * s * (1.0 - s) * J ** 2 / M * (products[2 * i - 1] @ phi)
    amplitudes[n + 2] = (-1) ** (n // 2 + 1) * s * J * (products[n] @ phi)
    return PointerState(amplitudes.reshape(-1), spec.num_sites, spec.register_dim)


def site_populations(state: PointerState) -> np.ndarray:
    """Normalized probability of each counter site (summed over the register)."""
    norm = state.norm()
    if norm == 0:
        raise ParameterRangeError("cannot take populations of the zero vector")
    weights = np.sum(np.abs(state.blocks()) ** 2, axis=1)
    return weights / norm ** 2


def interior_population(state: PointerState) -> float:
    """Total population on the intermediate sites 1..n+1."""
    return float(np.sum(site_populations(state)[1:-1]))


def kernel_residual(spec: PointerModelSpec, s: float, state: PointerState) -> float:
    """‖H(s)·v‖ / ‖v‖."""
    norm = state.norm()
    if norm == 0:
        raise ParameterRangeError("kernel residual of the zero vector")
    return float(np.linalg.norm(build_h(spec, s).apply(state.amplitudes)) / norm)
