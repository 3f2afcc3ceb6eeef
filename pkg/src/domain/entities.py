"""Domain entities for the STIRAP pointer-chain quantum computer."""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from .errors import (
    CircuitValidationError,
    DimensionError,
    NonUnitaryError,
    ParameterRangeError,
)

logger = logging.getLogger(__name__)

UNITARY_TOL = 1e-12
HERMITIAN_TOL = 1e-12
AXIS_NORM_TOL = 1e-12
# Below this M/J ratio the dark state carries visible interior amplitude.
STRONG_COUPLING_RATIO = 5.0


class GateKind(Enum):
    """Gate kinds understood by the compiler (values are DSL names)."""
    HADAMARD = "h"
    PI_OVER_8 = "t"
    ROTATION = "rot"
    CNOT = "cnot"
    CUSTOM = "custom"


GATE_ARITY = {
    GateKind.HADAMARD: (1,),
    GateKind.PI_OVER_8: (1,),
    GateKind.ROTATION: (1,),
    GateKind.CNOT: (2,),
    GateKind.CUSTOM: (1, 2),
}


def unitarity_defect(matrix: np.ndarray) -> float:
    """Max-abs entry of U†U - I."""
    identity = np.eye(matrix.shape[0])
    return float(np.max(np.abs(matrix.conj().T @ matrix - identity)))


@dataclass(frozen=True, eq=False)
class Gate:
    """Single gate U_i of the circuit.

    For two-target gates the local basis index is ``b(targets[0]) + 2*b(targets[1])``;
    for CNOT ``targets = (control, target)``.
    """
    kind: GateKind
    targets: Tuple[int, ...]
    axis: Optional[Tuple[float, float, float]] = None   # rotation only
    angle: Optional[float] = None                        # radians, rotation only
    matrix: Optional[np.ndarray] = None                  # custom only, 2^k x 2^k

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        if len(self.targets) not in GATE_ARITY[self.kind]:
            raise CircuitValidationError(
                f"gate '{self.kind.value}' takes {' or '.join(map(str, GATE_ARITY[self.kind]))} "
                f"target(s), got {len(self.targets)}"
            )
        if len(set(self.targets)) != len(self.targets):
            raise CircuitValidationError(f"gate '{self.kind.value}' has repeated targets {self.targets}")
        if any(t < 0 for t in self.targets):
            raise CircuitValidationError(f"negative qubit index in {self.targets}")

        if self.kind is GateKind.ROTATION:
            if self.axis is None or self.angle is None:
                raise CircuitValidationError("rotation gate needs an axis and an angle")
            axis = tuple(float(c) for c in self.axis)
            if len(axis) != 3:
                raise CircuitValidationError(f"rotation axis must have 3 components, got {len(axis)}")
            if not all(math.isfinite(c) for c in axis):
                raise CircuitValidationError(f"rotation axis {axis} has non-finite components")
            if not math.isfinite(float(self.angle)):
                raise CircuitValidationError(f"rotation angle must be finite, got {self.angle!r}")
            norm = math.sqrt(sum(c * c for c in axis))
            if not abs(norm - 1.0) <= AXIS_NORM_TOL:
                raise CircuitValidationError(f"rotation axis {axis} is not a unit vector (norm {norm!r})")
            object.__setattr__(self, "axis", axis)
            object.__setattr__(self, "angle", float(self.angle))

        if self.kind is GateKind.CUSTOM:
            if self.matrix is None:
                raise CircuitValidationError("custom gate needs an explicit matrix")
            matrix = np.array(self.matrix, dtype=complex)
            dim = 2 ** len(self.targets)
            if matrix.shape != (dim, dim):
                raise CircuitValidationError(
                    f"custom gate on {len(self.targets)} qubit(s) needs a {dim}x{dim} matrix, "
                    f"got shape {matrix.shape}"
                )
            if not np.all(np.isfinite(matrix)):
                raise CircuitValidationError("custom gate matrix has non-finite entries")
            defect = unitarity_defect(matrix)
            if not defect <= UNITARY_TOL:
                raise NonUnitaryError(f"custom gate matrix is not unitary (defect {defect:.3e})")
            matrix.setflags(write=False)
            object.__setattr__(self, "matrix", matrix)

    def __eq__(self, other):
        if not isinstance(other, Gate):
            return NotImplemented
        if (self.kind, self.targets, self.axis, self.angle) != (other.kind, other.targets, other.axis, other.angle):
            return False
        if self.matrix is None or other.matrix is None:
            return self.matrix is None and other.matrix is None
        return bool(np.array_equal(self.matrix, other.matrix))

    __hash__ = None

    def __repr__(self):
        args = ",".join(str(t) for t in self.targets)
        if self.kind is GateKind.ROTATION:
            return f"R[{self.axis},{self.angle}]({args})"
        return f"{self.kind.name}({args})"


@dataclass(frozen=True)
class Circuit:
    """Ordered gate list acting on an N-qubit register; gate i (1-based) is U_i."""
    register_width: int
    gates: Tuple[Gate, ...]

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.register_width < 1:
            raise CircuitValidationError(f"register width must be positive, got {self.register_width}")
        for position, gate in enumerate(self.gates, start=1):
            for target in gate.targets:
                if target >= self.register_width:
                    raise CircuitValidationError(
                        f"gate {position} targets qubit {target} but the register has "
                        f"{self.register_width} qubit(s)"
                    )
        if len(self.gates) < 2:
            raise CircuitValidationError(f"circuit needs at least 2 gates, got {len(self.gates)}")
        if len(self.gates) % 2:
            raise CircuitValidationError(f"n must be even, got n={len(self.gates)}")

    @property
    def num_gates(self) -> int:
        return len(self.gates)

    @property
    def register_dim(self) -> int:
        return 2 ** self.register_width


@dataclass(frozen=True, eq=False)
class HermitianParts:
    """Symmetric H^s and antisymmetric H^a parts of a gate, U = H^s - i H^a."""
    symmetric: np.ndarray
    antisymmetric: np.ndarray


@dataclass(frozen=True)
class PointerModelSpec:
    """Pointer-chain model: circuit plus couplings (hbar = 1, energies in units of J)."""
    circuit: Circuit
    J: float = 1.0
    M: float = 10.0

    def __post_init__(self):
        if not (self.J > 0 and math.isfinite(self.J)):
            raise ParameterRangeError(f"J must be positive and finite, got {self.J}")
        if not (self.M > 0 and math.isfinite(self.M)):
            raise ParameterRangeError(f"M must be positive and finite, got {self.M}")
        if self.M / self.J < STRONG_COUPLING_RATIO:
            logger.warning(
                f"M/J = {self.M / self.J:.3g} < {STRONG_COUPLING_RATIO}: "
                f"interior sites will carry non-negligible dark-state amplitude"
            )

    @property
    def num_gates(self) -> int:
        return self.circuit.num_gates

    @property
    def register_width(self) -> int:
        return self.circuit.register_width

    @property
    def register_dim(self) -> int:
        return self.circuit.register_dim

    @property
    def num_sites(self) -> int:
        """Counter sites 0..n+2."""
        return self.circuit.num_gates + 3

    @property
    def dimension(self) -> int:
        return self.num_sites * self.register_dim

    @property
    def max_coupling(self) -> float:
        return max(self.J, self.M)


@dataclass(frozen=True, eq=False)
class PointerState:
    """Amplitudes on counter ⊗ register; composite index = site * 2^N + register index."""
    amplitudes: np.ndarray
    num_sites: int
    register_dim: int

    def __post_init__(self):
        amplitudes = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amplitudes.shape[0] != self.num_sites * self.register_dim:
            raise DimensionError(
                f"state has {amplitudes.shape[0]} amplitudes, expected "
                f"{self.num_sites} x {self.register_dim}"
            )
        if not np.all(np.isfinite(amplitudes)):
            raise ParameterRangeError("state has non-finite amplitudes")
        object.__setattr__(self, "amplitudes", amplitudes)

    def norm(self) -> float:
        """Euclidean norm of the amplitude vector."""
        return float(np.linalg.norm(self.amplitudes))

    def blocks(self) -> np.ndarray:
        """Amplitudes reshaped to (site, register index)."""
        return self.amplitudes.reshape(self.num_sites, self.register_dim)

    def register_block(self, site: int) -> np.ndarray:
        """Register amplitudes on one pointer site."""
        return self.blocks()[site]


@dataclass(frozen=True)
class PauliTerm:
    """Real-weighted Pauli string; unlisted spins/qubits carry the identity."""
    coefficient: float
    counter: Tuple[Tuple[int, str], ...] = ()
    register: Tuple[Tuple[int, str], ...] = ()

    @property
    def key(self) -> Tuple[Tuple[Tuple[int, str], ...], Tuple[Tuple[int, str], ...]]:
        return self.counter, self.register

    @property
    def weight(self) -> int:
        return len(self.counter) + len(self.register)


@dataclass(frozen=True)
class PauliTermSum:
    """Spin-model Hamiltonian over ``num_counter`` counter spins and ``register_width`` qubits."""
    num_counter: int
    register_width: int
    terms: Tuple[PauliTerm, ...] = ()

    @property
    def num_spins(self) -> int:
        return self.num_counter + self.register_width

    def max_weight(self) -> int:
        return max((term.weight for term in self.terms), default=0)

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)


@dataclass(frozen=True, eq=False)
class SpectrumResult:
    """Full Hermitian eigen-decomposition with zero-space split-off."""
    eigenvalues: np.ndarray          # ascending
    eigenvectors: np.ndarray         # orthonormal columns
    zero_space: np.ndarray           # columns with |λ| < zero_tol
    gap: Optional[float]             # None when every eigenvalue is zero
    zero_tol: float
    max_residual: float

    @property
    def zero_dimension(self) -> int:
        return int(self.zero_space.shape[1])


@dataclass(frozen=True)
class GapSample:
    n: int
    s: float
    gap: float


@dataclass(frozen=True)
class GapScanRow:
    n: int
    min_gap: float
    argmin_s: float
    effective_gap: float


@dataclass(frozen=True)
class GapScanResult:
    """Minimum gap per chain length and the fit gap ≈ prefactor · n^alpha."""
    rows: Tuple[GapScanRow, ...]
    samples: Tuple[GapSample, ...]
    alpha: float
    prefactor: float
    residual: float


class ScheduleShape(Enum):
    LINEAR = "linear"
    SMOOTHSTEP = "smoothstep"


@dataclass(frozen=True)
class Schedule:
    """Sweep s(t) from 0 to 1 over ``total_time`` (units 1/J)."""
    total_time: float
    shape: ScheduleShape = ScheduleShape.LINEAR

    def __post_init__(self):
        if not (self.total_time > 0 and math.isfinite(self.total_time)):
            raise ParameterRangeError(f"total time must be positive and finite, got {self.total_time}")
        object.__setattr__(self, "shape", ScheduleShape(self.shape))

    def s_at(self, t: float) -> float:
        x = min(max(t / self.total_time, 0.0), 1.0)
        if self.shape is ScheduleShape.SMOOTHSTEP:
            return 3 * x ** 2 - 2 * x ** 3
        return x


@dataclass(frozen=True)
class TraceRow:
    t: float
    s: float
    populations: Tuple[float, ...]
    fidelity_to_dark: float


@dataclass(frozen=True)
class EvolveReport:
    """Outcome of one adiabatic sweep."""
    total_time: float
    num_steps: int
    dt: float
    final_fidelity: float
    norm_drift: float
    max_interior_population: float
    output_site_population: float
    register_fidelity: float
    min_dark_overlap: float
    site_population_trace: Tuple[TraceRow, ...] = field(default=(), repr=False)


@dataclass(frozen=True)
class SweepRow:
    total_time: float
    final_fidelity: float
    max_interior_population: float


class AuditStatus(Enum):
    MATCH = "match"
    MISMATCH = "mismatch"
    MATCH_AFTER_RESCALE = "match_after_rescale"


@dataclass(frozen=True)
class AuditRow:
    """Published gate-table entry compared against the direct evaluation."""
    entry: str                       # e.g. "cnot.symmetric"
    status: AuditStatus
    deviation: float                 # max-abs(published - computed)
    rescale: Optional[float] = None  # factor applied to the published entry
    rescaled_deviation: Optional[float] = None
    note: str = ""


@dataclass(frozen=True)
class CheckResult:
    """One verified invariant."""
    group: str
    name: str
    passed: bool
    detail: str = ""
