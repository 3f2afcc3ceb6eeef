"""Invariant suite run by ``stirap verify`` at desk scale."""
import logging
from collections import OrderedDict
from pathlib import Path
from typing import Callable, Dict, List, Mapping, Tuple

import numpy as np

from ..config.settings import Settings
from ..domain.entities import AuditStatus, CheckResult, Circuit, PointerModelSpec, Schedule
from ..domain.errors import StirapError
from ..validation.circuit_parser import parse_circuit, serialize_circuit
from .circuit_service import (
    CNOT,
    HADAMARD,
    circuit_product,
    gate_hermitian_parts,
    gate_local_matrix,
    identity_family,
    random_rotation_family,
)
from .evolve_service import fidelity, propagate
from .pointer_service import (
    analytic_dark_state,
    build_h,
    chiral_operator,
    initial_state,
    interior_population,
    register_basis_vector,
    target_state,
)
from .spectral_service import dark_space_deficit, gap_at, pointer_spectrum, symmetry_defect
from .spin_service import (
    build_spin_h,
    excitation_defect,
    gate_table_audit,
    restrict_to_sector,
    restrict_to_single_excitation,
    spin_matrix,
)

logger = logging.getLogger(__name__)

S_SAMPLES = [round(0.1 * k, 10) for k in range(11)]
SECTOR_S_SAMPLES = [0.0, 0.3, 0.7, 1.0]
EXPECTED_AUDIT = {
    "hadamard.symmetric": AuditStatus.MATCH,
    "hadamard.antisymmetric": AuditStatus.MATCH,
    "pi_over_8.symmetric": AuditStatus.MISMATCH,
    "pi_over_8.antisymmetric": AuditStatus.MISMATCH,
    "rotation.symmetric": AuditStatus.MATCH,
    "rotation.antisymmetric": AuditStatus.MATCH,
    "cnot.symmetric": AuditStatus.MATCH_AFTER_RESCALE,
    "cnot.antisymmetric": AuditStatus.MATCH,
}


def load_corpus(directory: Path) -> Dict[str, Circuit]:
    """Every ``*.qc`` file of a directory, by file name."""
    circuits = OrderedDict()
    for path in sorted(Path(directory).glob("*.qc")):
        circuits[path.name] = parse_circuit(path.read_text(encoding="utf-8"), source_name=str(path))
    return circuits


def _max_abs(matrix: np.ndarray) -> float:
    return float(np.max(np.abs(matrix))) if matrix.size else 0.0


class VerificationService:
    """Runs the invariant groups; a group fails when any of its checks fails."""

    def __init__(self, settings: Settings):
        self.settings = settings
        self.J = settings.default_j
        self.M = settings.default_m

    def run(self, circuits: Mapping[str, Circuit]) -> List[CheckResult]:
        groups: List[Tuple[str, Callable[[Mapping[str, Circuit]], List[CheckResult]]]] = [
            ("circuits", self.check_circuits),
            ("pointer_model", self.check_pointer_model),
            ("spin_model", self.check_spin_model),
            ("spectral", self.check_spectra),
            ("evolve", self.check_dynamics),
            ("audit", self.check_gate_table),
        ]
        results: List[CheckResult] = []
        for name, group in groups:
            try:
                results.extend(group(circuits))
            except StirapError as e:
                logger.error(f"Verification group {name} aborted: {e}")
                results.append(CheckResult(name, "aborted", False, str(e)))
        return results

    @staticmethod
    def failed_groups(results: List[CheckResult]) -> List[str]:
        return sorted({result.group for result in results if not result.passed})

    def _spec(self, circuit: Circuit) -> PointerModelSpec:
        return PointerModelSpec(circuit, self.J, self.M)

    def check_circuits(self, circuits: Mapping[str, Circuit]) -> List[CheckResult]:
        tol = self.settings.unitary_tol
        results = []
        for name, circuit in circuits.items():
            worst = 0.0
            for gate in circuit.gates:
                local = gate_local_matrix(gate)
                parts = gate_hermitian_parts(local)
                worst = max(
                    worst,
                    _max_abs(parts.symmetric - 1j * parts.antisymmetric - local),
                    _max_abs(parts.symmetric - parts.symmetric.conj().T),
                    _max_abs(parts.antisymmetric - parts.antisymmetric.conj().T),
                )
            results.append(CheckResult("circuits", f"{name}: U = H^s - iH^a", worst <= tol, f"{worst:.2e}"))

            product = circuit_product(circuit)
            defect = _max_abs(product.conj().T @ product - np.eye(circuit.register_dim))
            bound = circuit.num_gates * tol
            results.append(CheckResult("circuits", f"{name}: product unitary", defect <= bound, f"{defect:.2e}"))

            round_trip = parse_circuit(serialize_circuit(circuit)) == circuit
            results.append(CheckResult("circuits", f"{name}: serialize round trip", round_trip))

        for label, matrix in (("hadamard", HADAMARD), ("cnot", CNOT)):
            anti = _max_abs(gate_hermitian_parts(matrix).antisymmetric)
            results.append(CheckResult("circuits", f"{label}: H^a = 0", anti <= tol, f"{anti:.2e}"))
        return results

    def check_pointer_model(self, circuits: Mapping[str, Circuit]) -> List[CheckResult]:
        tol = self.settings.hermitian_tol
        results = []
        for name, circuit in circuits.items():
            spec = self._spec(circuit)
            kernel_bound = self.settings.kernel_tol_factor * spec.max_coupling
            chiral = chiral_operator(spec)
            h_start, h_end = build_h(spec, 0.0).to_dense(), build_h(spec, 1.0).to_dense()
            hermitian = chirality = linearity = residual = odd = 0.0
            for s in S_SAMPLES:
                matrix = build_h(spec, s).to_dense()
                hermitian = max(hermitian, _max_abs(matrix - matrix.conj().T))
                chirality = max(chirality, _max_abs(chiral @ matrix @ chiral + matrix))
                linearity = max(linearity, _max_abs(matrix - (h_start + s * (h_end - h_start))))
                for r in range(spec.register_dim):
                    dark = analytic_dark_state(spec, s, register_basis_vector(spec, r))
                    residual = max(residual, float(np.linalg.norm(matrix @ dark.amplitudes) / dark.norm()))
                    odd = max(odd, _max_abs(dark.blocks()[1::2]))
            results += [
                CheckResult("pointer_model", f"{name}: Hermitian", hermitian <= tol, f"{hermitian:.2e}"),
                CheckResult("pointer_model", f"{name}: chiral symmetry", chirality == 0.0, f"{chirality:.2e}"),
                CheckResult("pointer_model", f"{name}: linear in s", linearity <= tol, f"{linearity:.2e}"),
                CheckResult("pointer_model", f"{name}: dark state in kernel", residual <= kernel_bound, f"{residual:.2e}"),
                CheckResult("pointer_model", f"{name}: odd sites empty", odd == 0.0),
            ]

            phi = register_basis_vector(spec, 0)
            start = fidelity(analytic_dark_state(spec, 0.0, phi), initial_state(spec, phi))
            end = fidelity(analytic_dark_state(spec, 1.0, phi), target_state(spec, phi))
            results.append(CheckResult(
                "pointer_model", f"{name}: endpoints reproduce input/output",
                abs(start - 1) <= 1e-12 and abs(end - 1) <= 1e-12, f"{start:.15f}, {end:.15f}",
            ))

        base = identity_family(1)(2)
        phi = np.array([1.0, 0.0])
        weak = interior_population(analytic_dark_state(PointerModelSpec(base, self.J, self.M), 0.5, phi))
        strong = interior_population(analytic_dark_state(PointerModelSpec(base, self.J, 2 * self.M), 0.5, phi))
        ratio = weak / strong
        results.append(CheckResult("pointer_model", "interior population ~ (J/M)^2",
                                   abs(ratio - 4.0) <= 0.04, f"ratio {ratio:.4f}"))
        return results

    def check_spin_model(self, circuits: Mapping[str, Circuit]) -> List[CheckResult]:
        tol = self.settings.hermitian_tol
        results = []
        for name, circuit in circuits.items():
            spec = self._spec(circuit)
            if spec.num_sites + spec.register_width > self.settings.max_spin_count:
                results.append(CheckResult("spin_model", f"{name}: skipped (above spin cap)", True))
                continue
            n, N = spec.num_gates, spec.register_width
            equivalence = hermitian = defect = vacuum = 0.0
            weight = 0
            for s in SECTOR_S_SAMPLES:
                terms = build_spin_h(spec, s)
                weight = max(weight, terms.max_weight())
                matrix = spin_matrix(terms, self.settings.max_spin_count)
                hermitian = max(hermitian, _max_abs((matrix - matrix.conj().T).toarray()))
                defect = max(defect, excitation_defect(matrix, n, N))
                restricted = restrict_to_single_excitation(matrix, n, N)
                equivalence = max(equivalence, _max_abs(restricted - build_h(spec, s).to_dense()))
                vacuum = max(vacuum, _max_abs(restrict_to_sector(matrix, n, N, 0)))
            results += [
                CheckResult("spin_model", f"{name}: sector equivalence", equivalence <= tol, f"{equivalence:.2e}"),
                CheckResult("spin_model", f"{name}: Hermitian", hermitian <= tol, f"{hermitian:.2e}"),
                CheckResult("spin_model", f"{name}: excitation conserved", defect <= tol, f"{defect:.2e}"),
                CheckResult("spin_model", f"{name}: empty sector inert", vacuum <= tol, f"{vacuum:.2e}"),
                CheckResult("spin_model", f"{name}: at most four-spin terms", weight <= 4, f"weight {weight}"),
            ]
        return results

    def check_spectra(self, circuits: Mapping[str, Circuit]) -> List[CheckResult]:
        results = []
        oracle = gap_at(PointerModelSpec(identity_family(1)(2), 1.0, 10.0), 0.5)
        results.append(CheckResult("spectral", "gap(n=2, s=0.5, J=1, M=10) = 0.5",
                                   abs(oracle - 0.5) <= 1e-9, f"{oracle!r}"))

        for name, circuit in circuits.items():
            spec = self._spec(circuit)
            dimension_ok, symmetry, deficit, residual = True, 0.0, 0.0, 0.0
            for s in S_SAMPLES:
                spectrum = pointer_spectrum(spec, s)
                dimension_ok &= spectrum.zero_dimension == spec.register_dim
                symmetry = max(symmetry, symmetry_defect(spectrum.eigenvalues))
                residual = max(residual, spectrum.max_residual / spec.max_coupling)
                if spectrum.zero_dimension:
                    deficit = max(deficit, dark_space_deficit(spec, s, spectrum.zero_space))
            results += [
                CheckResult("spectral", f"{name}: zero space has dimension 2^N", bool(dimension_ok)),
                CheckResult("spectral", f"{name}: spectrum symmetric", symmetry <= 1e-9, f"{symmetry:.2e}"),
                CheckResult("spectral", f"{name}: eigen residuals", residual <= 1e-9, f"{residual:.2e}"),
                CheckResult("spectral", f"{name}: dark states span zero space", deficit <= 1e-9, f"{deficit:.2e}"),
            ]

        worst = 0.0
        for n in (2, 4, 6):
            identity_spec = PointerModelSpec(identity_family(1)(n), self.J, self.M)
            rotated_spec = PointerModelSpec(random_rotation_family(7, 1)(n), self.J, self.M)
            for s in (0.0, 0.25, 0.5, 0.9):
                worst = max(worst, abs(gap_at(identity_spec, s) - gap_at(rotated_spec, s)))
        results.append(CheckResult("spectral", "counter gap independent of gates", worst <= 1e-9, f"{worst:.2e}"))
        return results

    def check_dynamics(self, circuits: Mapping[str, Circuit]) -> List[CheckResult]:
        hadamard_pair = parse_circuit("qubits 1\ngate h 0\ngate h 0\n")
        spec = PointerModelSpec(hadamard_pair, self.J, self.M)
        phi = np.array([1.0, 0.0])
        _, quench = propagate(spec, Schedule(0.01), phi)
        _, slow = propagate(spec, Schedule(100.0), phi, max_steps=self.settings.max_steps)
        drift = max(quench.norm_drift, slow.norm_drift)
        return [
            CheckResult("evolve", "quench leaves the input in place", quench.final_fidelity < 0.01,
                        f"{quench.final_fidelity:.2e}"),
            CheckResult("evolve", "slow sweep reaches the output", slow.final_fidelity >= 0.99,
                        f"{slow.final_fidelity:.6f}"),
            CheckResult("evolve", "norm preserved", drift <= 1e-9, f"{drift:.2e}"),
            CheckResult("evolve", "tracks the dark state", slow.min_dark_overlap >= 0.98,
                        f"{slow.min_dark_overlap:.6f}"),
        ]

    def check_gate_table(self, circuits: Mapping[str, Circuit]) -> List[CheckResult]:
        results = []
        for row in gate_table_audit():
            expected = EXPECTED_AUDIT[row.entry]
            results.append(CheckResult(
                "audit", f"{row.entry}: {expected.value}", row.status is expected,
                f"{row.status.value}, deviation {row.deviation:.3e}",
            ))
        return results
