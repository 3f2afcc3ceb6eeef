"""Analysis handlers behind the ``stirap`` subcommands."""
import logging
from pathlib import Path
from typing import Callable, Dict, List

from rich.console import Console
from rich.table import Table

from ...config.config import RunConfig
from ...config.settings import Settings
from ...domain.entities import Circuit, EvolveReport, PointerModelSpec
from ...domain.errors import InvariantViolation, ParameterRangeError
from ...middleware.error_handler import MAX_EXIT_CODE
from ...repository.interface import ResultRepositoryInterface
from ...service.circuit_service import identity_family, random_rotation_family
from ...service.evolve_service import sweep_reports
from ...service.pointer_service import (
    analytic_dark_state,
    build_h,
    kernel_residual,
    register_basis_vector,
    site_populations,
)
from ...service.spectral_service import (
    EXPECTED_ALPHA,
    alpha_deviation_notice,
    dark_space_deficit,
    effective_gap,
    eigendecompose,
    gap_scan,
)
from ...service.spin_service import build_spin_h, coupling_records, gate_table_audit
from ...service.verification_service import VerificationService, load_corpus
from ...validation.circuit_parser import parse_circuit
from ...validation.contract_validator import validate_payload

logger = logging.getLogger(__name__)

DEFAULT_S = 0.5
DARK_SPACE_TOL = 1e-9
NORM_DRIFT_TOL = 1e-9


class AnalysisHandlers:
    """One method per subcommand; each writes its files and returns the exit code."""

    def __init__(self, settings: Settings, repository: ResultRepositoryInterface, console: Console):
        self.settings = settings
        self.repository = repository
        self.console = console

    def _load_circuit(self, config: RunConfig) -> Circuit:
        if config.circuit_path is None:
            raise ParameterRangeError("this command needs --circuit FILE")
        path = Path(config.circuit_path)
        if path.is_dir():
            raise ParameterRangeError(f"{path} is a directory, expected a circuit file")
        logger.info(f"Loading circuit {path}")
        return parse_circuit(path.read_text(encoding="utf-8"), source_name=str(path))

    @staticmethod
    def _spec(circuit: Circuit, config: RunConfig) -> PointerModelSpec:
        return PointerModelSpec(circuit, config.J, config.M)

    def _zero_tol(self, spec: PointerModelSpec, config: RunConfig) -> float:
        return config.zero_tol or self.settings.zero_tol_factor * spec.max_coupling

    def _family(self, config: RunConfig) -> Callable[[int], Circuit]:
        if config.family == "random-rotation":
            return random_rotation_family(config.seed, config.register_width)
        return identity_family(config.register_width)

    def darkstate(self, config: RunConfig) -> int:
        spec = self._spec(self._load_circuit(config), config)
        s = DEFAULT_S if config.s is None else config.s
        phi = register_basis_vector(spec, config.phi_index)

        state = analytic_dark_state(spec, s, phi)
        residual = kernel_residual(spec, s, state)
        kernel_tol = config.kernel_tol or self.settings.kernel_tol_factor * spec.max_coupling
        spectrum = eigendecompose(build_h(spec, s).to_dense(), self._zero_tol(spec, config),
                                  self.settings.max_dense_dim)
        deficit = dark_space_deficit(spec, s, spectrum.zero_space)
        match = spectrum.zero_dimension == spec.register_dim and deficit <= DARK_SPACE_TOL
        populations = site_populations(state)

        normalized = state.amplitudes / state.norm()
        payload = {
            "n": spec.num_gates,
            "N": spec.register_width,
            "J": spec.J,
            "M": spec.M,
            "s": s,
            "phi_index": config.phi_index,
            "amplitudes": [[float(a.real), float(a.imag)] for a in normalized],
            "populations": [float(p) for p in populations],
            "kernel_residual": residual,
            "kernel_tol": kernel_tol,
            "zero_space_dimension": spectrum.zero_dimension,
            "dark_space_deficit": deficit,
            "zero_space_match": match,
        }
        validate_payload("darkstate", payload)
        self.repository.save_json("darkstate.json", payload)

        table = Table(title=f"Dark state (n={spec.num_gates}, N={spec.register_width}, s={s:g})")
        table.add_column("site", justify="right")
        table.add_column("population", justify="right")
        for site, population in enumerate(populations):
            table.add_row(str(site), f"{population:.6f}")
        self.console.print(table)
        self.console.print(f"kernel residual {residual:.3e} (tolerance {kernel_tol:.1e}), "
                           f"zero space dimension {spectrum.zero_dimension}, "
                           f"{'matches' if match else 'does not match'} the eigensolver")

        if not residual <= kernel_tol:
            raise InvariantViolation(f"dark-state residual {residual:.3e} exceeds {kernel_tol:.1e}")
        if not match:
            raise InvariantViolation(
                f"zero space (dimension {spectrum.zero_dimension}, deficit {deficit:.3e}) "
                f"does not match the 2^N = {spec.register_dim} analytic dark states"
            )
        return 0

    def spectrum(self, config: RunConfig) -> int:
        spec = self._spec(self._load_circuit(config), config)
        zero_tol = self._zero_tol(spec, config)
        rows: List[list] = []
        table = Table(title=f"Spectrum (dimension {spec.dimension})")
        for column in ("s", "zero space", "gap"):
            table.add_column(column, justify="right")

        for s in config.s_values(self.settings.s_grid_points):
            result = eigendecompose(build_h(spec, s).to_dense(), zero_tol, self.settings.max_dense_dim)
            rows += [[s, index, float(value)] for index, value in enumerate(result.eigenvalues)]
            if result.zero_dimension != spec.register_dim:
                logger.warning(f"s={s:g}: zero space has dimension {result.zero_dimension}, "
                               f"expected {spec.register_dim}")
            gap = "-" if result.gap is None else f"{result.gap:.6g}"
            table.add_row(f"{s:.4g}", str(result.zero_dimension), gap)

        self.repository.save_csv("spectrum.csv", ["s", "index", "eigenvalue"], rows)
        self.console.print(table)
        return 0

    def gapscan(self, config: RunConfig) -> int:
        result = gap_scan(
            self._family(config),
            config.n_list,
            config.J,
            config.M,
            s_grid=config.s_values(self.settings.s_grid_points),
            max_workers=self.settings.max_workers,
            zero_tol=config.zero_tol,
        )
        rows = [[sample.n, sample.s, sample.gap, effective_gap(sample.n, config.J, sample.s)]
                for sample in result.samples]
        notice = alpha_deviation_notice(result.alpha)
        payload = {
            "alpha": result.alpha,
            "prefactor": result.prefactor,
            "residual": result.residual,
            "expected_alpha": EXPECTED_ALPHA,
            "within_expected_band": notice is None,
            "notice": notice,
            "family": config.family,
            "n_values": list(config.n_list),
            "J": config.J,
            "M": config.M,
        }
        validate_payload("gapfit", payload)
        self.repository.save_csv("gaps.csv", ["n", "s", "gap", "effective_gap"], rows)
        self.repository.save_json("gapfit.json", payload)

        table = Table(title=f"Minimum gap ({config.family} family)")
        for column in ("n", "min gap", "at s", "three-level estimate"):
            table.add_column(column, justify="right")
        for row in result.rows:
            table.add_row(str(row.n), f"{row.min_gap:.6g}", f"{row.argmin_s:.3f}", f"{row.effective_gap:.6g}")
        self.console.print(table)
        self.console.print(f"gap ≈ {result.prefactor:.4g} · n^{result.alpha:.4f} (expected exponent {EXPECTED_ALPHA:g})")
        if notice:
            self.console.print(f"[yellow]Notice:[/yellow] {notice}")
        return 0

    @staticmethod
    def _report_payload(report: EvolveReport) -> Dict[str, float]:
        return {
            "total_time": report.total_time,
            "num_steps": report.num_steps,
            "dt": report.dt,
            "final_fidelity": report.final_fidelity,
            "norm_drift": report.norm_drift,
            "max_interior_population": report.max_interior_population,
            "output_site_population": report.output_site_population,
            "register_fidelity": report.register_fidelity,
            "min_dark_overlap": report.min_dark_overlap,
        }

    def evolve(self, config: RunConfig) -> int:
        spec = self._spec(self._load_circuit(config), config)
        phi = register_basis_vector(spec, config.phi_index)
        reports = sweep_reports(
            spec,
            config.T_list,
            phi,
            config.schedule,
            max_workers=self.settings.max_workers,
            max_steps=self.settings.max_steps,
            step_safety=self.settings.step_safety,
            trace_samples=self.settings.trace_samples,
        )
        longest = reports[-1]
        payload = {
            "n": spec.num_gates,
            "N": spec.register_width,
            "J": spec.J,
            "M": spec.M,
            "phi_index": config.phi_index,
            "schedule": config.schedule.value,
            "sweep": [
                {"T": r.total_time, "final_fidelity": r.final_fidelity,
                 "max_interior_population": r.max_interior_population}
                for r in reports
            ],
            "report": self._report_payload(longest),
        }
        header = ["t", "s"] + [f"site{i}" for i in range(spec.num_sites)] + ["fidelity_to_dark"]
        trace = [[row.t, row.s, *row.populations, row.fidelity_to_dark] for row in longest.site_population_trace]
        self.repository.save_json("evolve.json", payload)
        self.repository.save_csv("trace.csv", header, trace)

        table = Table(title=f"Adiabatic sweep (n={spec.num_gates}, {config.schedule.value})")
        for column in ("T", "steps", "fidelity", "max interior", "norm drift"):
            table.add_column(column, justify="right")
        for r in reports:
            table.add_row(f"{r.total_time:g}", str(r.num_steps), f"{r.final_fidelity:.6f}",
                          f"{r.max_interior_population:.3e}", f"{r.norm_drift:.1e}")
        self.console.print(table)

        drift = max(r.norm_drift for r in reports)
        if not drift <= NORM_DRIFT_TOL:
            raise InvariantViolation(f"norm drift {drift:.3e} exceeds {NORM_DRIFT_TOL:.0e}")
        return 0

    def compile_spin(self, config: RunConfig) -> int:
        spec = self._spec(self._load_circuit(config), config)
        s = DEFAULT_S if config.s is None else config.s
        hamiltonian = build_spin_h(spec, s)
        payload = {
            "n": spec.num_gates,
            "N": spec.register_width,
            "J": spec.J,
            "M": spec.M,
            "s": s,
            "terms": coupling_records(hamiltonian),
        }
        validate_payload("couplings", payload)
        self.repository.save_json("couplings.json", payload)
        self.console.print(
            f"{len(hamiltonian)} Pauli terms over {hamiltonian.num_counter} counter spins and "
            f"{hamiltonian.register_width} register qubit(s), max weight {hamiltonian.max_weight()}"
        )
        return 0

    def audit(self, config: RunConfig) -> int:
        rows = gate_table_audit()
        payload = [
            {
                "entry": row.entry,
                "status": row.status.value,
                "deviation": row.deviation,
                "rescale": row.rescale,
                "rescaled_deviation": row.rescaled_deviation,
                "note": row.note,
            }
            for row in rows
        ]
        self.repository.save_json("audit.json", payload)

        table = Table(title="Gate Hamiltonian table audit")
        for column in ("entry", "status", "deviation", "note"):
            table.add_column(column)
        for row in rows:
            table.add_row(row.entry, row.status.value, f"{row.deviation:.3e}", row.note)
        self.console.print(table)
        return 0

    def verify(self, config: RunConfig) -> int:
        """Exit code is the number of failed invariant groups (capped)."""
        path = Path(config.circuit_path) if config.circuit_path else Path(self.settings.corpus_dir)
        if path.is_dir():
            circuits = load_corpus(path)
        else:
            circuits = {path.name: parse_circuit(path.read_text(encoding="utf-8"), source_name=str(path))}
        if not circuits:
            raise ParameterRangeError(f"no *.qc circuits found in {path}")
        logger.info(f"Verifying {len(circuits)} circuit(s) from {path}")

        service = VerificationService(self.settings)
        results = service.run(circuits)

        table = Table(title="Invariant checks")
        for column in ("group", "check", "result", "detail"):
            table.add_column(column)
        for result in results:
            verdict = "[green]pass[/green]" if result.passed else "[red]FAIL[/red]"
            table.add_row(result.group, result.name, verdict, result.detail)
        self.console.print(table)

        failed = service.failed_groups(results)
        if failed:
            self.console.print(f"[red]{len(failed)} group(s) failed:[/red] {', '.join(failed)}")
        else:
            self.console.print(f"[green]All {len(results)} checks passed[/green]")
        return min(len(failed), MAX_EXIT_CODE)
