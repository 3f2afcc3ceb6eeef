"""Adiabatic sweep of s(t) from 0 to 1 with the exponential midpoint propagator."""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import expm

from ..domain.entities import EvolveReport, PointerModelSpec, PointerState, Schedule, ScheduleShape, SweepRow, TraceRow
from ..domain.errors import ParameterRangeError, StepUnderflowError
from .circuit_service import circuit_product
from .pointer_service import analytic_dark_state, build_h, initial_state, target_state

logger = logging.getLogger(__name__)

STEP_SAFETY = 0.1
DEFAULT_MAX_STEPS = 10_000_000
DEFAULT_TRACE_SAMPLES = 200

StateLike = Union[PointerState, np.ndarray]


def _vector(state: StateLike) -> np.ndarray:
    return state.amplitudes if isinstance(state, PointerState) else np.asarray(state, dtype=complex).reshape(-1)


def fidelity(psi: StateLike, chi: StateLike) -> float:
    """|<χ|ψ>|² / (‖χ‖² ‖ψ‖²), independent of global phase."""
    a, b = _vector(psi), _vector(chi)
    norm_product = np.vdot(a, a).real * np.vdot(b, b).real
    if norm_product == 0:
        raise ParameterRangeError("fidelity of a zero vector")
    return float(min(1.0, abs(np.vdot(b, a)) ** 2 / norm_product))


def hamiltonian_norm_bound(spec: PointerModelSpec) -> float:
    """Each site has at most two bonds of strength <= max(J, M) with unitary blocks."""
    return 2.0 * spec.max_coupling


def max_step(spec: PointerModelSpec, step_safety: float = STEP_SAFETY) -> float:
    return step_safety / hamiltonian_norm_bound(spec)


def plan_steps(
    spec: PointerModelSpec,
    schedule: Schedule,
    num_steps: Optional[int] = None,
    max_steps: int = DEFAULT_MAX_STEPS,
    step_safety: float = STEP_SAFETY,
) -> int:
    """Step count with dt · ‖H‖ <= step_safety."""
    dt_limit = max_step(spec, step_safety)
    required = max(1, math.ceil(schedule.total_time / dt_limit - 1e-9))
    if num_steps is None:
        num_steps = required
    elif num_steps < required:
        raise ParameterRangeError(
            f"{num_steps} steps give dt = {schedule.total_time / num_steps:.3g}, "
            f"above the limit {dt_limit:.3g}; need at least {required}"
        )
    if num_steps > max_steps:
        raise StepUnderflowError(
            f"T = {schedule.total_time} needs {num_steps} steps, above the cap of {max_steps}"
        )
    return num_steps


def _sample_steps(num_steps: int, samples: int) -> np.ndarray:
    return np.unique(np.round(np.linspace(0, num_steps, samples)).astype(int))


def _normalized_dark(spec: PointerModelSpec, s: float, phi: np.ndarray) -> np.ndarray:
    dark = analytic_dark_state(spec, s, phi).amplitudes
    return dark / np.linalg.norm(dark)


def propagate(
    spec: PointerModelSpec,
    schedule: Schedule,
    phi: np.ndarray,
    num_steps: Optional[int] = None,
    max_steps: int = DEFAULT_MAX_STEPS,
    step_safety: float = STEP_SAFETY,
    trace_samples: int = DEFAULT_TRACE_SAMPLES,
) -> Tuple[PointerState, EvolveReport]:
    """Evolve |0>_c|φ> under H(s(t)); each step is exp(-i H(s_mid) dt)."""
    num_steps = plan_steps(spec, schedule, num_steps, max_steps, step_safety)
    dt = schedule.total_time / num_steps
    phi = np.asarray(phi, dtype=complex)

    psi = initial_state(spec, phi).amplitudes.copy()
    target = target_state(spec, phi)
    expected_register = circuit_product(spec.circuit) @ phi

    # H(s) is affine in s: only the two boundary bonds move.
    h_start = build_h(spec, 0.0).to_dense()
    h_slope = build_h(spec, 1.0).to_dense() - h_start

    d = spec.register_dim
    interior = slice(d, (spec.num_sites - 1) * d)
    samples = set(_sample_steps(num_steps, trace_samples).tolist())
    trace: List[TraceRow] = []
    norm_drift = 0.0
    max_interior = float(np.vdot(psi[interior], psi[interior]).real)

    def record(step: int) -> None:
        t = step * dt
        s = schedule.s_at(t)
        weights = np.sum(np.abs(psi.reshape(spec.num_sites, d)) ** 2, axis=1)
        populations = weights / weights.sum()
        trace.append(TraceRow(t, s, tuple(float(p) for p in populations),
                              fidelity(psi, _normalized_dark(spec, s, phi))))

    logger.debug(f"Propagating T={schedule.total_time} in {num_steps} steps (dt={dt:.4g})")
    for step in range(num_steps):
        if step in samples:
            record(step)
        s_mid = schedule.s_at((step + 0.5) * dt)
        psi = expm(-1j * dt * (h_start + s_mid * h_slope)) @ psi
        norm_sq = np.vdot(psi, psi).real
        norm_drift = float(np.maximum(norm_drift, abs(math.sqrt(norm_sq) - 1.0)))
        max_interior = max(max_interior, float(np.vdot(psi[interior], psi[interior]).real / norm_sq))
    record(num_steps)

    final = PointerState(psi, spec.num_sites, spec.register_dim)
    output_block = final.register_block(spec.num_sites - 1)
    output_population = float(np.vdot(output_block, output_block).real / np.vdot(psi, psi).real)
    register_fidelity = fidelity(output_block, expected_register) if np.any(output_block) else 0.0

    report = EvolveReport(
        total_time=schedule.total_time,
        num_steps=num_steps,
        dt=dt,
        final_fidelity=fidelity(final, target),
        norm_drift=norm_drift,
        max_interior_population=max_interior,
        output_site_population=output_population,
        register_fidelity=register_fidelity,
        min_dark_overlap=min(row.fidelity_to_dark for row in trace),
        site_population_trace=tuple(trace),
    )
    logger.debug(f"T={schedule.total_time}: fidelity {report.final_fidelity:.6f}, drift {norm_drift:.2e}")
    return final, report


def sweep_reports(
    spec: PointerModelSpec,
    total_times: Sequence[float],
    phi: np.ndarray,
    shape: ScheduleShape = ScheduleShape.LINEAR,
    max_workers: int = 1,
    **propagate_options,
) -> List[EvolveReport]:
    """One propagation per total time, reports in input order."""
    total_times = [float(T) for T in total_times]
    if not total_times:
        raise ParameterRangeError("sweep needs at least one total time")
    if any(b <= a for a, b in zip(total_times, total_times[1:])):
        raise ParameterRangeError(f"total times must be strictly ascending, got {total_times}")

    def run(T: float) -> EvolveReport:
        _, report = propagate(spec, Schedule(T, shape), phi, **propagate_options)
        logger.info(f"Sweep T={T:g}: fidelity {report.final_fidelity:.6f}, "
                    f"max interior population {report.max_interior_population:.3e}")
        return report

    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as executor:
            return list(executor.map(run, total_times))
    return [run(T) for T in total_times]


def adiabaticity_sweep(
    spec: PointerModelSpec,
    total_times: Sequence[float],
    phi: np.ndarray,
    shape: ScheduleShape = ScheduleShape.LINEAR,
    max_workers: int = 1,
    **propagate_options,
) -> List[SweepRow]:
    """(T, final fidelity, max interior population) for each T."""
    reports = sweep_reports(spec, total_times, phi, shape, max_workers, **propagate_options)
    return [SweepRow(r.total_time, r.final_fidelity, r.max_interior_population) for r in reports]


def refinement_ratio(
    spec: PointerModelSpec,
    schedule: Schedule,
    phi: np.ndarray,
    base_steps: int,
) -> float:
    """|F(dt) - F(dt/2)| / |F(dt/2) - F(dt/4)|; about 4 for a second-order propagator."""
    fidelities = []
    for factor in (1, 2, 4):
        _, report = propagate(spec, schedule, phi, num_steps=base_steps * factor, trace_samples=2)
        fidelities.append(report.final_fidelity)
    coarse = abs(fidelities[0] - fidelities[1])
    fine = abs(fidelities[1] - fidelities[2])
    return math.inf if fine == 0 else coarse / fine
