"""Exact spectra, dark-subspace identification and gap scaling scans."""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy.linalg import eigh, eigvalsh

from ..domain.entities import Circuit, GapSample, GapScanResult, GapScanRow, PointerModelSpec, SpectrumResult
from ..domain.errors import DenseLimitError, DimensionError, GapFitError, ParameterRangeError, SpectralError
from .pointer_service import analytic_dark_state, build_h, check_s, register_basis_vector

logger = logging.getLogger(__name__)

ZERO_TOL_FACTOR = 1e-6
HERMITIAN_INPUT_TOL = 1e-10
SYMMETRY_TOL = 1e-9
DEFAULT_MAX_DIM = 16384
DEFAULT_GRID_POINTS = 101
MIN_GRID_POINTS = 21
EXPECTED_ALPHA = -1.0
ALPHA_BAND = 0.3


def default_zero_tol(spec: PointerModelSpec) -> float:
    """Zero-eigenvalue threshold scaled by the largest coupling."""
    return ZERO_TOL_FACTOR * spec.max_coupling


def default_s_grid(points: int = DEFAULT_GRID_POINTS) -> np.ndarray:
    """Uniform grid on [0, 1], endpoints included."""
    return np.linspace(0.0, 1.0, points)


def _check_hermitian(matrix: np.ndarray, max_dim: int) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {matrix.shape}")
    if matrix.shape[0] > max_dim:
        raise DenseLimitError(f"matrix dimension {matrix.shape[0]} exceeds the dense cap {max_dim}")
    defect = float(np.max(np.abs(matrix - matrix.conj().T))) if matrix.size else 0.0
    if not defect <= HERMITIAN_INPUT_TOL:
        raise SpectralError(f"matrix is not Hermitian (defect {defect:.3e})")
    return matrix


def eigendecompose(
    matrix: np.ndarray,
    zero_tol: Optional[float] = None,
    max_dim: int = DEFAULT_MAX_DIM,
) -> SpectrumResult:
    """Dense Hermitian eigensolve with the zero space split off.

    ``zero_tol`` defaults to 1e-6 times the largest matrix entry.
    """
    matrix = _check_hermitian(matrix, max_dim)
    eigenvalues, eigenvectors = eigh(matrix)
    scale = float(np.max(np.abs(matrix))) if matrix.size else 0.0
    if zero_tol is None:
        zero_tol = ZERO_TOL_FACTOR * (scale or 1.0)

    residual = matrix @ eigenvectors - eigenvectors * eigenvalues[None, :]
    max_residual = float(np.max(np.abs(residual))) if residual.size else 0.0

    zero_mask = np.abs(eigenvalues) < zero_tol
    nonzero = np.abs(eigenvalues[~zero_mask])
    return SpectrumResult(
        eigenvalues=eigenvalues,
        eigenvectors=eigenvectors,
        zero_space=eigenvectors[:, zero_mask],
        gap=float(np.min(nonzero)) if nonzero.size else None,
        zero_tol=float(zero_tol),
        max_residual=max_residual,
    )


def pointer_spectrum(spec: PointerModelSpec, s: float, zero_tol: Optional[float] = None) -> SpectrumResult:
    return eigendecompose(build_h(spec, s).to_dense(), zero_tol or default_zero_tol(spec))


def symmetry_defect(eigenvalues: np.ndarray) -> float:
    """max |λ_k + λ_{d-1-k}| over the ascending spectrum (0 for a ±λ-symmetric spectrum)."""
    ordered = np.sort(np.asarray(eigenvalues, dtype=float))
    return float(np.max(np.abs(ordered + ordered[::-1]))) if ordered.size else 0.0


def gap_at(spec: PointerModelSpec, s: float, zero_tol: Optional[float] = None) -> float:
    """Distance from the zero-energy dark manifold to the nearest level."""
    s = check_s(s)
    zero_tol = zero_tol or default_zero_tol(spec)
    eigenvalues = eigvalsh(build_h(spec, s).to_dense())

    zero_dimension = int(np.sum(np.abs(eigenvalues) < zero_tol))
    if zero_dimension != spec.register_dim:
        raise SpectralError(
            f"zero space at s={s} has dimension {zero_dimension}, expected 2^N = {spec.register_dim}"
        )
    above = eigenvalues[eigenvalues >= zero_tol]
    below = -eigenvalues[eigenvalues <= -zero_tol]
    if not above.size or not below.size:
        raise SpectralError(f"no nonzero levels at s={s}")
    gap_above, gap_below = float(np.min(above)), float(np.min(below))
    if not abs(gap_above - gap_below) <= SYMMETRY_TOL:
        raise SpectralError(f"gaps above ({gap_above!r}) and below ({gap_below!r}) the dark manifold differ")
    return min(gap_above, gap_below)


def dark_space_deficit(spec: PointerModelSpec, s: float, zero_space: np.ndarray) -> float:
    """1 - max captured weight of the normalized analytic dark states in ``zero_space``."""
    deficit = 0.0
    for r in range(spec.register_dim):
        vector = analytic_dark_state(spec, s, register_basis_vector(spec, r)).amplitudes
        vector = vector / np.linalg.norm(vector)
        captured = float(np.linalg.norm(zero_space.conj().T @ vector) ** 2)
        deficit = max(deficit, 1.0 - captured)
    return deficit


def effective_gap(n: int, J: float, s: float) -> float:
    """Near-zero level of the reduced three-level picture.

    Site 0 and site n+2 couple to the zero mode of the M-bonded interior with
    sJ/√(n/2+1) and (1-s)J/√(n/2+1); valid for M ≫ J.
    """
    return J * math.sqrt((s ** 2 + (1.0 - s) ** 2) / (n / 2 + 1))


def _validate_scan(n_values: Sequence[int], s_grid: Sequence[float]) -> None:
    if len(n_values) < 3:
        raise GapFitError(f"gap fit needs at least 3 chain lengths, got {len(n_values)}")
    for n in n_values:
        if n < 2 or n % 2:
            raise ParameterRangeError(f"n values must be even and >= 2, got {n}")
    if any(b <= a for a, b in zip(n_values, n_values[1:])):
        raise ParameterRangeError(f"n values must be strictly increasing, got {list(n_values)}")
    if len(s_grid) < MIN_GRID_POINTS:
        raise ParameterRangeError(f"s grid needs at least {MIN_GRID_POINTS} points, got {len(s_grid)}")
    for s in s_grid:
        check_s(s)


def fit_power_law(n_values: Sequence[int], gaps: Sequence[float]):
    """Least squares log(gap) = log(prefactor) + alpha·log(n); returns (alpha, prefactor, rms residual)."""
    log_n = np.log(np.asarray(n_values, dtype=float))
    log_gap = np.log(np.asarray(gaps, dtype=float))
    alpha, intercept = np.polyfit(log_n, log_gap, 1)
    residual = float(np.sqrt(np.mean((log_gap - (alpha * log_n + intercept)) ** 2)))
    return float(alpha), float(math.exp(intercept)), residual


def alpha_deviation_notice(alpha: float) -> Optional[str]:
    """Notice when the fitted exponent falls outside |alpha + 1| <= 0.3."""
    if abs(alpha - EXPECTED_ALPHA) <= ALPHA_BAND:
        return None
    return (
        f"fitted gap exponent alpha = {alpha:.4f} lies outside the expected band "
        f"{EXPECTED_ALPHA} ± {ALPHA_BAND} for gap ~ 1/n"
    )


def gap_scan(
    circuit_family: Callable[[int], Circuit],
    n_values: Sequence[int],
    J: float,
    M: float,
    s_grid: Optional[Sequence[float]] = None,
    max_workers: int = 1,
    zero_tol: Optional[float] = None,
) -> GapScanResult:
    """Minimum gap over ``s_grid`` for each chain length and the power-law fit."""
    n_values = [int(n) for n in n_values]
    s_grid = [float(s) for s in (default_s_grid() if s_grid is None else s_grid)]
    _validate_scan(n_values, s_grid)

    specs = {n: PointerModelSpec(circuit_family(n), J, M) for n in n_values}
    points = [(n, s) for n in n_values for s in s_grid]
    logger.info(f"Gap scan over n={n_values} with {len(s_grid)} s points ({len(points)} eigensolves)")

    def evaluate(point):
        n, s = point
        return gap_at(specs[n], s, zero_tol)

    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as executor:
            gaps = list(executor.map(evaluate, points))
    else:
        gaps = [evaluate(point) for point in points]

    samples = tuple(GapSample(n, s, gap) for (n, s), gap in zip(points, gaps))
    rows: List[GapScanRow] = []
    for index, n in enumerate(n_values):
        chunk = gaps[index * len(s_grid):(index + 1) * len(s_grid)]
        best = int(np.argmin(chunk))
        rows.append(GapScanRow(n, float(chunk[best]), s_grid[best], effective_gap(n, J, s_grid[best])))
        logger.debug(f"n={n}: min gap {chunk[best]:.6g} at s={s_grid[best]:.3f}")

    min_gaps = [row.min_gap for row in rows]
    if min(min_gaps) <= 0:
        raise SpectralError("gap scan produced a non-positive gap")
    if any(b > a for a, b in zip(min_gaps, min_gaps[1:])):
        logger.warning("minimum gap is not monotonically non-increasing in n")

    alpha, prefactor, residual = fit_power_law(n_values, min_gaps)
    logger.info(f"Gap fit: gap ≈ {prefactor:.4g} · n^{alpha:.4f} (rms log residual {residual:.3g})")
    notice = alpha_deviation_notice(alpha)
    if notice:
        logger.warning(notice)
    return GapScanResult(tuple(rows), samples, alpha, prefactor, residual)
