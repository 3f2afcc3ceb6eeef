import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from src.domain.entities import PointerModelSpec
from src.domain.errors import DenseLimitError, GapFitError, ParameterRangeError, SpectralError
from src.service.circuit_service import identity_family, random_rotation_family
from src.service.pointer_service import build_h
from src.service.spectral_service import (
    alpha_deviation_notice,
    dark_space_deficit,
    default_s_grid,
    effective_gap,
    eigendecompose,
    fit_power_law,
    gap_at,
    gap_scan,
    pointer_spectrum,
    symmetry_defect,
)
from src.validation.circuit_parser import parse_circuit

from .conftest import corpus_paths

S_GRID = [round(0.1 * k, 10) for k in range(11)]


def test_five_site_chain_spectrum(identity_spec):
    spectrum = pointer_spectrum(identity_spec, 0.5)
    big = math.sqrt(200.25)
    expected = [-big, -big, -0.5, -0.5, 0, 0, 0.5, 0.5, big, big]
    assert_allclose(spectrum.eigenvalues, expected, atol=1e-12)
    assert spectrum.zero_dimension == 2
    assert spectrum.gap == pytest.approx(0.5, abs=1e-9)
    assert spectrum.max_residual < 1e-12


def test_gap_closed_form(identity_spec):
    assert gap_at(identity_spec, 0.5) == pytest.approx(0.5, abs=1e-9)


def test_gap_scales_with_boundary_coupling():
    spec = PointerModelSpec(identity_family(1)(2), 2.0, 10.0)
    assert gap_at(spec, 0.5) == pytest.approx(1.0, abs=1e-9)

    result = gap_scan(identity_family(1), [2, 4, 6], 2.0, 10.0, s_grid=default_s_grid(21))
    sample = min((x for x in result.samples if x.n == 2), key=lambda x: abs(x.s - 0.5))
    assert sample.s == pytest.approx(0.5)
    assert sample.gap == pytest.approx(1.0, abs=1e-9)


def sub_chain_gap(bonds):
    matrix = np.diag(np.asarray(bonds, dtype=float), 1)
    eigenvalues = np.abs(np.linalg.eigvalsh(matrix + matrix.T))
    return float(np.min(eigenvalues[eigenvalues > 1e-9]))


@pytest.mark.parametrize("family", [identity_family(1), random_rotation_family(3, 1)])
def test_boundary_gap_is_sub_chain_gap(family):
    n, J, M = 4, 1.0, 10.0
    spec = PointerModelSpec(family(n), J, M)
    # s = 0 detaches site 0; s = 1 detaches site n+2
    assert gap_at(spec, 0.0) == pytest.approx(sub_chain_gap([M] * n + [J]), abs=1e-9)
    assert gap_at(spec, 1.0) == pytest.approx(sub_chain_gap([J] + [M] * n), abs=1e-9)


@pytest.mark.parametrize("path", corpus_paths(), ids=lambda p: p.name)
def test_zero_space_matches_dark_states(path):
    spec = PointerModelSpec(parse_circuit(path.read_text(encoding="utf-8")))
    for s in S_GRID:
        spectrum = pointer_spectrum(spec, s)
        assert spectrum.zero_dimension == spec.register_dim
        assert symmetry_defect(spectrum.eigenvalues) <= 1e-9
        assert dark_space_deficit(spec, s, spectrum.zero_space) <= 1e-9


def test_gap_mirror_symmetry_for_identity_gates():
    spec = PointerModelSpec(identity_family(1)(6))
    for s in (0.1, 0.3, 0.45):
        assert gap_at(spec, s) == pytest.approx(gap_at(spec, 1 - s), abs=1e-9)


@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_gap_independent_of_gates(n):
    identity = PointerModelSpec(identity_family(1)(n))
    rotated = PointerModelSpec(random_rotation_family(3)(n))
    for s in (0.0, 0.2, 0.5, 0.8, 1.0):
        assert gap_at(identity, s) == pytest.approx(gap_at(rotated, s), abs=1e-9)


def test_gap_rejects_wrong_zero_dimension(identity_spec):
    with pytest.raises(SpectralError, match="zero space"):
        gap_at(identity_spec, 0.5, zero_tol=0.6)


def test_eigendecompose_input_checks():
    with pytest.raises(SpectralError):
        eigendecompose(np.array([[0, 1], [0, 0]], dtype=complex))
    with pytest.raises(DenseLimitError):
        eigendecompose(np.eye(4), max_dim=3)


def test_effective_gap_reference():
    assert effective_gap(2, 1.0, 0.5) == pytest.approx(0.5)
    spec = PointerModelSpec(identity_family(1)(8), 1.0, 100.0)
    assert gap_at(spec, 0.5) == pytest.approx(effective_gap(8, 1.0, 0.5), rel=1e-2)


def test_fit_power_law_exact():
    alpha, prefactor, residual = fit_power_law([2, 4, 8], [1.5, 0.75, 0.375])
    assert alpha == pytest.approx(-1.0)
    assert prefactor == pytest.approx(3.0)
    assert residual < 1e-12


def test_alpha_notice_band():
    assert alpha_deviation_notice(-1.2) is None
    assert "outside" in alpha_deviation_notice(-0.5)


def test_identity_gap_scan():
    result = gap_scan(identity_family(1), [2, 4, 6, 8, 10, 12, 14, 16], 1.0, 10.0, s_grid=default_s_grid(101))
    gaps = [row.min_gap for row in result.rows]
    assert all(g > 0 for g in gaps)
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    assert gaps[0] == pytest.approx(0.5, abs=1e-9)
    assert -0.7 < result.alpha < -0.2
    assert alpha_deviation_notice(result.alpha) is not None
    assert len(result.samples) == 8 * 101


def test_parallel_scan_is_deterministic():
    kwargs = dict(s_grid=default_s_grid(21))
    sequential = gap_scan(random_rotation_family(9), [2, 4, 6], 1.0, 10.0, **kwargs)
    parallel = gap_scan(random_rotation_family(9), [2, 4, 6], 1.0, 10.0, max_workers=4, **kwargs)
    assert sequential == parallel


@pytest.mark.parametrize(
    "n_values,grid,error",
    [
        ([2, 4], 101, GapFitError),
        ([2, 3, 4], 101, ParameterRangeError),
        ([4, 2, 6], 101, ParameterRangeError),
        ([2, 4, 6], 11, ParameterRangeError),
    ],
)
def test_gap_scan_validation(n_values, grid, error):
    with pytest.raises(error):
        gap_scan(identity_family(1), n_values, 1.0, 10.0, s_grid=default_s_grid(grid))


def test_dense_matrix_is_hermitian_input(bell_pair):
    matrix = build_h(PointerModelSpec(bell_pair), 0.3).to_dense()
    assert eigendecompose(matrix).zero_dimension == 4
