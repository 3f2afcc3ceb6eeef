import math

import numpy as np
import pytest

from src.domain.entities import AuditStatus, PointerModelSpec
from src.domain.errors import DenseLimitError
from src.service.pauli_service import pauli_string_matrix
from src.service.pointer_service import build_h
from src.service.spin_service import (
    build_spin_h,
    coupling_records,
    excitation_defect,
    gate_table_audit,
    restrict_to_sector,
    restrict_to_single_excitation,
    sector_indices,
    spin_matrix,
)
from src.validation.circuit_parser import parse_circuit

from .conftest import corpus_paths

SECTOR_S = [0.0, 0.3, 0.7, 1.0]


def small_corpus():
    params = []
    for path in corpus_paths():
        circuit = parse_circuit(path.read_text(encoding="utf-8"))
        if circuit.num_gates <= 4 and circuit.register_width <= 2:
            params.append(pytest.param(PointerModelSpec(circuit), id=path.name))
    return params


def test_hadamard_pair_terms(hadamard_pair):
    spec = PointerModelSpec(hadamard_pair, 1.0, 10.0)
    hamiltonian = build_spin_h(spec, 0.25)
    terms = {term.key: term.coefficient for term in hamiltonian}

    assert terms[(((0, "X"), (1, "X")), ())] == pytest.approx(0.125)
    assert terms[(((0, "Y"), (1, "Y")), ())] == pytest.approx(0.125)
    assert terms[(((3, "X"), (4, "X")), ())] == pytest.approx(0.375)
    internal = 10.0 / (2 * math.sqrt(2))
    for bond in (1, 2):
        for letter in ("X", "Y"):
            for register in ("X", "Z"):
                key = (((bond, letter), (bond + 1, letter)), ((0, register),))
                assert terms[key] == pytest.approx(internal, rel=1e-14)
    # Hadamard has no antisymmetric part: no XY or YX couplings
    for counter, _ in terms:
        assert {letter for _, letter in counter} in ({"X"}, {"Y"})
    assert len(hamiltonian) == 2 + 8 + 2


def test_pi_over_8_has_twisted_couplings():
    spec = PointerModelSpec(parse_circuit("qubits 1\ngate t 0\ngate t 0\n"))
    terms = {term.key: term.coefficient for term in build_spin_h(spec, 0.5)}
    a = 1 / (2 * math.sqrt(2))
    assert terms[(((1, "X"), (2, "Y")), ())] == pytest.approx(-spec.M / 2 * a)
    assert terms[(((1, "Y"), (2, "X")), ())] == pytest.approx(spec.M / 2 * a)
    assert terms[(((1, "X"), (2, "Y")), ((0, "Z"),))] == pytest.approx(spec.M / 2 * a)


def test_cnot_reaches_four_spin_terms(bell_pair):
    hamiltonian = build_spin_h(PointerModelSpec(bell_pair), 0.5)
    assert hamiltonian.max_weight() == 4


@pytest.mark.parametrize("spec", small_corpus())
def test_single_excitation_sector_matches_pointer_model(spec):
    n, N = spec.num_gates, spec.register_width
    for s in SECTOR_S:
        matrix = spin_matrix(build_spin_h(spec, s))
        restricted = restrict_to_single_excitation(matrix, n, N)
        assert np.max(np.abs(restricted - build_h(spec, s).to_dense())) <= 1e-12
        assert excitation_defect(matrix, n, N) <= 1e-12
        assert np.max(np.abs((matrix - matrix.conj().T).toarray())) <= 1e-12
        assert np.max(np.abs(restrict_to_sector(matrix, n, N, 0))) <= 1e-12


def test_dense_and_sparse_defect_agree(hadamard_pair):
    matrix = spin_matrix(build_spin_h(PointerModelSpec(hadamard_pair), 0.6))
    assert excitation_defect(matrix.toarray(), 2, 1) == pytest.approx(excitation_defect(matrix, 2, 1), abs=1e-15)


def test_defect_detects_excitation_flip(hadamard_pair):
    matrix = spin_matrix(build_spin_h(PointerModelSpec(hadamard_pair), 0.5))
    # lone X on counter spin 0 (bit N = 1) flips one counter spin
    bogus = matrix + 0.25 * pauli_string_matrix({1: "X"}, 6)
    assert excitation_defect(bogus, 2, 1) == pytest.approx(0.5)
    assert excitation_defect(bogus.toarray(), 2, 1) == pytest.approx(0.5)


def test_sector_indices_order():
    indices = sector_indices(2, 1, 1)
    assert len(indices) == 10
    # site 0 excited: counter bits 11110 above the register bit
    assert indices[0] == 0b111100
    assert indices[1] == 0b111101
    assert len(sector_indices(2, 1, 0)) == 2
    assert len(sector_indices(2, 1, 2)) == 20


def test_spin_cap(hadamard_pair):
    with pytest.raises(DenseLimitError):
        spin_matrix(build_spin_h(PointerModelSpec(hadamard_pair), 0.5), max_spins=5)


def test_gate_table_audit():
    rows = {row.entry: row for row in gate_table_audit()}
    assert rows["hadamard.symmetric"].status is AuditStatus.MATCH
    assert rows["hadamard.antisymmetric"].status is AuditStatus.MATCH
    assert rows["rotation.symmetric"].status is AuditStatus.MATCH
    assert rows["rotation.antisymmetric"].status is AuditStatus.MATCH
    assert rows["cnot.antisymmetric"].status is AuditStatus.MATCH

    for entry in ("pi_over_8.symmetric", "pi_over_8.antisymmetric"):
        assert rows[entry].status is AuditStatus.MISMATCH
        assert rows[entry].deviation == pytest.approx(1 / math.sqrt(2), rel=1e-12)

    cnot = rows["cnot.symmetric"]
    assert cnot.status is AuditStatus.MATCH_AFTER_RESCALE
    assert cnot.deviation == pytest.approx(1.0)
    assert cnot.rescale == 0.5
    assert cnot.rescaled_deviation <= 1e-12


def test_coupling_records(hadamard_pair):
    records = coupling_records(build_spin_h(PointerModelSpec(hadamard_pair), 0.5))
    assert records[0] == {
        "coefficient": 0.25,
        "sites": [
            {"index": 0, "space": "counter", "letter": "X"},
            {"index": 1, "space": "counter", "letter": "X"},
        ],
    }
    spaces = {site["space"] for record in records for site in record["sites"]}
    assert spaces == {"counter", "register"}
