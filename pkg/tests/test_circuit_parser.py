import math

import numpy as np
import pytest

from src.domain.entities import Circuit, Gate, GateKind
from src.domain.errors import CircuitSyntaxError, CircuitValidationError
from src.validation.circuit_parser import parse_circuit, serialize_circuit

from .conftest import corpus_paths


def test_hadamard_pair():
    circuit = parse_circuit("qubits 1\ngate h 0\ngate h 0")
    h = Gate(GateKind.HADAMARD, (0,))
    assert circuit == Circuit(1, (h, h))


def test_cnot_and_rotation():
    circuit = parse_circuit("qubits 2\ngate cnot 0 1\ngate rot 0 axis 0 0 1 angle 3.141592653589793")
    assert circuit.register_width == 2
    assert circuit.gates[0] == Gate(GateKind.CNOT, (0, 1))
    assert circuit.gates[1] == Gate(GateKind.ROTATION, (0,), axis=(0.0, 0.0, 1.0), angle=math.pi)


def test_comments_and_blank_lines():
    text = "# header\n\nqubits 1   # one qubit\n  gate h 0\n\ngate T 0  # upper case name\n"
    circuit = parse_circuit(text)
    assert [gate.kind for gate in circuit.gates] == [GateKind.HADAMARD, GateKind.PI_OVER_8]


def test_odd_gate_count():
    with pytest.raises(CircuitValidationError, match="n must be even"):
        parse_circuit("qubits 1\ngate h 0")


def test_unknown_gate_location():
    with pytest.raises(CircuitSyntaxError) as excinfo:
        parse_circuit("qubits 1\ngate foo 0\ngate h 0\n", source_name="bad.qc")
    error = excinfo.value
    assert (error.line, error.column) == (2, 6)
    assert str(error).startswith("bad.qc:2:6:")


@pytest.mark.parametrize(
    "text",
    [
        "gate h 0\ngate h 0\n",                        # no register declaration
        "qubits 1\nqubits 1\ngate h 0\ngate h 0\n",    # declared twice
        "qubits 1\ngate h 1\ngate h 0\n",              # index out of range
        "qubits 2\ngate cnot 0\ngate h 0\n",           # arity
        "qubits 2\ngate cnot 0 0\ngate h 0\n",         # repeated target
        "qubits 1\ngate rot 0 axis 0 0 1\ngate h 0\n",  # missing angle
        "qubits x\n",
        "measure 0\n",
    ],
)
def test_syntax_errors(text):
    with pytest.raises(CircuitSyntaxError):
        parse_circuit(text)


def test_rotation_axis_must_be_unit():
    with pytest.raises(CircuitSyntaxError, match="unit vector"):
        parse_circuit("qubits 1\ngate rot 0 axis 1 1 0 angle 1\ngate h 0\n")


def test_custom_gate():
    text = "qubits 2\ngate custom 1\n  0.5,0.5 0.5,-0.5\n  0.5,-0.5 0.5,0.5\ngate cnot 0 1\n"
    circuit = parse_circuit(text)
    custom = circuit.gates[0]
    assert custom.kind is GateKind.CUSTOM
    assert custom.targets == (1,)
    expected = 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]])
    assert np.array_equal(custom.matrix, expected)


def test_custom_gate_entry_count():
    with pytest.raises(CircuitSyntaxError, match="expects 4 matrix entries"):
        parse_circuit("qubits 1\ngate custom 0\n  1,0 0,0 0,0\ngate h 0\n")


def test_custom_gate_must_be_unitary():
    with pytest.raises(CircuitSyntaxError, match="not unitary"):
        parse_circuit("qubits 1\ngate custom 0\n  1,0 1,0 0,0 1,0\ngate h 0\n")


@pytest.mark.parametrize(
    "line",
    [
        "gate custom 0\n  nan,0 0,0 0,0 1,0",
        "gate custom 0\n  1,0 0,0 0,0 inf,0",
        "gate rot 0 axis nan 0 0 angle 1",
        "gate rot 0 axis 0 0 1 angle nan",
        "gate rot 0 axis 0 0 1 angle inf",
    ],
)
def test_non_finite_numbers_are_located(line):
    with pytest.raises(CircuitSyntaxError) as excinfo:
        parse_circuit(f"qubits 1\n{line}\ngate h 0\n", source_name="nan.qc")
    assert str(excinfo.value).startswith("nan.qc:2:6:")


@pytest.mark.parametrize("path", corpus_paths(), ids=lambda p: p.name)
def test_corpus_round_trip(path):
    circuit = parse_circuit(path.read_text(encoding="utf-8"), source_name=str(path))
    assert parse_circuit(serialize_circuit(circuit)) == circuit


def test_serialize_format():
    circuit = parse_circuit("qubits 2\ngate h 0\ngate rot 1 axis 0 1 0 angle 0.5\n")
    assert serialize_circuit(circuit) == (
        "qubits 2\n"
        "gate h 0\n"
        "gate rot 1 axis 0.0 1.0 0.0 angle 0.5\n"
    )
