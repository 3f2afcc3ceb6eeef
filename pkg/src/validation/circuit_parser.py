"""Circuit DSL parsing and serialization.

Grammar (line oriented, whitespace separated, ``#`` starts a comment)::

    qubits N
    gate h Q
    gate t Q
    gate rot Q axis NX NY NZ angle THETA
    gate cnot CONTROL TARGET
    gate custom Q [Q2]
        RE,IM RE,IM ...        # 4^k entries, row-major, on continuation lines
"""
import re
from dataclasses import dataclass
from typing import Iterator, List, Optional, Tuple

import numpy as np

from ..domain.entities import GATE_ARITY, Circuit, Gate, GateKind
from ..domain.errors import CircuitError, CircuitSyntaxError, CircuitValidationError

KEYWORDS = ("qubits", "gate")
_TOKEN = re.compile(r"\S+")


@dataclass(frozen=True)
class Token:
    text: str
    line: int
    column: int


def _tokenize(text: str) -> List[List[Token]]:
    """Non-empty lines as token lists (comments stripped)."""
    lines = []
    for number, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        tokens = [Token(m.group(0), number, m.start() + 1) for m in _TOKEN.finditer(body)]
        if tokens:
            lines.append(tokens)
    return lines


class _Parser:
    def __init__(self, text: str, source_name: Optional[str]):
        self.lines = _tokenize(text)
        self.source_name = source_name
        self.position = 0

    def error(self, message: str, token: Optional[Token] = None, line: int = 0) -> CircuitSyntaxError:
        if token is None:
            return CircuitSyntaxError(message, line, 1, self.source_name)
        return CircuitSyntaxError(message, token.line, token.column, self.source_name)

    def _int(self, token: Token, what: str) -> int:
        try:
            return int(token.text)
        except ValueError:
            raise self.error(f"expected integer {what}, got {token.text!r}", token) from None

    def _float(self, token: Token, what: str) -> float:
        try:
            return float(token.text)
        except ValueError:
            raise self.error(f"expected number {what}, got {token.text!r}", token) from None

    def _complex(self, token: Token) -> complex:
        parts = token.text.split(",")
        if len(parts) != 2:
            raise self.error(f"expected matrix entry 're,im', got {token.text!r}", token)
        try:
            return complex(float(parts[0]), float(parts[1]))
        except ValueError:
            raise self.error(f"bad matrix entry {token.text!r}", token) from None

    def _next_line(self) -> Optional[List[Token]]:
        if self.position >= len(self.lines):
            return None
        line = self.lines[self.position]
        self.position += 1
        return line

    def parse(self) -> Circuit:
        width: Optional[int] = None
        gates: List[Gate] = []
        last_line = 0

        while (line := self._next_line()) is not None:
            head = line[0]
            last_line = head.line
            if head.text == "qubits":
                if width is not None:
                    raise self.error("register width declared twice", head)
                if len(line) != 2:
                    raise self.error("expected 'qubits N'", head)
                width = self._int(line[1], "register width")
                if width < 1:
                    raise self.error(f"register width must be positive, got {width}", line[1])
            elif head.text == "gate":
                if width is None:
                    raise self.error("'qubits N' must come before the first gate", head)
                gates.append(self._gate(line, width))
            else:
                raise self.error(f"unexpected {head.text!r}, expected 'qubits' or 'gate'", head)

        if width is None:
            raise self.error("missing 'qubits N' declaration", line=last_line or 1)
        try:
            return Circuit(width, tuple(gates))
        except CircuitValidationError as e:
            location = self.source_name or "<circuit>"
            raise CircuitValidationError(f"{location}: {e}") from None

    def _targets(self, tokens: List[Token], count: int, width: int) -> Tuple[int, ...]:
        targets = []
        for token in tokens[:count]:
            qubit = self._int(token, "qubit index")
            if not 0 <= qubit < width:
                raise self.error(f"qubit index {qubit} out of range for {width} qubit(s)", token)
            targets.append(qubit)
        if len(set(targets)) != len(targets):
            raise self.error("gate targets must be distinct", tokens[0])
        return tuple(targets)

    def _gate(self, line: List[Token], width: int) -> Gate:
        if len(line) < 2:
            raise self.error("expected a gate name after 'gate'", line[0])
        name_token = line[1]
        try:
            kind = GateKind(name_token.text.lower())
        except ValueError:
            known = "|".join(k.value for k in GateKind)
            raise self.error(f"unknown gate {name_token.text!r} (expected {known})", name_token) from None

        args = line[2:]
        try:
            if kind is GateKind.ROTATION:
                return self._rotation(name_token, args, width)
            if kind is GateKind.CUSTOM:
                return self._custom(name_token, args, width)
            arity = GATE_ARITY[kind][0]
            if len(args) != arity:
                raise self.error(f"gate '{kind.value}' takes {arity} qubit(s), got {len(args)}", name_token)
            return Gate(kind, self._targets(args, arity, width))
        except CircuitSyntaxError:
            raise
        except CircuitError as e:
            raise self.error(str(e), name_token) from None

    def _rotation(self, name_token: Token, args: List[Token], width: int) -> Gate:
        texts = [token.text for token in args]
        if len(args) != 7 or texts[1] != "axis" or texts[5] != "angle":
            raise self.error("expected 'rot Q axis NX NY NZ angle THETA'", name_token)
        targets = self._targets(args, 1, width)
        axis = tuple(self._float(token, "axis component") for token in args[2:5])
        angle = self._float(args[6], "angle")
        return Gate(GateKind.ROTATION, targets, axis=axis, angle=angle)

    def _custom(self, name_token: Token, args: List[Token], width: int) -> Gate:
        if len(args) not in GATE_ARITY[GateKind.CUSTOM]:
            raise self.error(f"gate 'custom' takes 1 or 2 qubits, got {len(args)}", name_token)
        targets = self._targets(args, len(args), width)
        dim = 2 ** len(targets)
        entries: List[complex] = []
        while len(entries) < dim * dim:
            if self.position >= len(self.lines) or self.lines[self.position][0].text in KEYWORDS:
                raise self.error(
                    f"custom gate expects {dim * dim} matrix entries, got {len(entries)}", name_token
                )
            for token in self._next_line():
                if len(entries) == dim * dim:
                    raise self.error("too many matrix entries for custom gate", token)
                entries.append(self._complex(token))
        matrix = np.array(entries, dtype=complex).reshape(dim, dim)
        return Gate(GateKind.CUSTOM, targets, matrix=matrix)


def parse_circuit(text: str, source_name: Optional[str] = None) -> Circuit:
    """Parse circuit DSL source into a validated Circuit."""
    return _Parser(text, source_name).parse()


def _gate_lines(gate: Gate) -> Iterator[str]:
    targets = " ".join(str(t) for t in gate.targets)
    if gate.kind is GateKind.ROTATION:
        nx, ny, nz = gate.axis
        yield f"gate rot {targets} axis {nx!r} {ny!r} {nz!r} angle {gate.angle!r}"
    elif gate.kind is GateKind.CUSTOM:
        yield f"gate custom {targets}"
        for row in gate.matrix:
            yield "    " + " ".join(f"{float(z.real)!r},{float(z.imag)!r}" for z in row)
    else:
        yield f"gate {gate.kind.value} {targets}"


def serialize_circuit(circuit: Circuit) -> str:
    """DSL text that parses back to an equal Circuit."""
    lines = [f"qubits {circuit.register_width}"]
    for gate in circuit.gates:
        lines.extend(_gate_lines(gate))
    return "\n".join(lines) + "\n"
