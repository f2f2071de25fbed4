import json
import math
from pathlib import Path

import pytest

from compiler.parser import load_circuit, parse_circuit
from env.errors import CircuitParseError

GOLDEN = Path(__file__).parent / "golden"
CIRCUITS = Path(__file__).parent.parent / "circuits"


@pytest.mark.parametrize("path", sorted(GOLDEN.glob("*.qc")), ids=lambda p: p.stem)
def test_golden_circuits(path):
    expected = json.loads(path.with_suffix(".json").read_text())

    if "error" in expected:
        with pytest.raises(CircuitParseError) as error:
            load_circuit(path)
        assert str(error.value) == expected["error"]
    else:
        assert load_circuit(path).to_dict() == expected


@pytest.mark.parametrize("path", sorted(CIRCUITS.glob("*.qc")), ids=lambda p: p.stem)
def test_shipped_circuits_parse(path):
    ir = load_circuit(path)

    assert ir.qubits in (1, 2)
    assert ir.gates


def test_empty_text_has_no_header():
    with pytest.raises(CircuitParseError) as error:
        parse_circuit("")

    assert (error.value.line, error.value.column) == (1, 1)


def test_gate_names_are_case_insensitive():
    ir = parse_circuit("qubits 2\ncnot 1 0\nRz 1 -0.25\n")

    assert [g.name for g in ir.gates] == ["CNOT", "RZ"]
    assert ir.gates[0].qubits == (1, 0)
    assert ir.gates[1].angle == -0.25


def test_gates_remember_their_line():
    ir = parse_circuit("qubits 1\n\n# skip\nH 0\n")

    assert ir.gates[0].line == 4


def test_rn_axis_is_normalized():
    (g,) = parse_circuit("qubits 1\nRN 0 1 1 0 0.3\n").gates

    assert g.axis == pytest.approx((1 / math.sqrt(2), 1 / math.sqrt(2), 0.0))


def test_invalid_utf8_is_a_parse_error(tmp_path):
    path = tmp_path / "bad.qc"
    path.write_bytes(b"qubits 1\nX \xff0\n")

    with pytest.raises(CircuitParseError) as error:
        load_circuit(path)

    assert (error.value.line, error.value.column) == (2, 3)
    assert error.value.message == "invalid UTF-8"


def test_negative_qubit_index_is_rejected():
    with pytest.raises(CircuitParseError) as error:
        parse_circuit("qubits 1\nX -1\n")

    assert error.value.column == 3
