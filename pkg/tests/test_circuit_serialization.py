import numpy as np
import pytest

from tritforge.utils.circuit_serialization import circuit_from_text, circuit_to_text, load_circuit, save_circuit
from tritforge.utils.decomposition_catalog import CATALOG_IDS, build, incomplete
from tritforge.utils.error_handlers import CircuitFormatError
from tritforge.utils.qudit_core import circuit_unitary


@pytest.mark.parametrize("entry_id", CATALOG_IDS)
def test_dumped_entries_read_back(entry_id):
    circuit = build(entry_id).circuit
    parsed = circuit_from_text(circuit_to_text(circuit, comment=entry_id))
    assert parsed.register == circuit.register
    assert dict(parsed.role_map) == dict(circuit.role_map)
    assert [op.name for op in parsed.ops] == [op.name for op in circuit.ops]
    np.testing.assert_allclose(circuit_unitary(parsed).matrix, circuit_unitary(circuit).matrix, atol=1e-12)


def test_format_layout():
    text = circuit_to_text(incomplete("B3").circuit, comment="B3*\nincomplete")
    lines = text.splitlines()
    assert lines[:2] == ["# B3*", "# incomplete"]
    assert lines[2] == "dims 3,3,3"
    assert lines[3] == "role control1=0 control2=1 target=2"
    assert lines[4:] == ["CX[1;12] 0,1", "X12 1", "CX[1;01] 1,2"]
    assert text.endswith("\n")


def test_parameterized_gates_survive():
    from tritforge.utils.gate_library import imperfect_cnot, rx_error
    from tritforge.utils.qudit_core import Circuit, QuditRegister

    circuit = Circuit.from_ops(QuditRegister.qutrits(2), [(rx_error(0.123456789), (0,)), (imperfect_cnot(0.5), (0, 1))])
    parsed = circuit_from_text(circuit_to_text(circuit))
    np.testing.assert_allclose(circuit_unitary(parsed).matrix, circuit_unitary(circuit).matrix, atol=1e-15)


@pytest.mark.parametrize("text,line_no", [
    ("X01 0\n", 1),
    ("dims 3,3\n\nFOO 0\n", 3),
    ("dims 3,3\nX01 a\n", 2),
    ("dims 3,5\n", 1),
    ("# only a comment\n", 0),
    ("dims 3,3\nrole control1\n", 2),
])
def test_errors_carry_line_numbers(text, line_no):
    with pytest.raises(CircuitFormatError) as exc_info:
        circuit_from_text(text)
    assert exc_info.value.line_no == line_no


def test_gate_on_wrong_site_dims():
    with pytest.raises(CircuitFormatError):
        circuit_from_text("dims 2,3\nX01 0\n")


def test_save_and_load(tmp_path):
    circuit = build("D3").circuit
    result = save_circuit(circuit, tmp_path / "nested" / "d3.txt", comment="D3")
    assert result["status"] == "success"
    loaded = load_circuit(tmp_path / "nested" / "d3.txt")
    assert [op.name for op in loaded.ops] == ["CSUM", "CX[2;01]", "CMIN"]
