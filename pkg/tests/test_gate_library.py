import numpy as np
import pytest

from tritforge.utils.error_handlers import GateConstructionError, InvalidSubspaceError
from tritforge.utils.gate_library import (
    GateDef,
    HardwareFlag,
    cmin,
    controlled_subspace_x,
    controlled_z_on_level,
    csum,
    cyclic_x,
    gate_from_name,
    imperfect_cnot,
    iswap,
    pin_hadamard_sandwich,
    qubit_cnot,
    qutrit_hadamard,
    rx_error,
    subspace_x,
    t_gate,
)
from tritforge.utils.qudit_core import Unitary


def _ket(index, dim=9):
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


class TestSingleQutritGates:
    def test_subspace_x_swaps_levels(self):
        gate = subspace_x(1, 2)
        np.testing.assert_allclose(gate.matrix @ _ket(1, 3), _ket(2, 3))
        np.testing.assert_allclose(gate.matrix @ _ket(0, 3), _ket(0, 3))

    def test_x02_needs_two_photon_drive(self):
        assert HardwareFlag.TWO_PHOTON in subspace_x(0, 2).hardware_flags
        assert not subspace_x(0, 1).hardware_flags

    def test_subspace_name_is_normalized(self):
        assert subspace_x(2, 0).name == "X02"

    @pytest.mark.parametrize("i,j", [(1, 1), (0, 3), (-1, 2)])
    def test_invalid_subspace(self, i, j):
        with pytest.raises(InvalidSubspaceError):
            subspace_x(i, j)

    def test_cyclic_shifts(self):
        plus, minus = cyclic_x("plus").matrix, cyclic_x("minus").matrix
        np.testing.assert_allclose(plus @ _ket(2, 3), _ket(0, 3))
        np.testing.assert_allclose(plus @ minus, np.eye(3))
        np.testing.assert_allclose(np.linalg.matrix_power(plus, 3), np.eye(3))

    def test_unknown_cyclic_direction(self):
        with pytest.raises(GateConstructionError):
            cyclic_x("sideways")

    def test_qutrit_hadamard_is_unitary_fourier(self):
        h = qutrit_hadamard().matrix
        np.testing.assert_allclose(h @ h.conj().T, np.eye(3), atol=1e-12)
        np.testing.assert_allclose(np.abs(h), np.full((3, 3), 3 ** -0.5))

    def test_rx_error_leaves_level_two(self):
        gate = rx_error(np.pi)
        np.testing.assert_allclose(gate.matrix @ _ket(0, 3), -1j * _ket(1, 3), atol=1e-12)
        np.testing.assert_allclose(gate.matrix @ _ket(2, 3), _ket(2, 3))

    def test_rx_error_rejects_non_finite(self):
        with pytest.raises(GateConstructionError):
            rx_error(float("inf"))

    def test_single_site_gates_have_no_weight(self):
        assert subspace_x(0, 1).duration_weight == 0.0


class TestTwoQutritGates:
    @pytest.mark.parametrize("builder,sign", [(csum, 1), (cmin, -1)])
    def test_sum_and_difference(self, builder, sign):
        matrix = builder().matrix
        for m in range(3):
            for n in range(3):
                out = matrix @ _ket(3 * m + n)
                np.testing.assert_allclose(np.abs(out), np.abs(_ket(3 * m + (n + sign * m) % 3)), atol=1e-12)

    def test_sandwich_is_pinned(self):
        outer, inner = pin_hadamard_sandwich(1)
        assert {outer, inner} <= {"H3", "H3dg"}
        assert pin_hadamard_sandwich(1) == (outer, inner)

    def test_exclusive_cnot_is_identity_for_control_two(self):
        matrix = controlled_subspace_x(1, 0, 1).matrix
        np.testing.assert_allclose(matrix[6:9, 6:9], np.eye(3))
        np.testing.assert_allclose(matrix[0:3, 0:3], np.eye(3))
        np.testing.assert_allclose(matrix[3:6, 3:6], subspace_x(0, 1).matrix)

    def test_controlled_flags(self):
        gate = controlled_subspace_x(1, 0, 2)
        assert gate.name == "CX[1;02]"
        assert {HardwareFlag.EXCLUSIVE, HardwareFlag.TWO_PHOTON, HardwareFlag.ACTIVE_Q1Q2} <= gate.hardware_flags
        assert gate.duration_weight == 1.0

    def test_iswap_qubit_block(self):
        matrix = iswap().matrix
        np.testing.assert_allclose(matrix @ _ket(1), 1j * _ket(3))
        np.testing.assert_allclose(matrix @ _ket(4), _ket(4))
        for index in (2, 5, 6, 7, 8):
            np.testing.assert_allclose(matrix @ _ket(index), _ket(index))

    def test_cz_on_level(self):
        diagonal = np.diag(controlled_z_on_level(0).matrix)
        assert diagonal[1] == pytest.approx(-1.0)
        assert np.count_nonzero(diagonal != 1.0) == 1
        with pytest.raises(InvalidSubspaceError):
            controlled_z_on_level(2)

    def test_imperfect_cnot_reduces_to_exclusive(self):
        np.testing.assert_allclose(imperfect_cnot(0.0).matrix, controlled_subspace_x(1, 0, 1).matrix)

    def test_imperfect_cnot_rotates_on_control_two(self):
        block = imperfect_cnot(0.4).matrix[6:9, 6:9]
        np.testing.assert_allclose(block, rx_error(0.4).matrix)


class TestQubitGates:
    def test_t_and_t_dagger_cancel(self):
        np.testing.assert_allclose(t_gate().matrix @ t_gate(dagger=True).matrix, np.eye(2), atol=1e-12)

    def test_cnot_flips_on_one(self):
        np.testing.assert_allclose(qubit_cnot().matrix @ _ket(2, 4), _ket(3, 4))


class TestGateDef:
    def test_dims_must_match_matrix(self):
        with pytest.raises(GateConstructionError):
            GateDef("bad", (3, 3), Unitary(np.eye(3)), 1.0)

    def test_single_site_weight_rejected(self):
        with pytest.raises(GateConstructionError):
            GateDef("bad", (3,), Unitary(np.eye(3)), 0.5)


class TestNameRegistry:
    @pytest.mark.parametrize("gate", [
        subspace_x(1, 2), cyclic_x("minus"), csum(), controlled_subspace_x(2, 0, 1),
        iswap(), controlled_z_on_level(1), rx_error(0.3), imperfect_cnot(0.25), t_gate(dagger=True),
    ])
    def test_names_rebuild_the_same_gate(self, gate):
        rebuilt = gate_from_name(gate.name)
        assert rebuilt is not None
        assert rebuilt.local_dims == gate.local_dims
        np.testing.assert_allclose(rebuilt.matrix, gate.matrix, atol=1e-12)

    @pytest.mark.parametrize("name", ["FOO", "X11", "CX[3;01]", "RX(abc)"])
    def test_unknown_names(self, name):
        assert gate_from_name(name) is None
