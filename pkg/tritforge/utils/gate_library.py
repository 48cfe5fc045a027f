"""
Gate Library
Single- and two-qutrit gates, the qubit gates of the reference Toffoli
circuit, and the error/noise gates used by the QEC simulation.

Gates act on |2> as identity unless their definition says otherwise.
Products written X_ab * X_cd are read in circuit order (X_ab first).
"""
import logging
import re
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, FrozenSet, Optional, Tuple

import numpy as np
from cachetools import cached

from tritforge.utils.cache_utils import gate_cache, gate_lock
from tritforge.utils.error_handlers import GateConstructionError, InvalidSubspaceError
from tritforge.utils.qudit_core import Unitary

logger = logging.getLogger(__name__)

OMEGA = np.exp(2j * np.pi / 3)
LEVELS = (0, 1, 2)


class HardwareFlag(str, Enum):
    """Hardware requirements a gate places on the device."""

    TWO_PHOTON = "two_photon"      # drives the 0-2 transition directly
    EXCLUSIVE = "exclusive"        # must be exact identity for non-matching control levels
    ACTIVE_Q1Q2 = "active_q1q2"    # controlled transition involving |2> (omega_12 drive)


@dataclass(frozen=True, eq=False)
class GateDef:
    name: str
    local_dims: Tuple[int, ...]
    unitary: Unitary
    duration_weight: float
    hardware_flags: FrozenSet[HardwareFlag] = frozenset()

    def __post_init__(self):
        local_dims = tuple(self.local_dims)
        if int(np.prod(local_dims)) != self.unitary.dim:
            raise GateConstructionError(
                f"{self.name}: matrix dimension {self.unitary.dim} does not match local dims {local_dims}"
            )
        if self.duration_weight < 0:
            raise GateConstructionError(f"{self.name}: negative duration weight")
        if len(local_dims) == 1 and self.duration_weight != 0:
            raise GateConstructionError(f"{self.name}: single-site gates carry no duration weight")
        object.__setattr__(self, "local_dims", local_dims)
        object.__setattr__(self, "hardware_flags", frozenset(self.hardware_flags))

    @property
    def matrix(self) -> np.ndarray:
        return self.unitary.matrix

    @property
    def n_sites(self) -> int:
        return len(self.local_dims)


def _single(name: str, matrix, flags=()) -> GateDef:
    return GateDef(name, (3,), Unitary(matrix), 0.0, frozenset(flags))


def _two(name: str, matrix, flags=(), local_dims=(3, 3)) -> GateDef:
    return GateDef(name, local_dims, Unitary(matrix), 1.0, frozenset(flags))


def _check_subspace(i: int, j: int) -> Tuple[int, int]:
    if i == j or i not in LEVELS or j not in LEVELS:
        raise InvalidSubspaceError(i, j)
    return min(i, j), max(i, j)


def _subspace_x_matrix(i: int, j: int) -> np.ndarray:
    matrix = np.eye(3, dtype=complex)
    matrix[[i, j]] = matrix[[j, i]]
    return matrix


def _controlled(control_level: int, target_matrix: np.ndarray) -> np.ndarray:
    """|c><c| (x) target + (I - |c><c|) (x) I on two qutrits."""
    blocks = [target_matrix if m == control_level else np.eye(3) for m in LEVELS]
    matrix = np.zeros((9, 9), dtype=complex)
    for m, block in enumerate(blocks):
        matrix[3 * m:3 * m + 3, 3 * m:3 * m + 3] = block
    return matrix


def subspace_x(i: int, j: int) -> GateDef:
    """Pauli X on the |i>-|j> subspace."""
    i, j = _check_subspace(i, j)
    flags = {HardwareFlag.TWO_PHOTON} if (i, j) == (0, 2) else set()
    return _single(f"X{i}{j}", _subspace_x_matrix(i, j), flags)


def cyclic_x(direction: str) -> GateDef:
    """X+ maps |n> to |n+1 mod 3>, X- maps |n> to |n-1 mod 3>."""
    if direction not in ("plus", "minus"):
        raise GateConstructionError(f"Unknown cyclic direction '{direction}'")
    shift = 1 if direction == "plus" else -1
    matrix = np.zeros((3, 3), dtype=complex)
    for n in LEVELS:
        matrix[(n + shift) % 3, n] = 1.0
    return _single("X+" if direction == "plus" else "X-", matrix)


def qutrit_hadamard() -> GateDef:
    k = np.arange(3)
    return _single("H3", OMEGA ** np.outer(k, k) / np.sqrt(3))


def qutrit_z() -> GateDef:
    return _single("Z3", np.diag(OMEGA ** np.arange(3)))


def controlled_phase() -> GateDef:
    """Sum_n |n><n| (x) Z^n."""
    diagonal = [OMEGA ** (m * n) for m in LEVELS for n in LEVELS]
    return _two("CPHI", np.diag(diagonal))


def _shift_permutation(sign: int) -> np.ndarray:
    matrix = np.zeros((9, 9), dtype=complex)
    for m in LEVELS:
        for n in LEVELS:
            matrix[3 * m + (n + sign * m) % 3, 3 * m + n] = 1.0
    return matrix


@cached(cache=gate_cache, key=lambda sign: ("hadamard_sandwich", sign), lock=gate_lock)
def pin_hadamard_sandwich(sign: int) -> Tuple[str, str]:
    """
    Find the Hadamard placement turning CPHI into CSUM (sign=+1) or CMIN (sign=-1).

    Returns (outer, inner) with the gate equal to (I (x) outer) CPHI (I (x) inner)
    in matrix order, each being "H3" or "H3dg".
    """
    h = qutrit_hadamard().matrix
    options = {"H3": h, "H3dg": h.conj().T}
    cphi = controlled_phase().matrix
    target = _shift_permutation(sign)
    for outer_name, outer in options.items():
        for inner_name, inner in options.items():
            candidate = np.kron(np.eye(3), outer) @ cphi @ np.kron(np.eye(3), inner)
            if np.allclose(candidate, target, atol=1e-12):
                logger.debug(f"Pinned sandwich for shift {sign:+d}: outer={outer_name}, inner={inner_name}")
                return outer_name, inner_name
    raise GateConstructionError(f"No Hadamard sandwich of CPHI reproduces the shift {sign:+d} permutation")


def _sandwiched(sign: int) -> np.ndarray:
    h = qutrit_hadamard().matrix
    options = {"H3": h, "H3dg": h.conj().T}
    outer, inner = pin_hadamard_sandwich(sign)
    cphi = controlled_phase().matrix
    return np.kron(np.eye(3), options[outer]) @ cphi @ np.kron(np.eye(3), options[inner])


def csum() -> GateDef:
    """|m, n> -> |m, n+m mod 3>, built from CPHI and qutrit Hadamards."""
    return _two("CSUM", _sandwiched(+1), {HardwareFlag.ACTIVE_Q1Q2})


def cmin() -> GateDef:
    """|m, n> -> |m, n-m mod 3>."""
    return _two("CMIN", _sandwiched(-1), {HardwareFlag.ACTIVE_Q1Q2})


def controlled_subspace_x(control_level: int, i: int, j: int) -> GateDef:
    """X_ij on the target iff the control sits exactly at control_level."""
    i, j = _check_subspace(i, j)
    if control_level not in LEVELS:
        raise InvalidSubspaceError(control_level, control_level)
    flags = {HardwareFlag.EXCLUSIVE}
    if (i, j) == (0, 2):
        flags.add(HardwareFlag.TWO_PHOTON)
    if 2 in (i, j) or control_level == 2:
        flags.add(HardwareFlag.ACTIVE_Q1Q2)
    return _two(f"CX[{control_level};{i}{j}]", _controlled(control_level, _subspace_x_matrix(i, j)), flags)


def controlled_cyclic_x(control_level: int, direction: str) -> GateDef:
    """X+ or X- on the target iff the control sits at control_level."""
    if control_level not in LEVELS:
        raise InvalidSubspaceError(control_level, control_level)
    cyclic = cyclic_x(direction)
    flags = {HardwareFlag.EXCLUSIVE, HardwareFlag.ACTIVE_Q1Q2}
    return _two(f"CX[{control_level};{cyclic.name}]", _controlled(control_level, cyclic.matrix), flags)


def iswap() -> GateDef:
    """iSWAP on the 01 (x) 01 subspace, identity on components involving |2>."""
    matrix = np.eye(9, dtype=complex)
    matrix[1, 1] = matrix[3, 3] = 0.0
    matrix[3, 1] = matrix[1, 3] = 1j
    return _two("ISWAP", matrix)


def controlled_z_on_level(control_level: int) -> GateDef:
    """Phase -1 on |control_level, 1>."""
    if control_level not in (0, 1):
        raise InvalidSubspaceError(control_level, 1)
    diagonal = np.ones(9, dtype=complex)
    diagonal[3 * control_level + 1] = -1.0
    return _two(f"CZ{control_level}", np.diag(diagonal))


def _rx_matrix(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s, 0], [-1j * s, c, 0], [0, 0, 1]], dtype=complex)


def rx_error(theta: float) -> GateDef:
    """X-axis rotation on the 01 subspace."""
    theta = float(theta)
    if not np.isfinite(theta):
        raise GateConstructionError(f"Rotation angle must be finite, got {theta}")
    return _single(f"RX({theta!r})", _rx_matrix(theta))


def imperfect_cnot(epsilon2: float) -> GateDef:
    """
    Conventional CNOT whose control |2> leaks a partial rotation.

    Controls |0> and |1> behave as the |1>-controlled X01; control |2>
    rotates the target by rx_error(epsilon2). epsilon2 = 0 is the exclusive CNOT.
    """
    epsilon2 = float(epsilon2)
    matrix = np.zeros((9, 9), dtype=complex)
    matrix[0:3, 0:3] = np.eye(3)
    matrix[3:6, 3:6] = _subspace_x_matrix(0, 1)
    matrix[6:9, 6:9] = _rx_matrix(epsilon2)
    return _two(f"CNOTeps({epsilon2!r})", matrix)


def qubit_hadamard_on_qutrit() -> GateDef:
    matrix = np.eye(3, dtype=complex)
    matrix[:2, :2] = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    return _single("H01", matrix)


# Qubit gates (reference circuit on 2-level sites)

def qubit_hadamard() -> GateDef:
    return GateDef("H", (2,), Unitary(np.array([[1, 1], [1, -1]]) / np.sqrt(2)), 0.0)


def t_gate(dagger: bool = False) -> GateDef:
    phase = np.exp(-1j * np.pi / 4) if dagger else np.exp(1j * np.pi / 4)
    return GateDef("Tdg" if dagger else "T", (2,), Unitary(np.diag([1, phase])), 0.0)


def qubit_cnot() -> GateDef:
    matrix = np.eye(4, dtype=complex)
    matrix[[2, 3]] = matrix[[3, 2]]
    return GateDef("CNOT", (2, 2), Unitary(matrix), 1.0)


# Name registry used by the circuit text format

_FIXED: Dict[str, Callable[[], GateDef]] = {
    "X+": lambda: cyclic_x("plus"),
    "X-": lambda: cyclic_x("minus"),
    "H3": qutrit_hadamard,
    "Z3": qutrit_z,
    "CPHI": controlled_phase,
    "CSUM": csum,
    "CMIN": cmin,
    "ISWAP": iswap,
    "H01": qubit_hadamard_on_qutrit,
    "H": qubit_hadamard,
    "T": t_gate,
    "Tdg": lambda: t_gate(dagger=True),
    "CNOT": qubit_cnot,
}

_PATTERNS = [
    (re.compile(r"^X([012])([012])$"), lambda m: subspace_x(int(m[1]), int(m[2]))),
    (re.compile(r"^CX\[([012]);([012])([012])\]$"),
     lambda m: controlled_subspace_x(int(m[1]), int(m[2]), int(m[3]))),
    (re.compile(r"^CX\[([012]);X([+-])\]$"),
     lambda m: controlled_cyclic_x(int(m[1]), "plus" if m[2] == "+" else "minus")),
    (re.compile(r"^CZ([01])$"), lambda m: controlled_z_on_level(int(m[1]))),
    (re.compile(r"^RX\((.+)\)$"), lambda m: rx_error(float(m[1]))),
    (re.compile(r"^CNOTeps\((.+)\)$"), lambda m: imperfect_cnot(float(m[1]))),
]


def gate_from_name(name: str) -> Optional[GateDef]:
    """Rebuild a gate from its stable name; None when the name is unknown."""
    if name in _FIXED:
        return _FIXED[name]()
    for pattern, build in _PATTERNS:
        match = pattern.match(name)
        if match:
            try:
                return build(match)
            except (ValueError, InvalidSubspaceError, GateConstructionError) as e:
                logger.debug(f"Gate name '{name}' matched but failed to build: {e}")
                return None
    return None
