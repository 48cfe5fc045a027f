"""
Decomposition Catalog
Every Toffoli decomposition the project knows: the qutrit-assisted
three-gate families (A, B, C), the supplemental D family, the iSWAP-based
construction, the 10-CNOT qubit reference, their incomplete variants and
the n-controlled ladder.

Sites: Q1 = 0, Q2 = 1, Q3 = 2 with roles control1 = Q1, control2 = Q2,
target = Q3. No entry is handed out before it passes its own check.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import Callable, Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from tritforge.config.environment import config
from tritforge.models.pydantic_models import CatalogListing
from tritforge.utils.cache_utils import get_entry_cached
from tritforge.utils.error_handlers import CatalogError, ConstructionIntegrityError
from tritforge.utils.gate_library import (
    GateDef,
    HardwareFlag,
    cmin,
    controlled_cyclic_x,
    controlled_subspace_x,
    controlled_z_on_level,
    csum,
    iswap,
    qubit_cnot,
    qubit_hadamard,
    subspace_x,
    t_gate,
)
from tritforge.utils.qudit_core import Circuit, QuditRegister, Unitary, apply_local, basis_state
from tritforge.utils.verifier import (
    declared_behavior_check,
    oracle_conditioned_x,
    oracle_multi_controlled_x,
    role_sites,
    toffoli_equivalence,
)

logger = logging.getLogger(__name__)

CATALOG_IDS: Tuple[str, ...] = (
    "A1", "A2", "B1", "B2", "B3", "C1", "C2", "C3",
    "D1", "D1S", "D2", "D3", "ISWAP", "REF10CX",
)
INCOMPLETE_IDS: Tuple[str, ...] = (
    "A1", "A2", "B1", "B2", "B3", "C1", "C2", "C3", "D1", "D2", "D3",
)
ISWAP_COMPENSATIONS = ("after", "before", "none")
N_CONTROLLED_RANGE = (2, 5)

Q1, Q2, Q3 = 0, 1, 2
TOFFOLI_ROLES = {"control1": Q1, "control2": Q2, "target": Q3}

# Conventional (exclusive) CNOT: |1>-controlled X01
CONVENTIONAL_CNOT = "CX[1;01]"


class EntryFlag(str, Enum):
    NEEDS_X02_TWO_PHOTON = "needs_x02_two_photon"
    NEEDS_EXCLUSIVE_CNOT = "needs_exclusive_cnot"
    ISWAP_BASED = "iswap_based"


@dataclass(frozen=True, eq=False)
class DecompositionEntry:
    """A verified catalog record."""

    id: str
    circuit: Circuit
    complete: bool
    central_index: Optional[int]
    flags: FrozenSet[EntryFlag]
    expected_two_site_count: int
    declared_oracle: Unitary
    toffoli_equivalent: bool
    junk: Mapping[str, str] = field(default_factory=dict)
    notes: str = ""

    def __post_init__(self):
        object.__setattr__(self, "flags", frozenset(self.flags))
        object.__setattr__(self, "junk", MappingProxyType(dict(self.junk)))

    @property
    def n_controls(self) -> int:
        return len(role_sites(self.circuit)) - 1

    @property
    def qutrit_based(self) -> bool:
        return (
            all(d == 3 for d in self.circuit.register.dims)
            and EntryFlag.ISWAP_BASED not in self.flags
        )

    def listing(self) -> CatalogListing:
        return CatalogListing(
            id=self.id,
            flags=sorted(f.value for f in self.flags),
            expected_two_site_count=self.expected_two_site_count,
            complete=self.complete,
        )


@dataclass(frozen=True)
class _Draft:
    circuit: Circuit
    expected_two_site_count: int
    central_index: Optional[int] = None
    declared_oracle: Optional[Unitary] = None
    toffoli_equivalent: bool = True
    notes: str = ""


def _toffoli_circuit(ops: Sequence[Tuple[GateDef, Sequence[int]]]) -> Circuit:
    return Circuit.from_ops(QuditRegister.qutrits(3), ops, TOFFOLI_ROLES)


def _cnot() -> GateDef:
    return controlled_subspace_x(1, 0, 1)


# Three-gate families. Single-qutrit relabelings carry no duration weight.

def _a1() -> _Draft:
    lift = controlled_subspace_x(0, 1, 2)
    return _Draft(_toffoli_circuit([(lift, (Q1, Q2)), (_cnot(), (Q2, Q3)), (lift, (Q1, Q2))]), 3, central_index=1)


def _a2() -> _Draft:
    x01, x02 = subspace_x(0, 1), subspace_x(0, 2)
    half = [(x01, (Q1,)), (x02, (Q2,)), (_cnot(), (Q1, Q2)), (x02, (Q2,)), (x01, (Q1,))]
    ops = half + [(_cnot(), (Q2, Q3))] + half[::-1]
    return _Draft(_toffoli_circuit(ops), 3, central_index=5)


def _b1() -> _Draft:
    lift = controlled_subspace_x(1, 1, 2)
    central = controlled_subspace_x(2, 0, 1)
    return _Draft(_toffoli_circuit([(lift, (Q1, Q2)), (central, (Q2, Q3)), (lift, (Q1, Q2))]), 3, central_index=1)


def _b2() -> _Draft:
    x02, x12 = subspace_x(0, 2), subspace_x(1, 2)
    half = [(x02, (Q2,)), (_cnot(), (Q1, Q2)), (x02, (Q2,)), (x12, (Q2,))]
    ops = half + [(_cnot(), (Q2, Q3))] + half[::-1]
    return _Draft(_toffoli_circuit(ops), 3, central_index=4)


def _b3() -> _Draft:
    lift, x12 = controlled_subspace_x(1, 1, 2), subspace_x(1, 2)
    ops = [(lift, (Q1, Q2)), (x12, (Q2,)), (_cnot(), (Q2, Q3)), (x12, (Q2,)), (lift, (Q1, Q2))]
    return _Draft(
        _toffoli_circuit(ops), 3, central_index=2,
        notes="X12 placed inside the CX12 pair so Q2 leaves |2> before the central CNOT",
    )


def _c1() -> _Draft:
    x01, lift = subspace_x(0, 1), controlled_subspace_x(1, 0, 2)
    central = controlled_subspace_x(2, 0, 1)
    ops = [(x01, (Q2,)), (lift, (Q1, Q2)), (central, (Q2, Q3)), (lift, (Q1, Q2)), (x01, (Q2,))]
    return _Draft(_toffoli_circuit(ops), 3, central_index=2)


def _c2() -> _Draft:
    x01, x12 = subspace_x(0, 1), subspace_x(1, 2)
    half = [(x01, (Q2,)), (x12, (Q2,)), (_cnot(), (Q1, Q2))]
    ops = half + [(_cnot(), (Q2, Q3))] + half[::-1]
    return _Draft(_toffoli_circuit(ops), 3, central_index=3)


def _c3() -> _Draft:
    x01, x12, lift = subspace_x(0, 1), subspace_x(1, 2), controlled_subspace_x(1, 0, 2)
    half = [(x01, (Q2,)), (lift, (Q1, Q2)), (x12, (Q2,))]
    ops = half + [(_cnot(), (Q2, Q3))] + half[::-1]
    return _Draft(
        _toffoli_circuit(ops), 3, central_index=3,
        notes="X12 placed after the CX02 so the |11> input is out of |2> during the central CNOT",
    )


# D family

def _d1() -> _Draft:
    ops = [
        (controlled_cyclic_x(1, "plus"), (Q1, Q2)),
        (controlled_subspace_x(2, 0, 1), (Q2, Q3)),
        (controlled_cyclic_x(1, "minus"), (Q1, Q2)),
    ]
    return _Draft(_toffoli_circuit(ops), 3, central_index=1)


def _d1s() -> _Draft:
    ops = [
        (controlled_cyclic_x(1, "minus"), (Q1, Q2)),
        (controlled_subspace_x(2, 0, 1), (Q2, Q3)),
        (controlled_cyclic_x(1, "plus"), (Q1, Q2)),
    ]
    return _Draft(
        _toffoli_circuit(ops), 3,
        declared_oracle=oracle_conditioned_x((1, 0)),
        toffoli_equivalent=False,
        notes="rotations swapped: NOT on the target for control input |10>",
    )


def _d2() -> _Draft:
    lift, step = controlled_subspace_x(1, 1, 2), controlled_subspace_x(1, 0, 1)
    ops = [
        (lift, (Q1, Q2)), (step, (Q1, Q2)),
        (controlled_subspace_x(2, 0, 1), (Q2, Q3)),
        (step, (Q1, Q2)), (lift, (Q1, Q2)),
    ]
    return _Draft(_toffoli_circuit(ops), 5, central_index=2)


def _d3() -> _Draft:
    ops = [(csum(), (Q1, Q2)), (controlled_subspace_x(2, 0, 1), (Q2, Q3)), (cmin(), (Q1, Q2))]
    return _Draft(_toffoli_circuit(ops), 3, central_index=1)


# iSWAP-based construction

def _iswap_draft(compensation: str) -> _Draft:
    if compensation not in ISWAP_COMPENSATIONS:
        raise CatalogError(f"Unknown iSWAP compensation '{compensation}', expected one of {ISWAP_COMPENSATIONS}")
    x12, gate = subspace_x(1, 2), iswap()
    body = [(x12, (Q1,)), (gate, (Q1, Q2)), (_cnot(), (Q2, Q3)), (gate, (Q1, Q2)), (x12, (Q1,))]
    fix = [(controlled_z_on_level(0), (Q1, Q2))]
    if compensation == "after":
        ops = body + fix
    elif compensation == "before":
        ops = fix + body
    else:
        ops = body

    if compensation == "none":
        # Toffoli with a pi phase on control input |01>
        phases = np.ones(8, dtype=complex)
        phases[2:4] = -1.0
        return _Draft(
            _toffoli_circuit(ops), 3,
            declared_oracle=Unitary(oracle_multi_controlled_x(2).matrix @ np.diag(phases)),
            toffoli_equivalent=False,
            notes="uncompensated: the two iSWAPs leave a phase of pi on control |01>",
        )
    return _Draft(_toffoli_circuit(ops), 4, notes=f"CZ0 compensation placed {compensation} the sequence")


# Qubit-only reference: 10 CNOTs, 9 single-qubit gates, depth 15

def _ref10cx() -> _Draft:
    c1, c2, t = 0, 1, 2
    h, tg, tdg, cx = qubit_hadamard(), t_gate(), t_gate(dagger=True), qubit_cnot()
    ops = [
        (h, (t,)), (cx, (c2, t)), (tdg, (t,)), (cx, (c1, c2)), (cx, (c2, t)),
        (cx, (c1, c2)), (cx, (c2, t)), (tg, (t,)), (cx, (c2, t)), (tdg, (t,)),
        (cx, (c2, t)), (cx, (c1, c2)), (cx, (c2, t)), (tg, (t,)), (h, (t,)),
        (tg, (c1,)), (tdg, (c2,)), (cx, (c1, c2)), (tg, (c2,)),
    ]
    circuit = Circuit.from_ops(QuditRegister.qubits(3), ops, {"control1": c1, "control2": c2, "target": t})
    return _Draft(circuit, 10)


_BUILDERS: Dict[str, Callable[[], _Draft]] = {
    "A1": _a1, "A2": _a2, "B1": _b1, "B2": _b2, "B3": _b3,
    "C1": _c1, "C2": _c2, "C3": _c3,
    "D1": _d1, "D1S": _d1s, "D2": _d2, "D3": _d3,
    "ISWAP": lambda: _iswap_draft("after"),
    "REF10CX": _ref10cx,
}


# Derived metadata

def _qubit_inputs(circuit: Circuit):
    register = circuit.register
    for bits in itertools.product((0, 1), repeat=register.n_sites):
        yield basis_state(register, bits)


def derive_flags(circuit: Circuit) -> FrozenSet[EntryFlag]:
    """Hardware requirements read off the circuit itself."""
    flags = set()
    if any(HardwareFlag.TWO_PHOTON in op.gate.hardware_flags for op in circuit.ops):
        flags.add(EntryFlag.NEEDS_X02_TWO_PHOTON)
    if any(op.name == "ISWAP" for op in circuit.ops):
        flags.add(EntryFlag.ISWAP_BASED)

    if any(op.name == CONVENTIONAL_CNOT for op in circuit.ops):
        for state in _qubit_inputs(circuit):
            for op in circuit.ops:
                if op.name == CONVENTIONAL_CNOT and state.level_populations(op.sites[0])[2] > config.TAU_THRESHOLD:
                    flags.add(EntryFlag.NEEDS_EXCLUSIVE_CNOT)
                    break
                state = apply_local(state, op.gate.matrix, op.sites)
            if EntryFlag.NEEDS_EXCLUSIVE_CNOT in flags:
                break
    return frozenset(flags)


def compute_junk(circuit: Circuit, entry_id: str) -> Dict[str, str]:
    """Control levels left by a truncated circuit, per control input (target |0>)."""
    sites = role_sites(circuit)
    controls = sites[:-1]
    junk = {}
    for pattern in itertools.product((0, 1), repeat=len(controls)):
        digits = [0] * circuit.register.n_sites
        for site, level in zip(controls, pattern):
            digits[site] = level
        state = basis_state(circuit.register, digits)
        for op in circuit.ops:
            state = apply_local(state, op.gate.matrix, op.sites)
        peak = int(np.argmax(np.abs(state.amplitudes)))
        if abs(abs(state.amplitudes[peak]) - 1.0) > config.TOL_BASIS:
            raise ConstructionIntegrityError(entry_id, f"controls end in superposition for input {pattern}")
        out = circuit.register.digits_of(peak)
        junk["".join(map(str, pattern))] = "".join(str(out[s]) for s in controls)
    return junk


def _verify(entry: DecompositionEntry) -> DecompositionEntry:
    """Hard-fail any entry that does not do what it declares."""
    count = entry.circuit.two_site_count()
    if count != entry.expected_two_site_count:
        raise ConstructionIntegrityError(
            entry.id, f"{count} two-site gates, expected {entry.expected_two_site_count}"
        )
    declared = declared_behavior_check(entry)
    if not declared.equivalent:
        raise ConstructionIntegrityError(
            entry.id,
            f"declared behaviour deviates by {declared.max_deviation:.3e} "
            f"(leakage {declared.leakage_norm:.3e}, worst input {declared.worst_input})",
        )
    if entry.complete:
        equivalent = toffoli_equivalence(entry).equivalent
        if equivalent != entry.toffoli_equivalent:
            raise ConstructionIntegrityError(
                entry.id, f"Toffoli equivalence is {equivalent}, declared {entry.toffoli_equivalent}"
            )
    logger.debug(f"Verified catalog entry {entry.id} ({count} two-site gates, flags {sorted(f.value for f in entry.flags)})")
    return entry


def _finalize(entry_id: str, draft: _Draft) -> DecompositionEntry:
    oracle = draft.declared_oracle
    if oracle is None:
        oracle = oracle_multi_controlled_x(len(role_sites(draft.circuit)) - 1)
    return _verify(DecompositionEntry(
        id=entry_id,
        circuit=draft.circuit,
        complete=True,
        central_index=draft.central_index,
        flags=derive_flags(draft.circuit),
        expected_two_site_count=draft.expected_two_site_count,
        declared_oracle=oracle,
        toffoli_equivalent=draft.toffoli_equivalent,
        notes=draft.notes,
    ))


# Public constructors

def build(entry_id: str) -> DecompositionEntry:
    """Build and verify a catalog entry by id."""
    if entry_id not in _BUILDERS:
        raise CatalogError(f"Unknown decomposition '{entry_id}'. Known ids: {', '.join(CATALOG_IDS)}")
    return get_entry_cached(f"build:{entry_id}", lambda: _finalize(entry_id, _BUILDERS[entry_id]()))


def incomplete(entry_id: str) -> DecompositionEntry:
    """The entry truncated right after its central gate."""
    complete_entry = build(entry_id)
    if complete_entry.central_index is None or not complete_entry.toffoli_equivalent:
        raise CatalogError(f"{entry_id} has no incomplete variant")

    def _build() -> DecompositionEntry:
        circuit = complete_entry.circuit.prefix(complete_entry.central_index)
        return _verify(DecompositionEntry(
            id=f"{entry_id}*",
            circuit=circuit,
            complete=False,
            central_index=complete_entry.central_index,
            flags=derive_flags(circuit),
            expected_two_site_count=circuit.two_site_count(),
            declared_oracle=complete_entry.declared_oracle,
            toffoli_equivalent=False,
            junk=compute_junk(circuit, entry_id),
            notes=complete_entry.notes,
        ))

    return get_entry_cached(f"incomplete:{entry_id}", _build)


def n_controlled(n: int) -> DecompositionEntry:
    """
    Ladder for n controls on sites 0..n-1 and the target on site n.

    Controls are lifted into |2> one after the other, the last control
    drives the target, then the chain is undone.
    """
    low, high = N_CONTROLLED_RANGE
    if not low <= n <= high:
        raise CatalogError(f"n_controlled supports {low} <= n <= {high}, got {n}")

    def _build() -> DecompositionEntry:
        chain = [(controlled_subspace_x(1, 1, 2), (0, 1))]
        chain += [(controlled_subspace_x(2, 1, 2), (k - 1, k)) for k in range(2, n)]
        ops = chain + [(controlled_subspace_x(2, 0, 1), (n - 1, n))] + chain[::-1]
        roles = {f"control{k + 1}": k for k in range(n)}
        roles["target"] = n
        circuit = Circuit.from_ops(QuditRegister.qutrits(n + 1), ops, roles)
        return _finalize(f"NC{n}", _Draft(circuit, 2 * n - 1, central_index=len(chain)))

    return get_entry_cached(f"n_controlled:{n}", _build)


def iswap_entry(compensation: str = "after") -> DecompositionEntry:
    """The iSWAP construction with its CZ0 placed after, before, or left out."""
    if compensation == "after":
        return build("ISWAP")
    draft = _iswap_draft(compensation)
    return get_entry_cached(
        f"iswap:{compensation}", lambda: _finalize(f"ISWAP-{compensation}", draft)
    )


def _swap_first_two(matrix: np.ndarray, n_qubits: int) -> np.ndarray:
    tensor = matrix.reshape((2,) * (2 * n_qubits))
    axes = list(range(2 * n_qubits))
    axes[0], axes[1] = axes[1], axes[0]
    axes[n_qubits], axes[n_qubits + 1] = axes[n_qubits + 1], axes[n_qubits]
    return tensor.transpose(axes).reshape(matrix.shape)


def swap_controls(entry: DecompositionEntry) -> DecompositionEntry:
    """Same circuit with control1 and control2 exchanged in the role map."""
    roles = dict(entry.circuit.role_map)
    roles["control1"], roles["control2"] = roles["control2"], roles["control1"]
    oracle = Unitary(_swap_first_two(entry.declared_oracle.matrix, entry.n_controls + 1))
    junk = {label[1] + label[0] + label[2:]: out[1] + out[0] + out[2:] for label, out in entry.junk.items()}
    return DecompositionEntry(
        id=f"{entry.id}~",
        circuit=entry.circuit.with_role_map(roles),
        complete=entry.complete,
        central_index=entry.central_index,
        flags=entry.flags,
        expected_two_site_count=entry.expected_two_site_count,
        declared_oracle=oracle,
        toffoli_equivalent=entry.toffoli_equivalent,
        junk=junk,
        notes=entry.notes,
    )


def list_catalog() -> List[CatalogListing]:
    """Metadata for every catalog entry, ordered by id."""
    return [build(entry_id).listing() for entry_id in sorted(CATALOG_IDS)]
