"""
Verifier
Brute-force oracles and the checkers run against catalog entries:
Toffoli equivalence on the qubit subspace, declared-behaviour checks,
incomplete-variant checks, the |2>-occupancy metric and truth tables.
"""
from __future__ import annotations

import itertools
import logging
import time
from typing import TYPE_CHECKING, Dict, List, Optional, Sequence, Tuple

import numpy as np

from tritforge.config.environment import config
from tritforge.models.pydantic_models import EquivalenceReport, TauReport, TruthRow
from tritforge.utils.error_handlers import TauNotApplicableError, WrongCheckerError
from tritforge.utils.logging_config import PerformanceLogger
from tritforge.utils.qudit_core import (
    Circuit,
    QuditRegister,
    StateVector,
    Unitary,
    apply_circuit,
    apply_local,
    basis_state,
    circuit_unitary,
    purity,
    reduced_density,
)

if TYPE_CHECKING:
    from tritforge.utils.decomposition_catalog import DecompositionEntry

logger = logging.getLogger(__name__)
perf_logger = PerformanceLogger(logger)


# Oracles

def oracle_conditioned_x(pattern: Sequence[int]) -> Unitary:
    """
    NOT on the last qubit iff the control qubits equal pattern.

    Qubit order is (control1, ..., controlN, target).
    """
    pattern = tuple(int(p) for p in pattern)
    n = len(pattern)
    dim = 2 ** (n + 1)
    matrix = np.zeros((dim, dim), dtype=complex)
    for index in range(dim):
        bits = [(index >> (n - k)) & 1 for k in range(n + 1)]
        if tuple(bits[:n]) == pattern:
            matrix[index ^ 1, index] = 1.0
        else:
            matrix[index, index] = 1.0
    return Unitary(matrix)


def oracle_multi_controlled_x(n: int) -> Unitary:
    """2^(n+1)-dimensional NOT on the target iff all n controls are |1>."""
    if n < 1:
        raise ValueError(f"need at least one control, got {n}")
    return oracle_conditioned_x((1,) * n)


def role_sites(circuit: Circuit) -> List[int]:
    """Register sites in role order: control1..controlN, then target."""
    roles = dict(circuit.role_map)
    controls = sorted(
        (r for r in roles if r.startswith("control")),
        key=lambda r: int(r[len("control"):]),
    )
    return [roles[r] for r in controls] + [roles["target"]]


def _role_basis(circuit: Circuit) -> Tuple[List[int], List[str]]:
    """Full-register indices of the role-ordered qubit basis, with their labels."""
    sites = role_sites(circuit)
    register = circuit.register
    indices, labels = [], []
    for bits in itertools.product((0, 1), repeat=len(sites)):
        digits = [0] * register.n_sites
        for site, bit in zip(sites, bits):
            digits[site] = bit
        indices.append(register.index_of(digits))
        labels.append("".join(str(b) for b in bits))
    return indices, labels


def _wrap_phase(phi: float) -> float:
    phi = float(np.angle(np.exp(1j * phi)))
    return 0.0 if abs(phi) < 1e-15 else phi


def compare_to_oracle(circuit: Circuit, oracle: Unitary, tolerance: Optional[float] = None) -> EquivalenceReport:
    """
    Compare a circuit with an oracle on the role-ordered qubit subspace.

    One global phase is fitted from the first column whose matched amplitude
    exceeds 0.5; every input is then held to that same phase.
    """
    tol = config.TOL_EQUIVALENCE if tolerance is None else tolerance
    indices, labels = _role_basis(circuit)
    if oracle.dim != len(indices):
        raise WrongCheckerError(
            f"Oracle of dimension {oracle.dim} does not match {len(indices)} role-ordered qubit inputs"
        )

    columns = circuit_unitary(circuit).matrix[:, indices]
    inside = columns[indices, :]
    outside = np.delete(columns, indices, axis=0)
    leakage = np.linalg.norm(outside, axis=0)

    expected = oracle.matrix
    phi = 0.0
    for j in range(expected.shape[1]):
        row = int(np.argmax(np.abs(expected[:, j])))
        if abs(inside[row, j]) > 0.5:
            phi = float(np.angle(inside[row, j] / expected[row, j]))
            break

    residual = inside - np.exp(1j * phi) * expected
    per_input = np.sqrt(np.linalg.norm(residual, axis=0) ** 2 + leakage ** 2)
    worst = int(np.argmax(per_input))
    max_deviation = float(per_input[worst])
    leakage_norm = float(np.max(leakage))

    return EquivalenceReport(
        equivalent=max_deviation < tol and leakage_norm < tol,
        global_phase=_wrap_phase(phi),
        max_deviation=max_deviation,
        leakage_norm=leakage_norm,
        tolerance=tol,
        worst_input=labels[worst],
        deviations={label: float(d) for label, d in zip(labels, per_input)},
    )


# Checkers

def toffoli_equivalence(entry: "DecompositionEntry", tolerance: Optional[float] = None) -> EquivalenceReport:
    """Check a complete entry against the multi-controlled NOT oracle."""
    if not entry.complete:
        raise WrongCheckerError(f"{entry.id} is incomplete; use incomplete_check")
    start = time.perf_counter()
    report = compare_to_oracle(entry.circuit, oracle_multi_controlled_x(entry.n_controls), tolerance)
    perf_logger.log_slow_check("toffoli_equivalence", entry.id, (time.perf_counter() - start) * 1000)
    return report


def declared_behavior_check(entry: "DecompositionEntry", tolerance: Optional[float] = None) -> EquivalenceReport:
    """Check an entry against its own declared behaviour."""
    if not entry.complete:
        return incomplete_check(entry, tolerance)
    return compare_to_oracle(entry.circuit, entry.declared_oracle, tolerance)


def _target_state(dim: int, rng: np.random.Generator) -> StateVector:
    amplitudes = np.zeros(dim, dtype=complex)
    amplitudes[:2] = rng.normal(size=2) + 1j * rng.normal(size=2)
    return StateVector.normalized(QuditRegister((dim,)), amplitudes)


def _flips_for(oracle: Unitary, pattern_index: int) -> bool:
    """Whether the oracle flips the target for a control pattern (target |0> in)."""
    return abs(oracle.matrix[2 * pattern_index + 1, 2 * pattern_index]) > 0.5


def _product_state(register: QuditRegister, control_sites: Sequence[int], pattern: Sequence[int],
                   target_site: int, target: StateVector) -> StateVector:
    """Controls in basis levels, target in `target`, every other site in |0>."""
    tensor = np.zeros(register.dims, dtype=complex)
    index: List = [0] * register.n_sites
    for site, level in zip(control_sites, pattern):
        index[site] = level
    index[target_site] = slice(None)
    tensor[tuple(index)] = target.amplitudes
    return StateVector(register, tensor.reshape(-1))


def _junk_probability(state: StateVector, control_sites: Sequence[int], junk: str) -> float:
    tensor = np.abs(state.amplitudes.reshape(state.register.dims)) ** 2
    index = [slice(None)] * state.register.n_sites
    for site, level in zip(control_sites, junk):
        index[site] = int(level)
    return float(np.sum(tensor[tuple(index)]))


def incomplete_check(entry: "DecompositionEntry", tolerance: Optional[float] = None,
                     rng: Optional[np.random.Generator] = None,
                     n_targets: Optional[int] = None) -> EquivalenceReport:
    """
    Check a truncated entry on random target states and every control pattern.

    The target's reduced state must be pure and equal the oracle-predicted
    (flipped or untouched) state; controls must land on the entry's junk
    pattern. Controls may sit at any qutrit level.
    """
    if entry.complete:
        raise WrongCheckerError(f"{entry.id} is complete; use toffoli_equivalence")
    tol = config.TOL_EQUIVALENCE if tolerance is None else tolerance
    rng = rng or np.random.default_rng(config.SEED)
    n_targets = config.RANDOM_TARGETS if n_targets is None else n_targets

    circuit = entry.circuit
    register = circuit.register
    sites = role_sites(circuit)
    control_sites, target_site = sites[:-1], sites[-1]
    target_dim = register.dims[target_site]

    deviations: Dict[str, float] = {}
    max_leakage = 0.0
    start = time.perf_counter()
    for _ in range(n_targets):
        target = _target_state(target_dim, rng)
        flipped = np.array(target.amplitudes, dtype=complex)
        flipped[[0, 1]] = flipped[[1, 0]]
        for p_index, pattern in enumerate(itertools.product((0, 1), repeat=len(control_sites))):
            label = "".join(str(b) for b in pattern)
            state = _product_state(register, control_sites, pattern, target_site, target)
            out = apply_circuit(circuit, state)

            rho_t = reduced_density(out, [target_site])
            expected = flipped if _flips_for(entry.declared_oracle, p_index) else target.amplitudes
            fidelity = float(np.real(np.vdot(expected, rho_t.matrix @ expected)))
            impurity = 1.0 - purity(rho_t)
            junk_miss = 1.0 - _junk_probability(out, control_sites, entry.junk[label])
            leakage = float(np.sqrt(max(0.0, np.sum(np.real(np.diag(rho_t.matrix))[2:]))))

            deviation = max(1.0 - fidelity, impurity, junk_miss, 0.0)
            deviations[label] = max(deviations.get(label, 0.0), deviation)
            max_leakage = max(max_leakage, leakage)
    perf_logger.log_slow_check("incomplete_check", entry.id, (time.perf_counter() - start) * 1000)

    worst = max(deviations, key=deviations.get)
    max_deviation = deviations[worst]
    return EquivalenceReport(
        equivalent=max_deviation < tol and max_leakage < tol,
        global_phase=0.0,
        max_deviation=max_deviation,
        leakage_norm=max_leakage,
        tolerance=tol,
        worst_input=worst,
        deviations=deviations,
    )


# Metrics and diagnostics

def tau_metric(entry: "DecompositionEntry") -> TauReport:
    """
    Time the control2 site spends in |2>, in CNOT units, per control input.

    Each op is charged its duration weight while |2> holds more than the
    threshold population; an op that moves the site into or out of |2>
    is charged half.
    """
    if not entry.qutrit_based:
        raise TauNotApplicableError(entry.id)
    circuit = entry.circuit
    sites = role_sites(circuit)
    control_sites, q2 = sites[:-1], circuit.role_map["control2"]
    threshold = config.TAU_THRESHOLD

    per_input: Dict[str, float] = {}
    for pattern in itertools.product((0, 1), repeat=len(control_sites)):
        digits = [0] * circuit.register.n_sites
        for site, level in zip(control_sites, pattern):
            digits[site] = level
        state = basis_state(circuit.register, digits)
        occupied = state.level_populations(q2)[2] > threshold
        total = 0.0
        for op in circuit.ops:
            state = apply_local(state, op.gate.matrix, op.sites)
            now = state.level_populations(q2)[2] > threshold
            weight = op.gate.duration_weight
            if occupied and now:
                total += weight
            elif occupied != now:
                total += 0.5 * weight
            occupied = now
        per_input["".join(str(b) for b in pattern)] = total

    return TauReport(entry_id=entry.id, per_input=per_input, tau_max=max(per_input.values()))


def truth_table(entry: "DecompositionEntry", tolerance: Optional[float] = None) -> Dict[str, TruthRow]:
    """Output basis state and phase for every full-register basis input."""
    tol = config.TOL_BASIS if tolerance is None else tolerance
    register = entry.circuit.register
    matrix = circuit_unitary(entry.circuit).matrix
    rows: Dict[str, TruthRow] = {}
    for index in range(register.total_dim):
        column = matrix[:, index]
        peak = int(np.argmax(np.abs(column)))
        label = register.label(index)
        if abs(abs(column[peak]) - 1.0) < tol:
            rows[label] = TruthRow(input=label, output=register.label(peak), phase=_wrap_phase(np.angle(column[peak])))
        else:
            rows[label] = TruthRow(input=label, superposed=True)
    return rows
