"""
QEC Simulation
Measurement-free three-qubit repetition code on qutrits |A1 D A2>:
encode, inject rotation errors, decode, correct with an incomplete
Toffoli, reset the ancillae with the double-drive reset, repeat with
alternating bit/phase bases.

Randomness comes from one master seed; every (cycle, stream, site)
triple gets its own SeedSequence child so results do not depend on
evaluation order.
"""
import logging
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from tritforge.config.environment import config
from tritforge.models.pydantic_models import CycleRecord, ErrorModel, FidelityReport, ResetChannel
from tritforge.utils.cache_utils import get_entry_cached
from tritforge.utils.decomposition_catalog import CONVENTIONAL_CNOT, DecompositionEntry, incomplete
from tritforge.utils.error_handlers import ConfigurationError, InvalidCircuitError
from tritforge.utils.gate_library import (
    controlled_subspace_x,
    imperfect_cnot,
    qubit_hadamard_on_qutrit,
    rx_error,
)
from tritforge.utils.qudit_core import (
    Circuit,
    DensityOperator,
    QuditRegister,
    StateVector,
    apply_circuit,
    apply_kraus,
    apply_operator,
    evolve_density_circuit,
    partial_trace,
    purity,
    reduced_density,
)

logger = logging.getLogger(__name__)

A1, D, A2 = 0, 1, 2
ANCILLAE = (A1, A2)
QEC_REGISTER = QuditRegister.qutrits(3)
DATA_REGISTER = QuditRegister.qutrits(1)

ERROR_STREAM = 0
RESET_STREAM = 1

DEFAULT_PSI = (0.6, 0.8)
RESET_EPSILON_WARNING = 0.01

State = Union[StateVector, DensityOperator]


def _stream(seed: int, cycle: int, stream: int, site: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(cycle, stream, site)))


def data_state(psi: Sequence[complex]) -> StateVector:
    """alpha|0> + beta|1> on a single qutrit."""
    alpha, beta = psi
    return StateVector(DATA_REGISTER, [alpha, beta, 0.0])


# Circuits

def encoding_circuit() -> Circuit:
    """CNOT D->A1 then D->A2. Self-inverse, so it also decodes."""
    cnot = controlled_subspace_x(1, 0, 1)
    return Circuit.from_ops(QEC_REGISTER, [(cnot, (D, A1)), (cnot, (D, A2))])


def basis_change_circuit() -> Circuit:
    h = qubit_hadamard_on_qutrit()
    return Circuit.from_ops(QEC_REGISTER, [(h, (site,)) for site in range(QEC_REGISTER.n_sites)])


def error_circuit(thetas: Sequence[float], basis: str) -> Circuit:
    """X-axis rotations per site; conjugated by H01 for the phase basis."""
    h = qubit_hadamard_on_qutrit()
    ops = []
    for site, theta in enumerate(thetas):
        if theta == 0:
            continue
        if basis == "phase":
            ops += [(h, (site,)), (rx_error(theta), (site,)), (h, (site,))]
        else:
            ops.append((rx_error(theta), (site,)))
    return Circuit.from_ops(QEC_REGISTER, ops)


def place_incomplete(entry: DecompositionEntry) -> Circuit:
    """Put an incomplete entry on |A1 D A2> with control1=A1, control2=A2, target=D."""
    roles = entry.circuit.role_map
    site_map = {roles["control1"]: A1, roles["control2"]: A2, roles["target"]: D}
    return entry.circuit.relabel(site_map, QEC_REGISTER)


def correction_circuit(decomposition_id: str, basis: str = "bit", cnot_epsilon: float = 0.0) -> Circuit:
    """Basis revert (phase cycles), decode, then the placed incomplete Toffoli."""
    key = f"correction:{decomposition_id}:{basis}:{float(cnot_epsilon)!r}"
    return get_entry_cached(key, lambda: _build_correction_circuit(decomposition_id, basis, cnot_epsilon))


def _build_correction_circuit(decomposition_id: str, basis: str, cnot_epsilon: float) -> Circuit:
    entry = incomplete(decomposition_id)
    toffoli = place_incomplete(entry)
    central = entry.central_index
    if cnot_epsilon:
        if toffoli.ops[central].name == CONVENTIONAL_CNOT:
            toffoli = toffoli.replace_op(central, imperfect_cnot(cnot_epsilon))
        else:
            logger.warning(f"{decomposition_id} has no conventional central CNOT; cnot_epsilon ignored")

    ops = []
    if basis == "phase":
        ops += [(op.gate, op.sites) for op in basis_change_circuit().ops]
    ops += [(op.gate, op.sites) for op in encoding_circuit().ops]
    ops += [(op.gate, op.sites) for op in toffoli.ops]
    return Circuit.from_ops(QEC_REGISTER, ops)


def _run(circuit: Circuit, state: State) -> State:
    if isinstance(state, DensityOperator):
        return evolve_density_circuit(circuit, state)
    return apply_circuit(circuit, state)


def _data_density(state: State) -> DensityOperator:
    if isinstance(state, DensityOperator):
        return partial_trace(state, [D])
    return reduced_density(state, [D])


# Protocol steps

def encode(psi: Sequence[complex]) -> StateVector:
    """alpha|000> + beta|111> in |A1 D A2> order."""
    data = data_state(psi)
    amplitudes = np.kron(np.kron([1, 0, 0], data.amplitudes), [1, 0, 0])
    return apply_circuit(encoding_circuit(), StateVector(QEC_REGISTER, amplitudes))


def draw_errors(model: ErrorModel, cycle: int) -> List[float]:
    """Per-site rotation angles for one cycle; zero means no error."""
    n = QEC_REGISTER.n_sites
    if model.mode == "fixed_angles":
        angles = list(model.angles)
        if model.rotate_site:
            angles = list(np.roll(angles, cycle))
        return [float(a) for a in angles]

    thetas = [0.0] * n
    if model.mode == "random_single":
        rng = _stream(model.seed, cycle, ERROR_STREAM, n)
        if rng.random() < model.p_error:
            site = int(rng.integers(n))
            thetas[site] = float(rng.uniform(0.0, 2 * np.pi))
        return thetas

    for site in range(n):
        rng = _stream(model.seed, cycle, ERROR_STREAM, site)
        if rng.random() < model.p_error:
            thetas[site] = float(rng.uniform(0.0, 2 * np.pi))
    return thetas


def inject_error(state: State, model: ErrorModel, cycle_basis: str, cycle: int = 0) -> State:
    return _run(error_circuit(draw_errors(model, cycle), cycle_basis), state)


def ddr_kraus(channel: ResetChannel) -> List[np.ndarray]:
    """
    Kraus operators of the double-drive reset on one qutrit.

    Success pumps every level to |0>; failure (probability epsilon_reset)
    leaves excited population in |1>.
    """
    eps = channel.epsilon_reset
    ops = []
    for k in range(3):
        success = np.zeros((3, 3), dtype=complex)
        success[0, k] = np.sqrt(1 - eps)
        ops.append(success)
    for row, col in ((0, 0), (1, 1), (1, 2)):
        failure = np.zeros((3, 3), dtype=complex)
        failure[row, col] = np.sqrt(eps)
        ops.append(failure)
    return ops


def ddr_reset(state: State, site: int, channel: ResetChannel,
              rng: Optional[np.random.Generator] = None,
              data_sites: Optional[Sequence[int]] = None) -> State:
    """
    Reset one site to |0>.

    Density operators go through the full channel. State vectors pick one
    Kraus branch with its Born probability.
    """
    if data_sites is not None:
        data = partial_trace(state, data_sites) if isinstance(state, DensityOperator) else reduced_density(state, data_sites)
        if purity(data) < 1 - config.TOL_FIDELITY:
            logger.warning(f"Resetting site {site} while it is entangled with the data (data purity {purity(data):.6f})")

    kraus = ddr_kraus(channel)
    if isinstance(state, DensityOperator):
        return apply_kraus(state, kraus, site)

    rng = rng or np.random.default_rng(config.SEED)
    branches = [apply_operator(state, k, [site]) for k in kraus]
    weights = np.array([np.vdot(b, b).real for b in branches])
    choice = int(rng.choice(len(branches), p=weights / weights.sum()))
    return StateVector.normalized(state.register, branches[choice])


def correct_cycle(state: State, decomposition_id: str = "B3", reset: Optional[ResetChannel] = None,
                  basis: str = "bit", cnot_epsilon: float = 0.0,
                  seed: int = 0, cycle: int = 0) -> Tuple[State, Dict]:
    """
    Decode, correct and reset one cycle.

    Returns the post-reset state and diagnostics: data purity, ancilla
    level populations and the largest |2> population over all sites, all
    taken just before the reset; the excitation each ancilla keeps after
    the reset; whether the reset hit an ancilla still entangled with the
    data.
    """
    reset = reset or ResetChannel()
    state = _run(correction_circuit(decomposition_id, basis, cnot_epsilon), state)

    data_purity = purity(_data_density(state))
    entangled = data_purity < 1 - config.TOL_FIDELITY
    diagnostics = {
        "data_purity": data_purity,
        "ancilla_populations": {site: state.level_populations(site).tolist() for site in ANCILLAE},
        "level2_population": _level2_population(state),
        "entangled_reset": entangled,
    }
    if entangled:
        logger.warning(f"Cycle {cycle}: ancillae still entangled with the data before reset (purity {data_purity:.6f})")

    for site in ANCILLAE:
        state = ddr_reset(state, site, reset, rng=_stream(seed, cycle, RESET_STREAM, site))
    diagnostics["residual_excitation"] = {site: 1.0 - float(state.level_populations(site)[0]) for site in ANCILLAE}
    return state, diagnostics


def _level2_population(state: State) -> float:
    return max(float(state.level_populations(site)[2]) for site in range(QEC_REGISTER.n_sites))


def _leaked(diagnostics: Dict) -> bool:
    """|2> population reached the reset, or the reset left an ancilla excited."""
    if diagnostics["level2_population"] > config.TOL_BASIS:
        return True
    return max(diagnostics["residual_excitation"].values()) > config.TOL_BASIS


def run_protocol(psi: Sequence[complex], cycles: int, decomposition_id: str = "B3",
                 model: Optional[ErrorModel] = None, reset: Optional[ResetChannel] = None,
                 mode: str = "trajectory", cnot_epsilon: float = 0.0) -> FidelityReport:
    """
    Run the full protocol for a number of cycles.

    Each cycle re-encodes, changes basis on phase cycles, injects errors
    and corrects. Fidelity is <psi|rho_D|psi> at the end of every cycle.
    """
    model = model or ErrorModel()
    reset = reset or ResetChannel()
    if cycles < 1:
        raise ConfigurationError(f"cycles must be at least 1, got {cycles}")
    if mode not in ("trajectory", "channel"):
        raise ConfigurationError(f"Unknown simulation mode '{mode}'")
    if mode == "channel" and model.mode != "fixed_angles":
        raise ConfigurationError("Channel mode supports fixed_angles error models only")
    if reset.epsilon_reset > RESET_EPSILON_WARNING:
        logger.warning(f"Reset failure probability {reset.epsilon_reset} is above {RESET_EPSILON_WARNING}")

    psi_state = data_state(psi)
    start = np.kron(np.kron([1, 0, 0], psi_state.amplitudes), [1, 0, 0])
    state: State = StateVector(QEC_REGISTER, start)
    if mode == "channel":
        state = state.to_density()

    encoder, basis_change = encoding_circuit(), basis_change_circuit()
    records: List[CycleRecord] = []
    for cycle in range(cycles):
        basis = model.basis_for_cycle(cycle)
        state = _run(encoder, state)
        if basis == "phase":
            state = _run(basis_change, state)
        thetas = draw_errors(model, cycle)
        state = _run(error_circuit(thetas, basis), state)
        state, diagnostics = correct_cycle(state, decomposition_id, reset, basis, cnot_epsilon, model.seed, cycle)

        fidelity = min(max(_data_density(state).expectation(psi_state), 0.0), 1.0)
        records.append(CycleRecord(
            cycle=cycle,
            basis=basis,
            error_sites=[site for site, theta in enumerate(thetas) if theta != 0],
            theta=thetas,
            fidelity=fidelity,
            leakage_flag=_leaked(diagnostics),
        ))

    report = FidelityReport(
        cycles=cycles,
        per_cycle_fidelity=[r.fidelity for r in records],
        final_fidelity=records[-1].fidelity,
        leakage_events=sum(r.leakage_flag for r in records),
        records=records,
    )
    logger.info(
        f"QEC run with {decomposition_id} ({mode}): {cycles} cycles, "
        f"mean fidelity {report.mean_fidelity:.9f}, min {report.min_fidelity:.9f}"
    )
    return report


# Stage oracles

def analytic_amplitudes(theta: float, psi: Sequence[complex] = DEFAULT_PSI,
                        error_site: int = D) -> Dict[str, Dict[str, complex]]:
    """
    Closed-form amplitudes after the error, after decoding and after the
    Toffoli, for one X rotation on error_site of alpha|000> + beta|111>.
    """
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    stages: Dict[str, Dict[str, complex]] = {"post_error": {}, "post_decode": {}, "post_toffoli": {}}
    for bit, amp in zip((0, 1), psi):
        for flipped, factor in ((False, c), (True, -1j * s)):
            digits = [bit, bit, bit]
            if flipped:
                digits[error_site] ^= 1
            coefficient = complex(amp * factor)
            if coefficient == 0:
                continue
            stages["post_error"][_label(digits)] = coefficient
            digits[A1] ^= digits[D]
            digits[A2] ^= digits[D]
            stages["post_decode"][_label(digits)] = coefficient
            if digits[A1] == digits[A2] == 1:
                digits[D] ^= 1
            stages["post_toffoli"][_label(digits)] = coefficient
    return stages


def _label(digits: Sequence[int]) -> str:
    return "".join(str(d) for d in digits)


def amplitudes_to_state(amplitudes: Dict[str, complex]) -> StateVector:
    vector = np.zeros(QEC_REGISTER.total_dim, dtype=complex)
    for label, amp in amplitudes.items():
        vector[QEC_REGISTER.index_of([int(ch) for ch in label])] = amp
    return StateVector(QEC_REGISTER, vector)


def relabel_ancillae(state: StateVector, entry: DecompositionEntry) -> StateVector:
    """Map the ancilla levels an incomplete entry leaves behind back to its control inputs."""
    inverse = {junk: pattern for pattern, junk in entry.junk.items()}
    if len(inverse) != len(entry.junk):
        raise InvalidCircuitError(f"{entry.id} leaves the same control levels for different inputs")
    out = np.zeros_like(state.amplitudes)
    for index, amp in enumerate(state.amplitudes):
        if abs(amp) <= config.TOL_BASIS:
            continue
        digits = list(QEC_REGISTER.digits_of(index))
        key = f"{digits[A1]}{digits[A2]}"
        if key not in inverse:
            raise InvalidCircuitError(f"Ancilla levels |{key}> are not a junk pattern of {entry.id}")
        digits[A1], digits[A2] = int(inverse[key][0]), int(inverse[key][1])
        out[QEC_REGISTER.index_of(digits)] += amp
    return StateVector(QEC_REGISTER, out)


def simulate_stages(psi: Sequence[complex], theta: float, error_site: int = D,
                    decomposition_id: str = "B3") -> Dict[str, StateVector]:
    """Simulated counterparts of analytic_amplitudes, ancillae relabeled after the Toffoli."""
    entry = incomplete(decomposition_id)
    thetas = [0.0] * QEC_REGISTER.n_sites
    thetas[error_site] = theta
    post_error = apply_circuit(error_circuit(thetas, "bit"), encode(psi))
    post_decode = apply_circuit(encoding_circuit(), post_error)
    post_toffoli = apply_circuit(place_incomplete(entry), post_decode)
    return {
        "post_error": post_error,
        "post_decode": post_decode,
        "post_toffoli": relabel_ancillae(post_toffoli, entry),
    }
