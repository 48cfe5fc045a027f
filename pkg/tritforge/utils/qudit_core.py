"""
Qudit Core
Mixed-dimension register algebra: state vectors, density operators,
gate embedding and circuit application.

Basis ordering is mixed-radix with site 0 most significant, so the ket
|q0 q1 q2> of a [3, 3, 3] register sits at index 9*q0 + 3*q1 + q2.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import TYPE_CHECKING, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from tritforge.config.environment import config
from tritforge.utils.error_handlers import (
    EmbeddingError,
    InvalidCircuitError,
    InvalidDensityError,
    InvalidLevelError,
    NormalizationError,
    NotUnitaryError,
)

if TYPE_CHECKING:
    from tritforge.utils.gate_library import GateDef

logger = logging.getLogger(__name__)

ALLOWED_DIMS = (2, 3)


def _frozen(values, dtype=complex) -> np.ndarray:
    array = np.array(values, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class QuditRegister:
    """Ordered per-site local dimensions (each 2 or 3)."""

    dims: Tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims:
            raise InvalidCircuitError("A register needs at least one site")
        if len(dims) > config.MAX_SITES:
            raise InvalidCircuitError(f"Registers are limited to {config.MAX_SITES} sites, got {len(dims)}")
        for d in dims:
            if d not in ALLOWED_DIMS:
                raise InvalidCircuitError(f"Local dimension {d} not supported (expected 2 or 3)")
        object.__setattr__(self, "dims", dims)

    @classmethod
    def qutrits(cls, n: int) -> "QuditRegister":
        return cls((3,) * n)

    @classmethod
    def qubits(cls, n: int) -> "QuditRegister":
        return cls((2,) * n)

    @property
    def n_sites(self) -> int:
        return len(self.dims)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims))

    def check_sites(self, sites: Sequence[int]) -> Tuple[int, ...]:
        sites = tuple(int(s) for s in sites)
        if len(set(sites)) != len(sites):
            raise EmbeddingError(f"Sites must be distinct, got {sites}")
        for s in sites:
            if not 0 <= s < self.n_sites:
                raise EmbeddingError(f"Site {s} out of range for a {self.n_sites}-site register")
        return sites

    def index_of(self, digits: Sequence[int]) -> int:
        if len(digits) != self.n_sites:
            raise EmbeddingError(f"Expected {self.n_sites} digits, got {len(digits)}")
        for site, (level, dim) in enumerate(zip(digits, self.dims)):
            if not 0 <= level < dim:
                raise InvalidLevelError(site, level, dim)
        return int(np.ravel_multi_index(tuple(digits), self.dims))

    def digits_of(self, index: int) -> Tuple[int, ...]:
        return tuple(int(d) for d in np.unravel_index(index, self.dims))

    def label(self, index: int) -> str:
        return "".join(str(d) for d in self.digits_of(index))

    def qubit_indices(self) -> List[int]:
        """Indices of basis states with every site in |0> or |1>."""
        return [i for i in range(self.total_dim) if max(self.digits_of(i)) <= 1]


@dataclass(frozen=True, eq=False)
class Unitary:
    matrix: np.ndarray

    def __post_init__(self):
        matrix = _frozen(self.matrix)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise NotUnitaryError(float("inf"))
        deviation = float(np.max(np.abs(matrix.conj().T @ matrix - np.eye(matrix.shape[0]))))
        if deviation > config.TOL_UNITARITY:
            raise NotUnitaryError(deviation)
        object.__setattr__(self, "matrix", matrix)

    @classmethod
    def identity(cls, dim: int) -> "Unitary":
        return cls(np.eye(dim))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def adjoint(self) -> "Unitary":
        return Unitary(self.matrix.conj().T)

    def then(self, other: "Unitary") -> "Unitary":
        """Circuit-order product: self first, then other."""
        return Unitary(other.matrix @ self.matrix)

    def allclose(self, other: "Unitary", tol: Optional[float] = None) -> bool:
        tol = config.TOL_EQUIVALENCE if tol is None else tol
        return self.dim == other.dim and bool(np.max(np.abs(self.matrix - other.matrix)) < tol)


@dataclass(frozen=True, eq=False)
class StateVector:
    register: QuditRegister
    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = _frozen(np.asarray(self.amplitudes).reshape(-1))
        if amplitudes.shape[0] != self.register.total_dim:
            raise EmbeddingError(
                f"Expected {self.register.total_dim} amplitudes for dims {self.register.dims}, got {amplitudes.shape[0]}"
            )
        norm = float(np.linalg.norm(amplitudes))
        if abs(norm - 1.0) > config.TOL_NORMALIZATION:
            raise NormalizationError(norm)
        object.__setattr__(self, "amplitudes", amplitudes)

    @classmethod
    def normalized(cls, register: QuditRegister, amplitudes) -> "StateVector":
        amplitudes = np.asarray(amplitudes, dtype=complex).reshape(-1)
        return cls(register, amplitudes / np.linalg.norm(amplitudes))

    def level_populations(self, site: int) -> np.ndarray:
        tensor = np.abs(self.amplitudes.reshape(self.register.dims)) ** 2
        other_axes = tuple(a for a in range(self.register.n_sites) if a != site)
        return tensor.sum(axis=other_axes)

    def overlap(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, other: "StateVector") -> float:
        return abs(self.overlap(other)) ** 2

    def nonzero(self, tol: float = 1e-12) -> Dict[str, complex]:
        """Basis labels carrying amplitude above tol."""
        return {
            self.register.label(i): complex(a)
            for i, a in enumerate(self.amplitudes)
            if abs(a) > tol
        }

    def to_density(self) -> "DensityOperator":
        return DensityOperator(self.register, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True, eq=False)
class DensityOperator:
    register: QuditRegister
    matrix: np.ndarray

    def __post_init__(self):
        matrix = _frozen(self.matrix)
        dim = self.register.total_dim
        if matrix.shape != (dim, dim):
            raise InvalidDensityError(f"Expected a {dim}x{dim} matrix, got {matrix.shape}")
        if np.max(np.abs(matrix - matrix.conj().T)) > config.TOL_HERMITIAN:
            raise InvalidDensityError("Density operator is not Hermitian")
        trace = complex(np.trace(matrix))
        if abs(trace - 1.0) > config.TOL_HERMITIAN:
            raise InvalidDensityError(f"Density operator trace is {trace.real:.12g}, expected 1")
        if np.min(np.linalg.eigvalsh(matrix)) < -config.TOL_PSD:
            raise InvalidDensityError("Density operator has a negative eigenvalue")
        object.__setattr__(self, "matrix", matrix)

    @property
    def dim(self) -> int:
        return self.register.total_dim

    def expectation(self, state: StateVector) -> float:
        """<psi|rho|psi> for a pure state on the same register."""
        return float(np.real(np.vdot(state.amplitudes, self.matrix @ state.amplitudes)))

    def level_populations(self, site: int) -> np.ndarray:
        return np.real(np.diag(partial_trace(self, [site]).matrix))


@dataclass(frozen=True)
class GateOp:
    gate: "GateDef"
    sites: Tuple[int, ...]

    @property
    def name(self) -> str:
        return self.gate.name

    @property
    def is_two_site(self) -> bool:
        return len(self.sites) == 2


@dataclass(frozen=True, eq=False)
class Circuit:
    """Ordered gate applications on a register, with named roles."""

    register: QuditRegister
    ops: Tuple[GateOp, ...] = ()
    role_map: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        ops = tuple(self.ops)
        for position, op in enumerate(ops):
            sites = self.register.check_sites(op.sites)
            if len(sites) != len(op.gate.local_dims):
                raise InvalidCircuitError(
                    f"Op {position} ({op.name}) acts on {len(op.gate.local_dims)} sites but got {sites}"
                )
            expected = tuple(self.register.dims[s] for s in sites)
            if expected != tuple(op.gate.local_dims):
                raise InvalidCircuitError(
                    f"Op {position} ({op.name}) needs local dims {tuple(op.gate.local_dims)}, sites {sites} have {expected}"
                )
        roles = dict(self.role_map)
        if len(set(roles.values())) != len(roles):
            raise InvalidCircuitError(f"Role sites must be distinct: {roles}")
        self.register.check_sites(list(roles.values()))
        object.__setattr__(self, "ops", ops)
        object.__setattr__(self, "role_map", MappingProxyType(roles))

    @classmethod
    def from_ops(
        cls,
        register: QuditRegister,
        ops: Iterable[Tuple["GateDef", Sequence[int]]],
        role_map: Optional[Mapping[str, int]] = None,
    ) -> "Circuit":
        return cls(register, tuple(GateOp(g, tuple(s)) for g, s in ops), role_map or {})

    def __len__(self) -> int:
        return len(self.ops)

    def append(self, gate: "GateDef", *sites: int) -> "Circuit":
        return Circuit(self.register, self.ops + (GateOp(gate, tuple(sites)),), self.role_map)

    def prefix(self, last_index: int) -> "Circuit":
        """Ops up to and including last_index."""
        return Circuit(self.register, self.ops[: last_index + 1], self.role_map)

    def replace_op(self, index: int, gate: "GateDef") -> "Circuit":
        ops = list(self.ops)
        ops[index] = GateOp(gate, ops[index].sites)
        return Circuit(self.register, tuple(ops), self.role_map)

    def with_role_map(self, role_map: Mapping[str, int]) -> "Circuit":
        return Circuit(self.register, self.ops, role_map)

    def relabel(self, site_map: Mapping[int, int], register: QuditRegister) -> "Circuit":
        """Place the circuit on another register, moving site s to site_map[s]."""
        ops = tuple(GateOp(op.gate, tuple(site_map[s] for s in op.sites)) for op in self.ops)
        roles = {role: site_map[s] for role, s in self.role_map.items()}
        return Circuit(register, ops, roles)

    def two_site_count(self) -> int:
        return sum(1 for op in self.ops if op.is_two_site)

    def single_site_count(self) -> int:
        return sum(1 for op in self.ops if len(op.sites) == 1)

    def count(self, name: str) -> int:
        return sum(1 for op in self.ops if op.name == name)

    def depth(self) -> int:
        """As-soon-as-possible layer count."""
        frontier = [0] * self.register.n_sites
        for op in self.ops:
            layer = max(frontier[s] for s in op.sites) + 1
            for s in op.sites:
                frontier[s] = layer
        return max(frontier, default=0)


def basis_state(register: QuditRegister, digits: Sequence[int]) -> StateVector:
    """Computational basis state |digits>."""
    amplitudes = np.zeros(register.total_dim, dtype=complex)
    amplitudes[register.index_of(digits)] = 1.0
    return StateVector(register, amplitudes)


def _apply_local(block: np.ndarray, matrix: np.ndarray, sites: Sequence[int], dims: Sequence[int]) -> np.ndarray:
    """Apply a local matrix to every column of a (total_dim, batch) block."""
    k = len(sites)
    batch = block.shape[1]
    tensor = block.reshape(tuple(dims) + (batch,))
    local_dims = tuple(dims[s] for s in sites)
    gate = matrix.reshape(local_dims + local_dims)
    moved = np.tensordot(gate, tensor, axes=(list(range(k, 2 * k)), list(sites)))
    return np.moveaxis(moved, list(range(k)), list(sites)).reshape(-1, batch)


def _check_local(local_dim: int, sites: Sequence[int], register: QuditRegister) -> Tuple[int, ...]:
    sites = register.check_sites(sites)
    expected = int(np.prod([register.dims[s] for s in sites]))
    if local_dim != expected:
        raise EmbeddingError(
            f"Local operator of dimension {local_dim} does not fit sites {sites} (product of dims {expected})"
        )
    return sites


def embed_gate(local: Unitary, sites: Sequence[int], register: QuditRegister) -> Unitary:
    """Full-register unitary acting as `local` on `sites` (in order), identity elsewhere."""
    sites = _check_local(local.dim, sites, register)
    block = _apply_local(np.eye(register.total_dim, dtype=complex), local.matrix, sites, register.dims)
    return Unitary(block)


def apply_local(state: StateVector, matrix: np.ndarray, sites: Sequence[int]) -> StateVector:
    sites = _check_local(matrix.shape[0], sites, state.register)
    out = _apply_local(state.amplitudes.reshape(-1, 1), matrix, sites, state.register.dims)
    return StateVector(state.register, out[:, 0])


def apply_operator(state: StateVector, matrix: np.ndarray, sites: Sequence[int]) -> np.ndarray:
    """Raw amplitudes of a (possibly non-unitary) local operator applied to state."""
    sites = _check_local(matrix.shape[0], sites, state.register)
    return _apply_local(state.amplitudes.reshape(-1, 1), matrix, sites, state.register.dims)[:, 0]


def apply_circuit(circuit: Circuit, state: StateVector) -> StateVector:
    """Apply every op of the circuit in order."""
    if circuit.register != state.register:
        raise InvalidCircuitError(
            f"Circuit register {circuit.register.dims} does not match state register {state.register.dims}"
        )
    block = state.amplitudes.reshape(-1, 1)
    for op in circuit.ops:
        block = _apply_local(block, op.gate.matrix, op.sites, circuit.register.dims)
    return StateVector(state.register, block[:, 0])


def circuit_unitary(circuit: Circuit) -> Unitary:
    """Ordered product of the embedded gate unitaries."""
    block = np.eye(circuit.register.total_dim, dtype=complex)
    for op in circuit.ops:
        block = _apply_local(block, op.gate.matrix, op.sites, circuit.register.dims)
    return Unitary(block)


def _split_sites(register: QuditRegister, keep_sites: Sequence[int]) -> Tuple[List[int], List[int], int, int]:
    keep = list(register.check_sites(keep_sites))
    if not keep:
        raise EmbeddingError("keep_sites must name at least one site")
    rest = [s for s in range(register.n_sites) if s not in keep]
    d_keep = int(np.prod([register.dims[s] for s in keep]))
    return keep, rest, d_keep, register.total_dim // d_keep


def reduced_density(state: StateVector, keep_sites: Sequence[int]) -> DensityOperator:
    """Partial trace of |psi><psi| over every site not in keep_sites."""
    register = state.register
    keep, rest, d_keep, d_rest = _split_sites(register, keep_sites)
    tensor = state.amplitudes.reshape(register.dims)
    matrix = np.transpose(tensor, keep + rest).reshape(d_keep, d_rest)
    kept = QuditRegister(tuple(register.dims[s] for s in keep))
    return DensityOperator(kept, matrix @ matrix.conj().T)


def partial_trace(rho: DensityOperator, keep_sites: Sequence[int]) -> DensityOperator:
    register = rho.register
    keep, rest, d_keep, d_rest = _split_sites(register, keep_sites)
    n = register.n_sites
    tensor = rho.matrix.reshape(register.dims + register.dims)
    order = keep + rest + [n + s for s in keep] + [n + s for s in rest]
    tensor = np.transpose(tensor, order).reshape(d_keep, d_rest, d_keep, d_rest)
    kept = QuditRegister(tuple(register.dims[s] for s in keep))
    return DensityOperator(kept, np.einsum("ajbj->ab", tensor))


def purity(rho: DensityOperator) -> float:
    """Tr(rho^2)."""
    return float(np.real(np.trace(rho.matrix @ rho.matrix)))


def _sandwich(matrix: np.ndarray, local: np.ndarray, sites: Sequence[int], dims: Sequence[int]) -> np.ndarray:
    left = _apply_local(matrix, local, sites, dims)
    return _apply_local(left.conj().T, local, sites, dims).conj().T


def evolve_density(rho: DensityOperator, local: np.ndarray, sites: Sequence[int]) -> DensityOperator:
    """U rho U^dagger for a local unitary on sites."""
    sites = _check_local(local.shape[0], sites, rho.register)
    return DensityOperator(rho.register, _sandwich(rho.matrix, local, sites, rho.register.dims))


def evolve_density_circuit(circuit: Circuit, rho: DensityOperator) -> DensityOperator:
    if circuit.register != rho.register:
        raise InvalidCircuitError(
            f"Circuit register {circuit.register.dims} does not match density register {rho.register.dims}"
        )
    matrix = rho.matrix
    for op in circuit.ops:
        matrix = _sandwich(matrix, op.gate.matrix, op.sites, rho.register.dims)
    return DensityOperator(rho.register, matrix)


def apply_kraus(rho: DensityOperator, kraus_ops: Sequence[np.ndarray], site: int) -> DensityOperator:
    """Sum_k K rho K^dagger with every K acting on one site."""
    sites = _check_local(kraus_ops[0].shape[0], [site], rho.register)
    total = np.zeros_like(rho.matrix)
    for k in kraus_ops:
        total = total + _sandwich(rho.matrix, k, sites, rho.register.dims)
    return DensityOperator(rho.register, total)


def random_state(register: QuditRegister, rng: np.random.Generator) -> StateVector:
    amplitudes = rng.normal(size=register.total_dim) + 1j * rng.normal(size=register.total_dim)
    return StateVector.normalized(register, amplitudes)


def random_unitary(dim: int, rng: np.random.Generator) -> Unitary:
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    phases = np.diag(r) / np.abs(np.diag(r))
    return Unitary(q * phases)
