"""
Circuit Serialization
Line-oriented text format for circuits:

    dims 3,3,3
    role control1=0 control2=1 target=2
    CX[1;12] 0,1
    X12 1

Blank lines and lines starting with '#' are ignored. Gate names are the
stable names of the gate library, so a circuit reads back exactly.
"""
import logging
from pathlib import Path
from typing import Dict, List, Optional, Union

from tritforge.utils.error_handlers import CircuitFormatError, ExportError, TritforgeError
from tritforge.utils.gate_library import gate_from_name
from tritforge.utils.qudit_core import Circuit, GateOp, QuditRegister

logger = logging.getLogger(__name__)


def circuit_to_text(circuit: Circuit, comment: Optional[str] = None) -> str:
    lines: List[str] = []
    if comment:
        lines.extend(f"# {line}" for line in comment.splitlines())
    lines.append("dims " + ",".join(str(d) for d in circuit.register.dims))
    if circuit.role_map:
        roles = " ".join(f"{role}={site}" for role, site in circuit.role_map.items())
        lines.append(f"role {roles}")
    for op in circuit.ops:
        lines.append(f"{op.name} {','.join(str(s) for s in op.sites)}")
    return "\n".join(lines) + "\n"


def _parse_ints(text: str, line_no: int, what: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",")]
    except ValueError:
        raise CircuitFormatError(line_no, f"{what} must be comma-separated integers, got '{text}'")


def circuit_from_text(text: str) -> Circuit:
    """Parse the text format back into a Circuit."""
    register: Optional[QuditRegister] = None
    roles: Dict[str, int] = {}
    ops: List[GateOp] = []

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("dims "):
            if register is not None:
                raise CircuitFormatError(line_no, "duplicate dims header")
            try:
                register = QuditRegister(tuple(_parse_ints(line[5:].strip(), line_no, "dims")))
            except TritforgeError as e:
                raise CircuitFormatError(line_no, e.message)
            continue
        if register is None:
            raise CircuitFormatError(line_no, "expected 'dims' header before any other line")
        if line.startswith("role "):
            for pair in line[5:].split():
                role, sep, site = pair.partition("=")
                if not sep:
                    raise CircuitFormatError(line_no, f"role entries look like name=site, got '{pair}'")
                roles[role] = _parse_ints(site, line_no, "role site")[0]
            continue

        parts = line.rsplit(None, 1)
        if len(parts) != 2:
            raise CircuitFormatError(line_no, f"expected 'GATE site[,site]', got '{line}'")
        name, sites = parts
        gate = gate_from_name(name)
        if gate is None:
            raise CircuitFormatError(line_no, f"unknown gate '{name}'")
        ops.append(GateOp(gate, tuple(_parse_ints(sites, line_no, "sites"))))

    if register is None:
        raise CircuitFormatError(0, "missing 'dims' header")
    try:
        return Circuit(register, tuple(ops), roles)
    except TritforgeError as e:
        raise CircuitFormatError(0, e.message)


def save_circuit(circuit: Circuit, path: Union[str, Path], comment: Optional[str] = None) -> Dict[str, str]:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(circuit_to_text(circuit, comment), encoding="utf-8", newline="\n")
    except OSError as e:
        raise ExportError(str(path), e.strerror or str(e))
    logger.info(f"Wrote circuit with {len(circuit)} ops to {path}")
    return {"status": "success", "output_path": str(path)}


def load_circuit(path: Union[str, Path]) -> Circuit:
    return circuit_from_text(Path(path).read_text(encoding="utf-8"))
