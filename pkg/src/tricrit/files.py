"""JSON state files.

Two accepted layouts::

    {"dims": d, "matrix": [[[re, im], ...], ...]}
    {"qubits": n, "pauli": {"IX": 0.2887, ...}}   # rho = (1/d) sum c_P P, c_I = 1
"""
from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

import numpy as np

from . import dense
from .errors import DimensionError, ValidationError
from .pauli import pauli_decompose, state_from_pauli


def state_from_json(obj) -> np.ndarray:
    if not isinstance(obj, dict):
        raise ValidationError("state file must hold a JSON object")
    if "pauli" in obj:
        n = obj.get("qubits")
        if not isinstance(n, int) or n < 1:
            raise ValidationError("Pauli form needs a positive integer 'qubits'")
        coeffs = obj["pauli"]
        if not isinstance(coeffs, dict):
            raise ValidationError("'pauli' must map labels to numbers")
        for lab in coeffs:
            if len(lab) != n or set(lab.upper()) - set("IXYZ"):
                raise ValidationError(f"bad Pauli key {lab!r} for {n} qubits")
        rho = state_from_pauli(n, {k: float(v) for k, v in coeffs.items()})
    elif "matrix" in obj:
        try:
            m = np.asarray(obj["matrix"], dtype=float)
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"matrix entries must be [re, im] pairs: {exc}") from exc
        if m.ndim != 3 or m.shape[2] != 2:
            raise ValidationError("matrix entries must be [re, im] pairs")
        rho = m[..., 0] + 1j * m[..., 1]
        d = obj.get("dims", rho.shape[0])
        if rho.shape != (d, d):
            raise DimensionError(f"matrix shape {rho.shape} does not match dims {d}")
        dense.n_qubits(rho)
    else:
        raise ValidationError("state file needs either 'matrix' or 'pauli'")
    return dense.check_density(rho)


def parse_state_file(path) -> np.ndarray:
    """Read, parse and validate a state file."""
    p = Path(path)
    if not p.is_file():
        raise ValidationError(f"state file not found: {p}")
    try:
        obj = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed JSON in {p}: {exc}") from exc
    return state_from_json(obj)


def dense_json(rho) -> dict:
    rho = np.asarray(rho)
    return {"dims": rho.shape[0], "matrix": [[[z.real, z.imag] for z in row] for row in rho.tolist()]}


def pauli_json(rho, atol: float = 0.0) -> dict:
    dec = pauli_decompose(np.asarray(rho))
    return {"qubits": dec.n, "pauli": {k: v for k, v in dec.coeffs.items() if abs(v) > atol}}


def bundled_path(name: str = "appendix_c.json") -> Path:
    return Path(str(resources.files("tricrit") / "data" / name))
