"""Triangle-criterion toolkit for detecting magic in multi-qubit mixed states."""

__version__ = "0.1.0"

from .criterion import (  # noqa: E402
    DetectionReport,
    TriangleWitness,
    detect,
    detect_single_qubit,
    detect_two_copies,
    reduce_to_single_qubit,
    triangle_negativity,
    witness_values,
)
from .errors import CapacityError, DimensionError, TricritError, ValidationError  # noqa: E402
from .stabilizer import enumerate_stabilizer_states, enumerate_triples, triple_array  # noqa: E402

__all__ = [
    "__version__",
    "CapacityError",
    "DetectionReport",
    "DimensionError",
    "TriangleWitness",
    "TricritError",
    "ValidationError",
    "detect",
    "detect_single_qubit",
    "detect_two_copies",
    "enumerate_stabilizer_states",
    "enumerate_triples",
    "reduce_to_single_qubit",
    "triangle_negativity",
    "triple_array",
    "witness_values",
]
