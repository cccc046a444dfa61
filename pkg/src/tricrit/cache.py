"""Binary cache of canonical stabilizer tableaux.

Layout (little endian)::

    b"TRICRIT1" | u8 n | u32 count | packed bits | sha256 of everything before

Each state contributes ``n`` generators of ``2n + 1`` bits (x, z, sign).
Writers hold an advisory ``flock`` on ``.lock`` and replace files atomically.
"""
from __future__ import annotations

import fcntl
import hashlib
import os
import struct
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .stabilizer import enumerate_stabilizer_states, state_count

MAGIC = b"TRICRIT1"
ENV_VAR = "TRICRIT_CACHE_DIR"
_HEADER = struct.Struct("<BI")


def default_cache_dir() -> Path:
    return Path(os.environ.get(ENV_VAR) or Path.home() / ".cache" / "tricrit")


def cache_path(directory, n: int) -> Path:
    return Path(directory) / f"stabilizers_n{n}.bin"


def _tableau_bits(n: int) -> np.ndarray:
    st = enumerate_stabilizer_states(n)
    rows = []
    for gens in st.tableaux:
        bits = []
        for g in gens:
            bits.extend(g.x)
            bits.extend(g.z)
            bits.append(1 if g.sign < 0 else 0)
        rows.append(bits)
    return np.array(rows, dtype=np.uint8)


def encode(n: int) -> bytes:
    bits = _tableau_bits(n)
    body = MAGIC + _HEADER.pack(n, bits.shape[0]) + np.packbits(bits.ravel()).tobytes()
    return body + hashlib.sha256(body).digest()


def decode(blob: bytes) -> tuple[int, np.ndarray]:
    """Return ``(n, bits)`` with ``bits`` shaped ``(count, n, 2n + 1)``."""
    if len(blob) < len(MAGIC) + _HEADER.size + 32 or not blob.startswith(MAGIC):
        raise ValidationError("not a stabilizer cache file")
    body, digest = blob[:-32], blob[-32:]
    if hashlib.sha256(body).digest() != digest:
        raise ValidationError("checksum mismatch")
    n, count = _HEADER.unpack_from(body, len(MAGIC))
    payload = np.frombuffer(body[len(MAGIC) + _HEADER.size:], dtype=np.uint8)
    width = n * (2 * n + 1)
    bits = np.unpackbits(payload)[: count * width]
    if bits.size != count * width:
        raise ValidationError("truncated cache payload")
    return n, bits.reshape(count, n, 2 * n + 1)


@contextmanager
def _locked(directory: Path):
    directory.mkdir(parents=True, exist_ok=True)
    with open(directory / ".lock", "w") as fh:
        fcntl.flock(fh, fcntl.LOCK_EX)
        try:
            yield
        finally:
            fcntl.flock(fh, fcntl.LOCK_UN)


def write_cache(directory, n: int) -> Path:
    directory = Path(directory)
    path = cache_path(directory, n)
    with _locked(directory):
        tmp = path.with_suffix(".tmp")
        tmp.write_bytes(encode(n))
        os.replace(tmp, path)
    return path


@dataclass
class CacheStatus:
    n: int
    path: str
    status: str  # ok | missing | mismatch | rebuilt | built | purged
    count: int | None = None
    message: str = ""

    def to_dict(self) -> dict:
        return dict(vars(self))


def verify_cache(directory, n: int) -> CacheStatus:
    path = cache_path(directory, n)
    if not path.exists():
        return CacheStatus(n, str(path), "missing", message="run 'cache build' to create it")
    try:
        m, bits = decode(path.read_bytes())
    except ValidationError as exc:
        return CacheStatus(n, str(path), "mismatch", message=f"{exc}; run 'cache build' to rebuild")
    if m != n or bits.shape[0] != state_count(n):
        return CacheStatus(n, str(path), "mismatch", bits.shape[0],
                           "header disagrees with expected count; run 'cache build' to rebuild")
    return CacheStatus(n, str(path), "ok", bits.shape[0])


def ensure_cache(directory, n: int) -> CacheStatus:
    """Load a valid cache or (re)build it transparently."""
    st = verify_cache(directory, n)
    if st.status == "ok":
        return st
    write_cache(directory, n)
    out = verify_cache(directory, n)
    out.status = "rebuilt" if st.status == "mismatch" else "built"
    return out


def manage_cache(directory, action: str, ns=(1, 2, 3)) -> list[CacheStatus]:
    """``build`` (idempotent), ``verify`` (recomputes checksums) or ``purge``."""
    directory = Path(directory)
    if action == "build":
        return [ensure_cache(directory, n) for n in ns]
    if action == "verify":
        return [verify_cache(directory, n) for n in ns]
    if action == "purge":
        out = []
        with _locked(directory):
            for n in ns:
                p = cache_path(directory, n)
                existed = p.exists()
                p.unlink(missing_ok=True)
                out.append(CacheStatus(n, str(p), "purged" if existed else "missing"))
        return out
    raise ValidationError(f"unknown cache action {action!r}")
