"""
Binary container shared by datasets and checkpoints.

Layout:
    GNCDE-BLOB 1\\n
    <one line of JSON header>\\n
    <payload: each array as row-major little-endian float64, in header order>

The header always carries an "arrays" list of {"name", "shape"} entries; any other
keys are free metadata owned by the caller.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from errors import ValidationError

MAGIC = b"GNCDE-BLOB 1\n"
_DTYPE = np.dtype("<f8")


def write_blob(path: str | Path, kind: str, metadata: dict[str, Any], arrays: dict[str, np.ndarray]) -> None:
    """
    Write named float64 arrays plus a JSON header to a file.

    Args:
        path: Destination file
        kind: Content tag checked on read (e.g. "dataset", "checkpoint")
        metadata: JSON-serialisable header fields
        arrays: Ordered mapping of name -> array
    """
    header = dict(metadata)
    header["kind"] = kind
    header["arrays"] = [{"name": name, "shape": list(np.shape(array))} for name, array in arrays.items()]
    header_line = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as handle:
        handle.write(MAGIC)
        handle.write(header_line + b"\n")
        for array in arrays.values():
            handle.write(np.ascontiguousarray(array, dtype=_DTYPE).tobytes(order="C"))


def read_blob(path: str | Path, kind: str) -> tuple[dict[str, Any], dict[str, np.ndarray]]:
    """
    Read a file written by write_blob.

    Returns:
        (header, arrays) where arrays preserves header order

    Raises:
        ValidationError: bad magic, malformed header, wrong kind, or a payload
            whose length does not match the declared shapes
    """
    try:
        raw = Path(path).read_bytes()
    except FileNotFoundError as e:
        raise ValidationError(f"{path}: no such file") from e
    if not raw.startswith(MAGIC):
        raise ValidationError(f"{path}: not a GNCDE blob file")

    end = raw.find(b"\n", len(MAGIC))
    if end < 0:
        raise ValidationError(f"{path}: header line is not terminated")
    try:
        header = json.loads(raw[len(MAGIC):end].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise ValidationError(f"{path}: malformed header: {e}") from e

    if not isinstance(header, dict) or not isinstance(header.get("arrays"), list):
        raise ValidationError(f"{path}: header has no array table")
    if header.get("kind") != kind:
        raise ValidationError(f"{path}: expected a {kind} file, found {header.get('kind')!r}")

    payload = memoryview(raw)[end + 1:]
    arrays: dict[str, np.ndarray] = {}
    offset = 0
    for entry in header["arrays"]:
        try:
            name = str(entry["name"])
            shape = tuple(int(n) for n in entry["shape"])
        except (KeyError, TypeError, ValueError) as e:
            raise ValidationError(f"{path}: malformed array entry {entry!r}") from e
        if any(n < 0 for n in shape):
            raise ValidationError(f"{path}: negative dimension in shape {shape} of '{name}'")
        nbytes = math.prod(shape) * _DTYPE.itemsize
        if offset + nbytes > len(payload):
            raise ValidationError(
                f"{path}: payload truncated while reading '{name}' with shape {list(shape)}"
            )
        arrays[name] = np.frombuffer(payload[offset:offset + nbytes], dtype=_DTYPE).reshape(shape).astype(np.float64)
        offset += nbytes

    if offset != len(payload):
        raise ValidationError(
            f"{path}: payload has {len(payload) - offset} trailing bytes beyond the declared shapes"
        )
    return header, arrays
