"""Binary container codec shared by map and roadmap files.

Layout (little endian)::

    magic       8 bytes, identifies the file kind
    version     u16
    header_len  u32
    header      JSON (UTF-8): metadata plus the array directory
    arrays      raw array bytes in directory order
    digest      32-byte SHA-256 over everything before it
"""

import hashlib
import json
import struct
from pathlib import Path
from typing import Any, Dict, Mapping, Tuple

import numpy as np

from ...errors import CorruptedFileError, VersionMismatchError
from .file_writer import FileWriter

_PREFIX = struct.Struct("<8sHI")
_DIGEST_SIZE = 32


def encode_container(
    magic: bytes,
    version: int,
    metadata: Mapping[str, Any],
    arrays: Mapping[str, np.ndarray],
) -> bytes:
    """Serialize metadata and named arrays into container bytes."""
    if len(magic) != 8:
        raise ValueError("magic must be exactly 8 bytes")

    directory = []
    blobs = []
    for name, array in arrays.items():
        data = np.ascontiguousarray(array)
        data = data.astype(data.dtype.newbyteorder("<"), copy=False)
        directory.append({"name": name, "dtype": data.dtype.str, "shape": list(data.shape)})
        blobs.append(data.tobytes(order="C"))

    header = json.dumps(
        {"metadata": dict(metadata), "arrays": directory}, sort_keys=True
    ).encode("utf-8")
    body = _PREFIX.pack(magic, version, len(header)) + header + b"".join(blobs)
    return body + hashlib.sha256(body).digest()


def decode_container(
    blob: bytes, magic: bytes, supported_version: int
) -> Tuple[Dict[str, Any], Dict[str, np.ndarray]]:
    """Parse container bytes produced by ``encode_container``.

    Raises:
        CorruptedFileError: On truncation, bad magic or digest mismatch.
        VersionMismatchError: On an unsupported format version.
    """
    if len(blob) < _PREFIX.size + _DIGEST_SIZE:
        raise CorruptedFileError("File is truncated")

    body, digest = blob[:-_DIGEST_SIZE], blob[-_DIGEST_SIZE:]
    if hashlib.sha256(body).digest() != digest:
        raise CorruptedFileError("Checksum mismatch")

    file_magic, version, header_len = _PREFIX.unpack_from(body, 0)
    if file_magic != magic:
        raise CorruptedFileError(f"Unexpected file kind {file_magic!r}")
    if version != supported_version:
        raise VersionMismatchError(
            f"Unsupported format version {version} (expected {supported_version})"
        )

    offset = _PREFIX.size
    try:
        header = json.loads(body[offset:offset + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CorruptedFileError(f"Unreadable header: {e}") from e
    offset += header_len

    arrays: Dict[str, np.ndarray] = {}
    for entry in header["arrays"]:
        dtype = np.dtype(entry["dtype"])
        shape = tuple(entry["shape"])
        size = int(np.prod(shape, dtype=np.int64)) * dtype.itemsize
        if offset + size > len(body):
            raise CorruptedFileError(f"Array {entry['name']} is truncated")
        arrays[entry["name"]] = (
            np.frombuffer(body, dtype=dtype, count=size // dtype.itemsize, offset=offset)
            .reshape(shape)
            .astype(dtype.newbyteorder("="), copy=True)
        )
        offset += size
    if offset != len(body):
        raise CorruptedFileError("Trailing bytes after arrays")
    return header["metadata"], arrays


def write_container(path: Path, magic: bytes, version: int, metadata, arrays) -> None:
    """Encode and write a container atomically."""
    FileWriter().write_bytes_atomic(encode_container(magic, version, metadata, arrays), Path(path))


def read_container(path: Path, magic: bytes, supported_version: int):
    """Read and decode a container file."""
    return decode_container(Path(path).read_bytes(), magic, supported_version)
