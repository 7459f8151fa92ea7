"""Storage services: atomic writes, binary containers and manifests."""

from .container import decode_container, encode_container, read_container, write_container
from .file_writer import FileWriter
from .manifest import build_manifest, write_csv, write_json, write_manifest, write_model_json

__all__ = [
    "FileWriter",
    "build_manifest",
    "decode_container",
    "encode_container",
    "read_container",
    "write_container",
    "write_csv",
    "write_json",
    "write_manifest",
    "write_model_json",
]
