"""File writer module for drover.

Every artifact (maps, roadmaps, plans, reports, CSV, manifests) is written
atomically: a temporary file in the target directory is verified against a
checksum and then renamed over the destination.
"""

import hashlib
import tempfile
from pathlib import Path
from typing import Union

import structlog


class FileWriter:
    """Service for atomic file writing with checksum verification."""

    def __init__(self) -> None:
        self.logger = structlog.get_logger(__name__)

    def write_text_atomic(self, content: str, output_path: Path, verify_checksum: bool = True) -> None:
        """Write UTF-8 text atomically."""
        self.write_bytes_atomic(content.encode("utf-8"), output_path, verify_checksum)

    def write_bytes_atomic(
        self,
        content: Union[bytes, bytearray],
        output_path: Path,
        verify_checksum: bool = True,
    ) -> None:
        """Write bytes atomically.

        Raises:
            OSError: If the file cannot be written or fails verification.
        """
        output_path = Path(output_path)
        output_path.parent.mkdir(parents=True, exist_ok=True)
        expected_checksum = self.calculate_checksum(content) if verify_checksum else None

        temp_file = None
        try:
            with tempfile.NamedTemporaryFile(
                mode="wb", dir=output_path.parent, delete=False, suffix=".tmp"
            ) as f:
                temp_file = Path(f.name)
                f.write(content)

            if expected_checksum and self.calculate_checksum(temp_file.read_bytes()) != expected_checksum:
                raise OSError(f"Checksum verification failed for {output_path}")

            temp_file.replace(output_path)
            self.logger.debug("File written atomically", path=str(output_path), size=len(content))
        except Exception:
            if temp_file is not None and temp_file.exists():
                try:
                    temp_file.unlink()
                except OSError as cleanup_error:
                    self.logger.warning(
                        "Failed to cleanup temp file", path=str(temp_file), error=str(cleanup_error)
                    )
            self.logger.error("Failed to write file", path=str(output_path))
            raise

    @staticmethod
    def calculate_checksum(content: Union[bytes, bytearray]) -> str:
        """SHA-256 of the content as a hex string."""
        return hashlib.sha256(content).hexdigest()
