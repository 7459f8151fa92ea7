import json
from unittest.mock import patch

import numpy as np
import pytest

from drover import __version__
from drover.errors import CorruptedFileError, VersionMismatchError
from drover.models.config import AppConfig
from drover.services.storage import (
    FileWriter,
    build_manifest,
    decode_container,
    encode_container,
    write_csv,
    write_json,
    write_manifest,
)

MAGIC = b"TESTFILE"


def test_atomic_write_leaves_no_temporary_files(tmp_path):
    target = tmp_path / "nested" / "out.txt"
    FileWriter().write_text_atomic("hello\n", target)
    assert target.read_text() == "hello\n"
    assert list(target.parent.glob("*.tmp")) == []


def test_failed_write_keeps_previous_content(tmp_path):
    target = tmp_path / "out.txt"
    target.write_text("old")
    writer = FileWriter()
    with patch.object(FileWriter, "calculate_checksum", side_effect=["expected", "different"]):
        with pytest.raises(OSError):
            writer.write_text_atomic("new", target)
    assert target.read_text() == "old"
    assert list(tmp_path.glob("*.tmp")) == []


def test_container_preserves_arrays_and_metadata():
    arrays = {"a": np.array([[1.0, np.nan], [np.inf, -0.0]]), "idx": np.arange(5, dtype=np.int64)}
    blob = encode_container(MAGIC, 3, {"name": "x"}, arrays)
    metadata, decoded = decode_container(blob, MAGIC, 3)
    assert metadata == {"name": "x"}
    assert decoded["a"].tobytes() == arrays["a"].tobytes()
    assert decoded["idx"].dtype == np.int64


def test_container_rejects_bad_magic_length():
    with pytest.raises(ValueError):
        encode_container(b"SHORT", 1, {}, {})


@pytest.mark.parametrize(
    "mutate",
    [
        lambda blob: blob[:10],
        lambda blob: blob[:-1] + bytes([blob[-1] ^ 1]),
        lambda blob: blob[:20] + bytes([blob[20] ^ 1]) + blob[21:],
    ],
    ids=["truncated", "digest", "body"],
)
def test_container_detects_corruption(mutate):
    blob = encode_container(MAGIC, 1, {}, {"a": np.zeros(4)})
    with pytest.raises(CorruptedFileError):
        decode_container(mutate(blob), MAGIC, 1)


def test_container_version_and_kind_checks():
    blob = encode_container(MAGIC, 2, {}, {})
    with pytest.raises(VersionMismatchError):
        decode_container(blob, MAGIC, 1)
    with pytest.raises(CorruptedFileError):
        decode_container(blob, b"OTHERKND", 2)


def test_write_csv_orders_columns(tmp_path):
    target = tmp_path / "rows.csv"
    write_csv([{"b": 2, "a": 1, "extra": 9}, {"a": 3}], ["a", "b"], target)
    assert target.read_text().splitlines() == ["a,b", "1,2", "3,"]


def test_manifest_records_command_and_config(tmp_path):
    config = AppConfig(seed=11, deterministic=True)
    manifest = build_manifest(
        "plan", config,
        inputs={"map": tmp_path / "m.dmap"},
        outputs={"plan": tmp_path / "p.plan.json"},
        summary={"phases": 3},
    )
    target = tmp_path / "p.plan.manifest.json"
    write_manifest(manifest, target)

    data = json.loads(target.read_text())
    assert data["command"] == "plan"
    assert data["tool_version"] == __version__
    assert data["seed"] == 11
    assert data["deterministic"] is True
    assert data["timings"] == {}
    assert data["config"]["planner"]["goal_bias"] == pytest.approx(0.05)
    assert data["inputs"]["map"].endswith("m.dmap")
    assert data["summary"] == {"phases": 3}


def test_write_json_sorts_keys(tmp_path):
    target = tmp_path / "data.json"
    write_json({"b": 1, "a": [1, 2]}, target)
    assert list(json.loads(target.read_text())) == ["a", "b"]
