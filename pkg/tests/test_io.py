import json

import numpy as np
import pytest

from stac.exceptions import ParseError, SizeMismatch, Unsupported, VolumeIOError
from stac.grid import LabelVolume, ScalarVolume
from stac.io import dumps_json, file_digest, read_volume, write_json, write_volume


def test_label_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    vol = LabelVolume(rng.integers(0, 256, (5, 4, 3)), (0.5, 1.25, 3.0))
    write_volume(vol, tmp_path / "y.mhd")
    back = read_volume(tmp_path / "y.mhd")
    assert isinstance(back, LabelVolume)
    assert np.array_equal(back.data, vol.data) and back.spacing == vol.spacing


def test_scalar_round_trip_is_float32_exact(tmp_path):
    data = np.random.default_rng(1).normal(size=(3, 5, 2)).astype(np.float32)
    vol = ScalarVolume(data, (1.0, 2.0, 0.1))
    write_volume(vol, tmp_path / "x.mhd")
    back = read_volume(tmp_path / "x.mhd")
    assert np.array_equal(back.data, data.astype(np.float64))
    assert back.spacing == (1.0, 2.0, 0.1)


def test_payload_is_x_fastest(tmp_path):
    data = np.arange(24, dtype=np.uint8).reshape(2, 3, 4)
    write_volume(LabelVolume(data), tmp_path / "o.mhd")
    raw = np.frombuffer((tmp_path / "o.raw").read_bytes(), np.uint8)
    assert raw[1] == data[1, 0, 0] and raw[2] == data[0, 1, 0]
    header = (tmp_path / "o.mhd").read_text()
    assert "DimSize = 2 3 4" in header and "ElementDataFile = o.raw" in header


def test_digest_is_stable(tmp_path):
    vol = LabelVolume(np.ones((2, 2, 2)))
    write_volume(vol, tmp_path / "a.mhd")
    write_volume(vol, tmp_path / "b.mhd")
    # headers differ only in their data-file name
    assert file_digest(tmp_path / "a.mhd") == file_digest(tmp_path / "a.mhd")
    assert file_digest(tmp_path / "a.mhd") != file_digest(tmp_path / "b.mhd")


def _header(tmp_path, **overrides):
    fields = {"ObjectType": "Image", "NDims": "3", "DimSize": "2 2 2", "ElementSpacing": "1 1 1",
              "ElementType": "MET_UCHAR", "ElementDataFile": "v.raw"}
    fields.update(overrides)
    text = "\n".join(f"{k} = {v}" for k, v in fields.items() if v is not None)
    (tmp_path / "v.mhd").write_text(text)
    (tmp_path / "v.raw").write_bytes(bytes(8))
    return tmp_path / "v.mhd"


def test_minimal_header_reads(tmp_path):
    assert read_volume(_header(tmp_path)).dims == (2, 2, 2)


@pytest.mark.parametrize("overrides, error", [
    ({"NDims": "2"}, Unsupported),
    ({"ObjectType": "Mesh"}, Unsupported),
    ({"ElementType": "MET_SHORT"}, Unsupported),
    ({"CompressedData": "True"}, Unsupported),
    ({"ElementByteOrderMSB": "True"}, Unsupported),
    ({"ElementDataFile": "LOCAL"}, Unsupported),
    ({"ElementNumberOfChannels": "3"}, Unsupported),
    ({"DimSize": "2 2 3"}, SizeMismatch),
    ({"DimSize": "2 2"}, ParseError),
    ({"DimSize": None}, ParseError),
    ({"ElementSpacing": "1 x 1"}, ParseError),
])
def test_header_errors(tmp_path, overrides, error):
    with pytest.raises(error):
        read_volume(_header(tmp_path, **overrides))


def test_malformed_line(tmp_path):
    path = _header(tmp_path)
    path.write_text(path.read_text() + "\nnot a field")
    with pytest.raises(ParseError):
        read_volume(path)


def test_missing_files(tmp_path):
    with pytest.raises(VolumeIOError):
        read_volume(tmp_path / "none.mhd")
    path = _header(tmp_path)
    (tmp_path / "v.raw").unlink()
    with pytest.raises(VolumeIOError):
        read_volume(path)


def test_nan_payload_rejected(tmp_path):
    path = _header(tmp_path, ElementType="MET_FLOAT")
    (tmp_path / "v.raw").write_bytes(np.full(8, np.nan, "<f4").tobytes())
    with pytest.raises(ParseError):
        read_volume(path)


def test_json_is_sorted_and_atomic(tmp_path):
    write_json({"b": 1, "a": {"d": 2, "c": 3}}, tmp_path / "r.json")
    text = (tmp_path / "r.json").read_text()
    assert text == dumps_json({"a": {"c": 3, "d": 2}, "b": 1})
    assert json.loads(text)["a"]["c"] == 3
    assert [p.name for p in tmp_path.iterdir()] == ["r.json"]
