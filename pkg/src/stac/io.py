"""MetaImage (.mhd + .raw) volume files and JSON reports.

Only uncompressed little-endian 3D volumes are handled: ``MET_UCHAR`` maps
to :class:`LabelVolume` and ``MET_FLOAT`` to :class:`ScalarVolume`. Payloads
are x-fastest. Every write goes through a temporary file and ``os.replace``.
"""
from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path
from typing import Dict, Union

import numpy as np

from .exceptions import ParseError, SizeMismatch, Unsupported, VolumeIOError
from .grid import LabelVolume, ScalarVolume

ELEMENT_TYPES = {"MET_UCHAR": np.dtype("<u1"), "MET_FLOAT": np.dtype("<f4")}

PathLike = Union[str, os.PathLike]


def _atomic_write(path: Path, payload: bytes) -> None:
    path = Path(path)
    try:
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(payload)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    except OSError as exc:
        raise VolumeIOError(f"cannot write {path}: {exc}") from exc


def _raw_path(header_path: Path) -> Path:
    return header_path.with_suffix(".raw")


def _fmt(values) -> str:
    return " ".join(repr(float(v)) if isinstance(v, float) else str(v) for v in values)


def encode_volume(vol: Union[ScalarVolume, LabelVolume]) -> tuple[str, bytes]:
    """Header text (without ElementDataFile) and raw payload bytes."""
    if isinstance(vol, LabelVolume):
        etype, dtype = "MET_UCHAR", ELEMENT_TYPES["MET_UCHAR"]
    elif isinstance(vol, ScalarVolume):
        etype, dtype = "MET_FLOAT", ELEMENT_TYPES["MET_FLOAT"]
    else:
        raise TypeError(f"cannot write {type(vol).__name__}")
    payload = np.asarray(vol.data, dtype=dtype).ravel(order="F").tobytes()
    lines = [
        "ObjectType = Image",
        "NDims = 3",
        "BinaryData = True",
        "BinaryDataByteOrderMSB = False",
        "CompressedData = False",
        f"DimSize = {_fmt(vol.dims)}",
        f"ElementSpacing = {_fmt(vol.spacing)}",
        f"ElementType = {etype}",
        "ElementByteOrderMSB = False",
    ]
    return "\n".join(lines), payload


def write_volume(vol: Union[ScalarVolume, LabelVolume], path: PathLike) -> None:
    """Write ``path`` (.mhd header) and its .raw payload next to it."""
    header_path = Path(path)
    raw_path = _raw_path(header_path)
    header, payload = encode_volume(vol)
    header += f"\nElementDataFile = {raw_path.name}\n"
    _atomic_write(raw_path, payload)
    _atomic_write(header_path, header.encode("ascii"))


def parse_header(text: str) -> Dict[str, str]:
    fields: Dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ParseError(f"line {lineno}: expected 'Key = Value', got {line!r}")
        fields[key.strip()] = value.strip()
    return fields


def _require(fields, key):
    if key not in fields:
        raise ParseError(f"missing required key {key}")
    return fields[key]


def _numbers(fields, key, cast, default=None):
    if key not in fields:
        if default is None:
            raise ParseError(f"missing required key {key}")
        return default
    try:
        values = tuple(cast(v) for v in fields[key].split())
    except ValueError as exc:
        raise ParseError(f"{key}: {exc}") from exc
    if len(values) != 3:
        raise ParseError(f"{key} needs 3 values, got {len(values)}")
    return values


def _is_true(value: str) -> bool:
    return value.strip().lower() in ("true", "1")


def read_volume(path: PathLike) -> Union[ScalarVolume, LabelVolume]:
    header_path = Path(path)
    try:
        text = header_path.read_text(encoding="ascii")
    except UnicodeDecodeError as exc:
        raise ParseError(f"{header_path} is not an ASCII MetaImage header") from exc
    except OSError as exc:
        raise VolumeIOError(f"cannot read {header_path}: {exc}") from exc
    fields = parse_header(text)

    if _require(fields, "ObjectType") != "Image":
        raise Unsupported(f"ObjectType {fields['ObjectType']!r} is not Image")
    try:
        ndims = int(_require(fields, "NDims"))
    except ValueError as exc:
        raise ParseError(f"NDims: {exc}") from exc
    if ndims != 3:
        raise Unsupported(f"only 3D volumes are supported, got NDims = {ndims}")
    for key in ("ElementByteOrderMSB", "BinaryDataByteOrderMSB"):
        if key in fields and _is_true(fields[key]):
            raise Unsupported("big-endian payloads are not supported")
    if _is_true(fields.get("CompressedData", "False")):
        raise Unsupported("compressed payloads are not supported")
    if int(fields.get("ElementNumberOfChannels", "1")) != 1:
        raise Unsupported("multi-channel volumes are not supported")
    if fields.get("HeaderSize", "0") != "0":
        raise Unsupported("HeaderSize other than 0 is not supported")

    dims = _numbers(fields, "DimSize", int)
    if min(dims) < 1:
        raise ParseError(f"DimSize must be positive, got {dims}")
    spacing = _numbers(fields, "ElementSpacing", float, default=(1.0, 1.0, 1.0))
    etype = _require(fields, "ElementType")
    if etype not in ELEMENT_TYPES:
        raise Unsupported(f"ElementType {etype} is not supported")
    data_file = _require(fields, "ElementDataFile")
    if data_file in ("LOCAL", "LIST") or data_file.startswith("LIST "):
        raise Unsupported(f"ElementDataFile = {data_file} is not supported")

    dtype = ELEMENT_TYPES[etype]
    raw_path = header_path.parent / data_file
    try:
        payload = raw_path.read_bytes()
    except OSError as exc:
        raise VolumeIOError(f"cannot read {raw_path}: {exc}") from exc
    expected = int(np.prod(dims)) * dtype.itemsize
    if len(payload) != expected:
        raise SizeMismatch(f"{raw_path.name} holds {len(payload)} bytes, header implies {expected}")
    data = np.frombuffer(payload, dtype=dtype).reshape(dims, order="F")
    if etype == "MET_UCHAR":
        return LabelVolume(data, spacing)
    if not np.all(np.isfinite(data)):
        raise ParseError(f"{raw_path.name} contains NaN or Inf")
    return ScalarVolume(data, spacing)


def file_digest(path: PathLike) -> str:
    """sha256 over an .mhd header and its payload (or over any single file)."""
    path = Path(path)
    h = hashlib.sha256(path.read_bytes())
    if path.suffix == ".mhd":
        fields = parse_header(path.read_text(encoding="ascii"))
        raw = path.parent / fields.get("ElementDataFile", "")
        if raw.is_file():
            h.update(raw.read_bytes())
    return h.hexdigest()


def dumps_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def write_json(obj, path: PathLike) -> None:
    _atomic_write(Path(path), dumps_json(obj).encode("utf-8"))
