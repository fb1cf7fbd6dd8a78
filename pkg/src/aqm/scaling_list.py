"""Scaling-list documents: one layer's set of quantization matrices as text or JSON.

Text layout::

    AQM-SCALING-LIST v1
    [SIZE=8 KIND=intra LAYER=0 DC=16]
    16 16 16 16 17 18 21 24
    ...

Sections are ordered by size, intra before inter, rows in raster order. The
JSON form carries the same fields. Both parse back bit-exactly.
"""

from __future__ import annotations

import json
import os
import re
import tempfile
from dataclasses import dataclass

import numpy as np

from aqm.qm import KINDS, QuantizationMatrix

__all__ = [
    "HEADER",
    "ScalingListDocument",
    "ScalingListError",
    "emit_scaling_list",
    "parse_scaling_list",
    "write_atomic",
]

HEADER = "AQM-SCALING-LIST v1"
_SECTION = re.compile(r"^\[SIZE=(\d+) KIND=(intra|inter) LAYER=(-?\d+) DC=(-?\d+)\]$")


class ScalingListError(ValueError):
    pass


@dataclass
class ScalingListDocument:
    layer_id: int
    matrices: dict[tuple[int, str], QuantizationMatrix]


def _ordered(matrices) -> list[QuantizationMatrix]:
    if isinstance(matrices, dict):
        matrices = list(matrices.values())
    by_key = {}
    for qm in matrices:
        if qm.key in by_key:
            raise ScalingListError(f"duplicate matrix for size {qm.size} kind {qm.kind}")
        by_key[qm.key] = qm
    if not by_key:
        raise ScalingListError("no matrices to emit")
    sizes = sorted({size for size, _ in by_key})
    missing = [(s, k) for s in sizes for k in KINDS if (s, k) not in by_key]
    if missing:
        desc = ", ".join(f"{s}x{s} {k}" for s, k in missing)
        raise ScalingListError(f"incomplete matrix set, missing: {desc}")
    return [by_key[(s, k)] for s in sizes for k in KINDS]


def emit_scaling_list(matrices, layer_id: int = 0, fmt: str = "text") -> str:
    """Serialise a complete matrix set for one layer.

    ``matrices`` is an iterable of :class:`QuantizationMatrix` or a dict of
    them; every size present needs both an intra and an inter matrix.
    """
    if int(layer_id) != layer_id or layer_id < 0:
        raise ScalingListError(f"layer id must be a non-negative integer, got {layer_id!r}")
    ordered = _ordered(matrices)
    if fmt == "text":
        lines = [HEADER]
        for qm in ordered:
            lines.append(f"[SIZE={qm.size} KIND={qm.kind} LAYER={layer_id} DC={qm.dc}]")
            lines.extend(" ".join(str(int(v)) for v in row) for row in qm.values)
        return "\n".join(lines) + "\n"
    if fmt == "json":
        doc = {
            "format": HEADER,
            "layer": int(layer_id),
            "sections": [
                {
                    "size": qm.size,
                    "kind": qm.kind,
                    "layer": int(layer_id),
                    "dc": qm.dc,
                    "values": qm.values.tolist(),
                }
                for qm in ordered
            ],
        }
        return json.dumps(doc, indent=2) + "\n"
    raise ScalingListError(f"unknown format {fmt!r}")


def _build(size, kind, dc, rows) -> QuantizationMatrix:
    values = np.asarray(rows)
    if values.shape != (size, size):
        raise ScalingListError(f"section {size}x{size} {kind} has shape {values.shape}")
    try:
        return QuantizationMatrix(values, kind=kind, provenance="user", dc=dc)
    except ValueError as exc:
        raise ScalingListError(str(exc)) from None


def _parse_text(text: str) -> ScalingListDocument:
    lines = [line.strip() for line in text.splitlines()]
    lines = [line for line in lines if line]
    if not lines or lines[0] != HEADER:
        raise ScalingListError(f"missing {HEADER!r} header")
    sections = []
    layers = set()
    pos = 1
    while pos < len(lines):
        match = _SECTION.match(lines[pos])
        if match is None:
            raise ScalingListError(f"expected section header, got {lines[pos]!r}")
        size, kind, layer, dc = int(match[1]), match[2], int(match[3]), int(match[4])
        rows = lines[pos + 1 : pos + 1 + size]
        if len(rows) != size:
            raise ScalingListError(f"section {size}x{size} {kind} is truncated")
        try:
            parsed = [[int(tok) for tok in row.split()] for row in rows]
        except ValueError:
            raise ScalingListError(f"non-integer entry in section {size}x{size} {kind}") from None
        sections.append(_build(size, kind, dc, parsed))
        layers.add(layer)
        pos += 1 + size
    return _document(sections, layers)


def _parse_json(text: str) -> ScalingListDocument:
    try:
        doc = json.loads(text)
        if doc.get("format") != HEADER:
            raise ScalingListError(f"missing {HEADER!r} format tag")
        sections = [
            _build(int(s["size"]), s["kind"], int(s["dc"]), s["values"]) for s in doc["sections"]
        ]
        layers = {int(s["layer"]) for s in doc["sections"]} | {int(doc["layer"])}
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise ScalingListError(f"malformed JSON scaling list: {exc}") from None
    return _document(sections, layers)


def _document(sections, layers) -> ScalingListDocument:
    if len(layers) != 1:
        raise ScalingListError(f"expected a single layer per document, got {sorted(layers)}")
    ordered = _ordered(sections)
    return ScalingListDocument(layers.pop(), {qm.key: qm for qm in ordered})


def parse_scaling_list(text: str) -> ScalingListDocument:
    """Parse either serialisation; the format is detected from the first character."""
    if text.lstrip().startswith("{"):
        return _parse_json(text)
    return _parse_text(text)


def write_atomic(path, text: str) -> None:
    """Write ``text`` to ``path`` via a sibling temp file so failures leave nothing behind."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".aqm-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
