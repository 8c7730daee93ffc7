"""Reading measured expectation values from JSON.

Input schema::

    {"schema": 1,
     "dims": [M, N],
     "records": [{"label": [i, j] | k, "value": <float>, "error": <float>}, ...]}

``[i, j]`` names the factor generators of ``X = g_i ⊗ h_j`` (ordering as in
:mod:`ewsearch.basis`); a bare integer is the flat basis index.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import IO

import numpy as np

from .basis import CoeffVector, DimensionError, build_basis
from .separation import TargetPoint


class IngestError(Exception):
    code = 4


class MalformedInput(IngestError):
    code = 4


class EmptyRecords(IngestError):
    code = 5


class UnknownLabel(IngestError):
    code = 6


class DuplicateLabel(IngestError):
    code = 7


class BoundViolation(IngestError):
    code = 8


@dataclass(frozen=True)
class ExpectationRecord:
    label: tuple[int, int] | int
    index: int
    value: float
    error_bar: float = 0.0


def _parse_label(label, basis) -> int:
    try:
        if isinstance(label, bool):
            raise TypeError
        if isinstance(label, int):
            idx = label
        elif isinstance(label, str) and "," in label:
            i, j = (int(t) for t in label.split(","))
            idx = basis.flat_index(i, j)
        elif isinstance(label, str):
            idx = int(label)
        elif isinstance(label, (list, tuple)) and len(label) == 2:
            idx = basis.flat_index(int(label[0]), int(label[1]))
        else:
            raise TypeError
    except (TypeError, ValueError, IndexError):
        raise UnknownLabel(f"unknown observable label {label!r}") from None
    if not 1 <= idx < basis.size:
        raise UnknownLabel(f"observable label {label!r} does not name a nontrivial basis element")
    return idx


def read_records(data: dict) -> tuple[tuple[int, int], list[ExpectationRecord]]:
    if not isinstance(data, dict):
        raise MalformedInput("top-level JSON value must be an object")
    if data.get("schema", 1) != 1:
        raise MalformedInput(f"unsupported schema {data.get('schema')!r}")
    try:
        m, n = (int(d) for d in data["dims"])
        basis = build_basis(m, n)
    except (KeyError, TypeError, ValueError, DimensionError) as exc:
        raise MalformedInput(f"invalid or missing 'dims': {exc}") from None
    recs = data.get("records")
    if not isinstance(recs, list):
        raise MalformedInput("'records' must be a list")
    if not recs:
        raise EmptyRecords("no records: the index set T must be nonempty")
    out = []
    seen = set()
    for rec in recs:
        if not isinstance(rec, dict) or "label" not in rec or "value" not in rec:
            raise MalformedInput(f"record {rec!r} needs 'label' and 'value'")
        idx = _parse_label(rec["label"], basis)
        if idx in seen:
            raise DuplicateLabel(f"duplicate label {rec['label']!r} (basis index {idx})")
        seen.add(idx)
        try:
            value = float(rec["value"])
            err = float(rec.get("error", 0.0))
        except (TypeError, ValueError):
            raise MalformedInput(f"non-numeric value in record {rec!r}") from None
        if not (math.isfinite(value) and math.isfinite(err)) or err < 0:
            raise MalformedInput(f"invalid value or error bar in record {rec!r}")
        # unit-norm observables on unit-trace states have |<X>| <= 1
        if abs(value) > 1.0 + err:
            raise BoundViolation(f"|value| {abs(value)} exceeds 1 + error bar for {rec['label']!r}")
        label = tuple(rec["label"]) if isinstance(rec["label"], list) else rec["label"]
        out.append(ExpectationRecord(label, idx, value, err))
    return (m, n), out


def ingest(source: str | Path | IO | dict, delta: float = 0.01) -> TargetPoint:
    """Build a :class:`TargetPoint` from a JSON file, path, file object or parsed JSON value.

    The per-coordinate error bars are half-widths of a box around ``p``; the
    error radius is the Euclidean norm of that box's corner offset.
    """
    if isinstance(source, (dict, list)):
        data = source
    else:
        try:
            if hasattr(source, "read"):
                data = json.load(source)
            else:
                with open(source) as fh:
                    data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise MalformedInput(f"malformed JSON: {exc}") from None
    dims, recs = read_records(data)
    recs.sort(key=lambda r: r.index)
    coords = CoeffVector([r.index for r in recs], [r.value for r in recs])
    radius = float(np.linalg.norm([r.error_bar for r in recs]))
    return TargetPoint(coords, delta, radius, dims=dims)


def records_from_state(rho, indices, error: float = 0.0) -> dict:
    """Exact expectation-value records for a known state (tests, demos)."""
    basis = build_basis(*rho.dims)
    from .basis import vectorize
    v = vectorize(rho, basis, indices)
    return {
        "schema": 1,
        "dims": list(rho.dims),
        "records": [{"label": list(basis.pair_index(int(i))), "value": float(x), "error": error}
                    for i, x in zip(v.indices, v.values)],
    }
