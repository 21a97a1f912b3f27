"""Stream record format (JSONL) and result sinks (CSV)."""

from __future__ import annotations

import json
import math
import sys
from typing import IO, Iterable, Iterator, List, Optional

from .core import ConfidenceBand, Observation
from .errors import DataQualityError, PositivityError

RECORD_KEYS = ("unit", "t", "w", "y", "p1", "yhat")
REQUIRED_KEYS = ("unit", "t", "w", "y", "p1")
BAND_HEADER = ("step", "t", "center", "half_width", "lower", "upper", "decision")


class RecordError(DataQualityError):
    """A stream line could not be turned into an observation."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def fmt(x: float, digits: int = 9) -> str:
    """Numbers are written with 9 significant digits."""
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.{digits}g}"


def _reject_constant(name):
    raise ValueError(f"non-finite literal {name}")


def _int_field(rec, key, line_no, minimum):
    v = rec[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise RecordError(line_no, f"field {key!r} must be an integer, got {v!r}")
    if v < minimum:
        raise RecordError(line_no, f"field {key!r} must be >= {minimum}, got {v!r}")
    return v


def _num_field(rec, key, line_no):
    v = rec[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise RecordError(line_no, f"field {key!r} must be a number, got {v!r}")
    return float(v)


def parse_record(line: str, line_no: int, strict: bool = False, warn: Optional[IO] = None) -> Observation:
    try:
        rec = json.loads(line, parse_constant=_reject_constant)
    except ValueError as exc:
        raise RecordError(line_no, f"malformed JSON ({exc})") from None
    if not isinstance(rec, dict):
        raise RecordError(line_no, "record must be a JSON object")
    unknown = sorted(set(rec) - set(RECORD_KEYS))
    if unknown:
        if strict:
            raise RecordError(line_no, f"unknown keys {unknown}")
        if warn is not None:
            print(f"warning: line {line_no}: ignoring unknown keys {unknown}", file=warn)
    missing = [k for k in REQUIRED_KEYS if k not in rec]
    if missing:
        raise RecordError(line_no, f"missing keys {missing}")
    unit = _int_field(rec, "unit", line_no, 0)
    t = _int_field(rec, "t", line_no, 1)
    w = _int_field(rec, "w", line_no, 0)
    if w > 1:
        raise RecordError(line_no, f"field 'w' must be 0 or 1, got {w!r}")
    y = _num_field(rec, "y", line_no)
    p1 = _num_field(rec, "p1", line_no)
    yhat = None if rec.get("yhat") is None else _num_field(rec, "yhat", line_no)
    try:
        return Observation(unit, t, w, y, p1, yhat)
    except PositivityError as exc:
        raise PositivityError(f"line {line_no}: positivity violated: {exc}") from None
    except DataQualityError as exc:
        raise RecordError(line_no, str(exc)) from None


def read_records(lines: Iterable[str], strict: bool = False, warn: Optional[IO] = None) -> Iterator[Observation]:
    """Parse JSONL lines, skipping blank ones; errors carry 1-based line numbers."""
    for no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        yield parse_record(line, no, strict, warn)


def record_to_json(obs: Observation) -> str:
    rec = {"unit": obs.unit_id, "t": obs.time, "w": obs.arm, "y": obs.outcome, "p1": obs.p1}
    if obs.prediction is not None:
        rec["yhat"] = obs.prediction
    return json.dumps(rec, separators=(",", ":"))


def write_records(records: Iterable[Observation], out: IO) -> None:
    for r in records:
        out.write(record_to_json(r) + "\n")


def band_row(band: ConfidenceBand, t: int, decision: str) -> str:
    return ",".join(
        [str(band.step), str(t), fmt(band.center), fmt(band.half_width), fmt(band.lower), fmt(band.upper), decision]
    )


def open_input(path: Optional[str]):
    if path is None or path == "-":
        return sys.stdin
    return open(path, "r", encoding="utf-8")


__all__ = [
    "RECORD_KEYS",
    "BAND_HEADER",
    "RecordError",
    "fmt",
    "parse_record",
    "read_records",
    "record_to_json",
    "write_records",
    "band_row",
    "open_input",
]
