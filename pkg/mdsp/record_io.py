"""
 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at
      http://www.apache.org/licenses/LICENSE-2.0
 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.

Trajectory files: one CSV per run (versioned comment line, header row, one row per
recorded iteration) and a JSON sidecar with the same stem carrying the run metadata.
"""
import csv
import json
import os
from typing import List, Tuple

import jstyleson
import numpy as np

from mdsp.definitions import METADATA_SCHEMA_VERSION, TRAJECTORY_CSV_VERSION
from mdsp.errors import RecordFormatError
from mdsp.solver.record import FinalState, RecordEntry, RunRecord

COLUMN_LEGEND = {
    "n": "iteration index; the row holds the state X_n before step n",
    "step": "step size gamma_n (learning rate for adaptive runs)",
    "x_i": "coordinate i of X_n",
    "half_i": "coordinate i of the half-step X_(n+1/2) (optimistic methods only)",
    "avg_i": "coordinate i of the ergodic average over X_1..X_n",
    "D_j": "distance from solution j to X_n (Bregman, or Euclidean norm for adaptive runs)",
    "queries": "oracle queries consumed once step n is done",
}


def _fmt(value: float) -> str:
    return format(float(value), ".16e")


def columns_for(record: RunRecord) -> List[str]:
    dim = record.dim
    cols = ["n", "step"] + ["x_{}".format(i) for i in range(dim)]
    if record.has_half_steps:
        cols += ["half_{}".format(i) for i in range(dim)]
    if record.has_averages:
        cols += ["avg_{}".format(i) for i in range(dim)]
    cols += ["D_{}".format(j) for j in range(len(record.solutions))]
    return cols + ["queries"]


def sidecar_path(csv_path: str) -> str:
    return os.path.splitext(csv_path)[0] + ".json"


def _to_builtin(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError("Object of type {} is not JSON serializable".format(type(obj).__name__))


def metadata_dict(record: RunRecord) -> dict:
    return {
        "schema": METADATA_SCHEMA_VERSION,
        "method": record.method,
        "problem": record.problem_label,
        "dim": record.dim,
        "solutions": [s.tolist() for s in record.solutions],
        "geometry": record.geometry,
        "schedule": record.schedule,
        "oracle": record.oracle,
        "record_every": record.record_every,
        "initial_point": None if record.initial_point is None else record.initial_point.tolist(),
        "distance_kind": record.distance_kind,
        "rows": len(record.entries),
        "complete": record.complete,
        "abort_reason": record.abort_reason,
        "diverged": record.diverged,
        "duration": record.duration,
        "certifications": record.certifications,
        "flags": record.flags,
        "final": None if record.final is None else record.final.to_dict(),
        "metadata": record.metadata,
        "columns": COLUMN_LEGEND,
    }


def write_trajectory_csv(record: RunRecord, path: str):
    cols = columns_for(record)
    with open(path, "w", newline="", encoding="utf-8") as f:
        f.write("# {} method={} problem={} dim={} solutions={}\n".format(
            TRAJECTORY_CSV_VERSION, record.method, record.problem_label, record.dim, len(record.solutions)))
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(cols)
        for e in record.entries:
            row = [str(e.n), _fmt(e.step)] + [_fmt(v) for v in e.point]
            if record.has_half_steps:
                row += [_fmt(v) for v in e.half]
            if record.has_averages:
                row += [_fmt(v) for v in e.average]
            row += [_fmt(d) for d in e.distances] + [str(e.queries)]
            writer.writerow(row)


def write_record(record: RunRecord, csv_path: str) -> Tuple[str, str]:
    directory = os.path.dirname(csv_path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    write_trajectory_csv(record, csv_path)
    json_path = sidecar_path(csv_path)
    with open(json_path, "w", encoding="utf-8") as f:
        json.dump(metadata_dict(record), f, indent=2, default=_to_builtin)
        f.write("\n")
    return csv_path, json_path


def _parse_rows(path: str, dim: int, solutions: int) -> Tuple[List[str], List[List[str]]]:
    try:
        with open(path, newline="", encoding="utf-8") as f:
            comment = f.readline()
            if not comment.startswith("# " + TRAJECTORY_CSV_VERSION):
                raise RecordFormatError("{} is not a '{}' trajectory".format(path, TRAJECTORY_CSV_VERSION))
            rows = list(csv.reader(f))
    except (OSError, UnicodeDecodeError, csv.Error) as e:
        raise RecordFormatError("Cannot read trajectory {}: {}".format(path, e))
    if not rows:
        raise RecordFormatError("{} has no header row".format(path))
    header, body = rows[0], rows[1:]
    expected_min = 3 + dim + solutions
    if header[:2] != ["n", "step"] or header[-1] != "queries" or len(header) < expected_min:
        raise RecordFormatError("Unexpected trajectory header in {}: {}".format(path, header))
    for i, row in enumerate(body):
        if len(row) != len(header):
            raise RecordFormatError("Row {} of {} has {} fields, expected {}".format(i + 1, path, len(row),
                                                                                     len(header)))
    return header, body


def read_record(csv_path: str) -> RunRecord:
    json_path = sidecar_path(csv_path)
    try:
        with open(json_path, encoding="utf-8") as f:
            meta = jstyleson.load(f)
    except (OSError, ValueError) as e:
        raise RecordFormatError("Cannot read run metadata {}: {}".format(json_path, e))
    if meta.get("schema") != METADATA_SCHEMA_VERSION:
        raise RecordFormatError("{} has schema {}, expected {}".format(json_path, meta.get("schema"),
                                                                      METADATA_SCHEMA_VERSION))
    try:
        dim = int(meta["dim"])
        record = RunRecord(meta["method"], meta["problem"], dim, meta["solutions"], geometry=meta.get("geometry"),
                           schedule=meta.get("schedule"), oracle=meta.get("oracle"),
                           record_every=int(meta.get("record_every", 1)),
                           initial_point=None if meta.get("initial_point") is None
                           else np.array(meta["initial_point"], dtype=np.float64),
                           distance_kind=meta.get("distance_kind", RunRecord.DISTANCE_BREGMAN),
                           metadata=meta.get("metadata", {}))
        n_solutions = len(record.solutions)
        header, body = _parse_rows(csv_path, dim, n_solutions)
        has_half = "half_0" in header
        has_avg = "avg_0" in header
        for row in body:
            values = row[2:-1]
            pos = 0
            point = np.array([float(v) for v in values[pos:pos + dim]])
            pos += dim
            half = None
            if has_half:
                half = np.array([float(v) for v in values[pos:pos + dim]])
                pos += dim
            average = None
            if has_avg:
                average = np.array([float(v) for v in values[pos:pos + dim]])
                pos += dim
            distances = [float(v) for v in values[pos:pos + n_solutions]]
            if pos + n_solutions != len(values):
                raise RecordFormatError("Row {} of {} does not match its header".format(row[0], csv_path))
            record.append(RecordEntry(int(row[0]), float(row[1]), point, half, average, distances, int(row[-1])))
        if len(record.entries) != int(meta["rows"]):
            raise RecordFormatError("{} holds {} rows but its metadata announces {}; the file is truncated".format(
                csv_path, len(record.entries), meta["rows"]))
        record.final = None if meta.get("final") is None else FinalState.from_dict(meta["final"])
        record.complete = bool(meta.get("complete", True))
        record.abort_reason = meta.get("abort_reason")
        record.diverged = bool(meta.get("diverged", False))
        record.duration = float(meta.get("duration", 0.0))
        record.certifications = list(meta.get("certifications", []))
        record.flags = list(meta.get("flags", []))
    except (KeyError, TypeError, ValueError) as e:
        raise RecordFormatError("Malformed trajectory {}: {}".format(csv_path, e))
    return record
