"""JSON/CSV serialisation and the run manifest written next to every output."""
import json
import sys
import time
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

MANIFEST_NAME = "manifest.json"


def mat_to_json(A):
    A = np.asarray(A, dtype=float)
    if A.ndim == 1:
        A = A[None, :]
    return {"rows": int(A.shape[0]), "cols": int(A.shape[1]), "entries": A.ravel().tolist()}


def mat_from_json(obj):
    """Accept the {"rows","cols","entries"} form or a plain nested list."""
    if isinstance(obj, dict):
        try:
            r, c, e = int(obj["rows"]), int(obj["cols"]), obj["entries"]
        except KeyError as exc:
            raise ValueError(f"matrix JSON is missing {exc.args[0]!r}") from None
        if r < 1 or c < 1 or len(e) != r * c:
            raise ValueError(f"rows*cols = {r * c} but {len(e)} entries given")
        A = np.asarray(e, dtype=float).reshape(r, c)
    else:
        A = np.asarray(obj, dtype=float)
        if A.ndim != 2:
            raise ValueError("matrix must be two-dimensional")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix entries must be finite")
    return A


def load_matrix(path):
    """Read a matrix from JSON, or from CSV (one row per line) by extension."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        A = np.loadtxt(path, delimiter=",", ndmin=2)
        if not np.all(np.isfinite(A)):
            raise ValueError("matrix entries must be finite")
        return A
    return mat_from_json(json.loads(path.read_text()))


def load_vector(path_or_text):
    """A vector from a JSON file (list or 1-row Mat) or from comma-separated text."""
    p = Path(path_or_text)
    if p.suffix.lower() == ".json" and p.exists():
        obj = json.loads(p.read_text())
        v = mat_from_json(obj).ravel() if isinstance(obj, dict) else np.asarray(obj, dtype=float)
    elif p.suffix.lower() == ".csv" and p.exists():
        v = np.loadtxt(p, delimiter=",", ndmin=1)
    else:
        v = np.array([float(s) for s in str(path_or_text).split(",")])
    return np.asarray(v, dtype=float).ravel()


def to_jsonable(obj):
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not np.isfinite(obj):
        return str(obj)
    return obj


def dumps(obj):
    """Canonical JSON: sorted keys, fixed indentation, so equal inputs give equal bytes."""
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True) + "\n"


def write_json(path, obj):
    Path(path).write_text(dumps(obj))


@dataclass
class RunManifest:
    command: list
    seed: int
    tolerance: dict
    artifacts: list = field(default_factory=list)
    verdicts: dict = field(default_factory=dict)
    wall_time: float = 0.0
    _t0: float = field(default_factory=time.perf_counter, repr=False)

    def finish(self):
        self.wall_time = time.perf_counter() - self._t0
        return self

    def to_dict(self):
        return {"command": self.command, "seed": self.seed, "tolerance": self.tolerance,
                "artifacts": sorted(self.artifacts), "verdicts": self.verdicts,
                "wall_time": self.wall_time}

    def write(self, out_dir=None):
        """Into ``out_dir/manifest.json``, or to stderr when there is no directory."""
        self.finish()
        if out_dir is None:
            sys.stderr.write(dumps(self))
            return None
        path = Path(out_dir) / MANIFEST_NAME
        write_json(path, self)
        return path
