"""Chain records, collectors and CSV ingestion.

A chain record is one retained MCMC state. On disk it is a single JSON
line with fixed field names: ``iteration_num``, ``cluster_states`` (each
with ``cardinality`` and a ``params`` map of name -> row-major data plus
shape), ``cluster_allocs`` and ``mixing_state``. Python's shortest
round-trip float repr makes the encoding lossless, so replayed chains are
bit-identical to the collected ones.
"""

import json
import os

import numpy as np

from .exceptions import DecodeError


class ClusterParams:
    """Snapshot of one component: cardinality plus named parameter arrays."""

    __slots__ = ("cardinality", "params")

    def __init__(self, cardinality, params):
        self.cardinality = int(cardinality)
        self.params = params

    def __eq__(self, other):
        if not isinstance(other, ClusterParams):
            return NotImplemented
        if self.cardinality != other.cardinality:
            return False
        if set(self.params) != set(other.params):
            return False
        return all(np.array_equal(self.params[k], other.params[k]) for k in self.params)

    def __repr__(self):
        return f"ClusterParams(cardinality={self.cardinality}, params={list(self.params)})"


class ChainState:
    """One retained iteration: component snapshots, allocations, mixing state."""

    __slots__ = ("iteration", "cluster_states", "allocations", "mixing_params")

    def __init__(self, iteration, cluster_states, allocations, mixing_params):
        self.iteration = int(iteration)
        self.cluster_states = list(cluster_states)
        self.allocations = np.asarray(allocations, dtype=int)
        self.mixing_params = mixing_params

    def num_clusters(self):
        return len(set(self.allocations.tolist()))

    def __eq__(self, other):
        if not isinstance(other, ChainState):
            return NotImplemented
        if self.iteration != other.iteration:
            return False
        if not np.array_equal(self.allocations, other.allocations):
            return False
        if self.cluster_states != other.cluster_states:
            return False
        if set(self.mixing_params) != set(other.mixing_params):
            return False
        for key in self.mixing_params:
            a, b = self.mixing_params[key], other.mixing_params[key]
            if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
                if not np.array_equal(np.asarray(a), np.asarray(b)):
                    return False
            elif a != b:
                return False
        return True

    def __repr__(self):
        return (
            f"ChainState(iteration={self.iteration}, "
            f"k={len(self.cluster_states)}, n={self.allocations.shape[0]})"
        )


def _encode_array(arr):
    arr = np.asarray(arr, dtype=float)
    return {"data": arr.reshape(-1).tolist(), "shape": list(arr.shape)}


def _decode_array(obj):
    return np.asarray(obj["data"], dtype=float).reshape(obj["shape"])


def encode_state(state):
    """Serialize a :class:`ChainState` to one line of text."""
    mixing = {}
    for key, value in state.mixing_params.items():
        if isinstance(value, np.ndarray):
            mixing[key] = _encode_array(value)
        else:
            mixing[key] = float(value)
    doc = {
        "iteration_num": state.iteration,
        "cluster_states": [
            {
                "cardinality": cs.cardinality,
                "params": {k: _encode_array(v) for k, v in cs.params.items()},
            }
            for cs in state.cluster_states
        ],
        "cluster_allocs": state.allocations.tolist(),
        "mixing_state": mixing,
    }
    return json.dumps(doc, separators=(",", ":"))


def decode_state(line, record_index=None):
    """Parse one serialized record; validates allocation/cardinality consistency."""
    try:
        doc = json.loads(line)
        clusters = [
            ClusterParams(
                cs["cardinality"],
                {k: _decode_array(v) for k, v in cs["params"].items()},
            )
            for cs in doc["cluster_states"]
        ]
        mixing = {}
        for key, value in doc["mixing_state"].items():
            mixing[key] = _decode_array(value) if isinstance(value, dict) else float(value)
        state = ChainState(doc["iteration_num"], clusters, doc["cluster_allocs"], mixing)
    except (KeyError, TypeError, ValueError) as err:
        raise DecodeError(f"malformed chain record: {err}", record_index) from None
    counts = np.bincount(state.allocations, minlength=len(clusters))
    if state.allocations.size and (
        state.allocations.min() < 0 or state.allocations.max() >= len(clusters)
    ):
        raise DecodeError("allocation out of range", record_index)
    for h, cs in enumerate(clusters):
        if counts[h] != cs.cardinality:
            raise DecodeError(
                f"cluster {h} cardinality {cs.cardinality} != allocation count {counts[h]}",
                record_index,
            )
    return state


class MemoryCollector:
    """Keeps the chain in a list, with a read cursor for replay."""

    def __init__(self):
        self._states = []
        self._cursor = 0

    def start_collecting(self):
        pass

    def finish_collecting(self):
        pass

    def collect(self, state):
        self._states.append(state)

    def get_size(self):
        return len(self._states)

    def get_next_state(self):
        if self._cursor >= len(self._states):
            return None
        state = self._states[self._cursor]
        self._cursor += 1
        return state

    def rewind(self):
        self._cursor = 0

    def reset(self):
        """Discard all collected states and rewind."""
        self._states = []
        self._cursor = 0

    def __iter__(self):
        return iter(list(self._states))

    def __len__(self):
        return len(self._states)


class FileCollector:
    """Streams records to a line-delimited chain file and replays them."""

    def __init__(self, path):
        self.path = str(path)
        self._handle = None
        self._size = 0
        self._read_iter = None
        if os.path.exists(self.path):
            self._size = self._count_records()

    def _count_records(self):
        count = 0
        with open(self.path, "r", encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    count += 1
        return count

    def start_collecting(self):
        self._handle = open(self.path, "w", encoding="utf-8")
        self._size = 0

    def finish_collecting(self):
        if self._handle is not None:
            self._handle.close()
            self._handle = None

    def collect(self, state):
        if self._handle is None:
            self.start_collecting()
        self._handle.write(encode_state(state))
        self._handle.write("\n")
        self._size += 1

    def get_size(self):
        return self._size

    def _read_records(self):
        self.finish_collecting()
        index = 0
        with open(self.path, "r", encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                index += 1
                yield decode_state(line, record_index=index)

    def get_next_state(self):
        if self._read_iter is None:
            self._read_iter = self._read_records()
        try:
            return next(self._read_iter)
        except StopIteration:
            self._read_iter = None
            return None

    def rewind(self):
        self._read_iter = None

    def reset(self):
        """Discard the stored chain (truncates the file) and rewind."""
        self.finish_collecting()
        open(self.path, "w", encoding="utf-8").close()
        self._size = 0
        self._read_iter = None

    def __iter__(self):
        return self._read_records()

    def __len__(self):
        return self._size


def read_csv_matrix(path):
    """Read a rectangular headerless numeric CSV into an (n, d) float array."""
    rows = []
    width = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            cells = line.split(",")
            if width is None:
                width = len(cells)
            elif len(cells) != width:
                raise ValueError(
                    f"{path}: ragged row at line {lineno} "
                    f"({len(cells)} cells, expected {width})"
                )
            try:
                rows.append([float(c) for c in cells])
            except ValueError:
                raise ValueError(f"{path}: non-numeric cell at line {lineno}") from None
    if not rows:
        raise ValueError(f"{path}: empty matrix file")
    matrix = np.asarray(rows, dtype=float)
    if not np.all(np.isfinite(matrix)):
        raise ValueError(f"{path}: matrix contains non-finite entries")
    return matrix


def write_csv_matrix(path, matrix):
    """Write a 1-d or 2-d array as headerless CSV with lossless float repr."""
    arr = np.asarray(matrix)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    with open(path, "w", encoding="utf-8") as fh:
        for row in arr:
            fh.write(",".join(_format_cell(v) for v in row))
            fh.write("\n")


def _format_cell(value):
    f = float(value)
    if f == int(f) and abs(f) < 1e15:
        return str(int(f))
    return repr(f)
