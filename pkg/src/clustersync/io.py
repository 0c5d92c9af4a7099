"""Network JSON files and CSV output.

Network file layout (0-based indices, ``i`` = target row, ``j`` = source)::

    {"n": 6,
     "edges": [[i, j, w], ...],
     "clusters": [[0, 1, 2], [3, 4, 5]],
     "omega": [...],
     "mask_edges": [[i, j], ...] | "all"}

Floats go through ``repr`` in JSON, which round-trips bit for bit.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InputError, InvalidPartition
from .model import NetworkSpec, Partition
from .simulator import (
    Trajectory,
    cluster_order_parameter,
    frequency_spread,
    phase_spread,
)


@dataclass(frozen=True)
class NetworkFile:
    """Everything a network file holds. ``mask`` is ``None`` for "all"."""

    net: NetworkSpec
    partition: Partition
    mask: np.ndarray | None = None

    def mask_matrix(self) -> np.ndarray:
        return np.ones((self.net.n, self.net.n)) if self.mask is None else self.mask


def _index(value, n, field):
    if isinstance(value, bool) or not isinstance(value, int):
        raise InputError(field, f"node index must be an integer, got {value!r}")
    if not 0 <= value < n:
        raise InputError(field, f"node index {value} outside 0..{n - 1}")
    return value


def _real(value, field):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InputError(field, f"expected a number, got {value!r}")
    if not math.isfinite(value):
        raise InputError(field, f"non-finite value {value!r}")
    return float(value)


def parse_network(doc) -> NetworkFile:
    if not isinstance(doc, dict):
        raise InputError("<root>", "expected a JSON object")
    for key in ("n", "edges", "clusters", "omega"):
        if key not in doc:
            raise InputError(key, "missing")
    n = doc["n"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 2:
        raise InputError("n", f"must be an integer >= 2, got {n!r}")

    if not isinstance(doc["edges"], list):
        raise InputError("edges", "must be a list of [i, j, w]")
    a = np.zeros((n, n))
    seen = set()
    for k, e in enumerate(doc["edges"]):
        field = f"edges[{k}]"
        if not isinstance(e, list) or len(e) != 3:
            raise InputError(field, f"expected [i, j, w], got {e!r}")
        i, j = _index(e[0], n, field), _index(e[1], n, field)
        if (i, j) in seen:
            raise InputError(field, f"duplicate edge ({i}, {j})")
        seen.add((i, j))
        if i != j:
            a[i, j] = _real(e[2], field)

    omega = doc["omega"]
    if not isinstance(omega, list) or len(omega) != n:
        raise InputError("omega", f"must be a list of {n} numbers")
    omega = [_real(w, f"omega[{k}]") for k, w in enumerate(omega)]

    clusters = doc["clusters"]
    if not isinstance(clusters, list) or not all(isinstance(c, list) for c in clusters):
        raise InputError("clusters", "must be a list of lists of node indices")
    for k, c in enumerate(clusters):
        for i in c:
            _index(i, n, f"clusters[{k}]")
    try:
        partition = Partition(clusters, n)
    except InvalidPartition as exc:
        raise InputError("clusters", str(exc)) from None

    spec = doc.get("mask_edges", "all")
    if spec == "all":
        mask = None
    elif isinstance(spec, list):
        mask = np.zeros((n, n))
        for k, e in enumerate(spec):
            field = f"mask_edges[{k}]"
            if not isinstance(e, list) or len(e) != 2:
                raise InputError(field, f"expected [i, j], got {e!r}")
            mask[_index(e[0], n, field), _index(e[1], n, field)] = 1.0
    else:
        raise InputError("mask_edges", 'must be a list of [i, j] or "all"')

    return NetworkFile(NetworkSpec(a, omega), partition, mask)


def load_network(path) -> NetworkFile:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError("<file>", f"cannot read {path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError("<json>", f"malformed JSON: {exc}") from None
    return parse_network(doc)


def network_to_dict(nf: NetworkFile) -> dict:
    a = nf.net.weights
    rows, cols = np.nonzero(a)
    doc = {
        "n": nf.net.n,
        "edges": [[int(i), int(j), float(a[i, j])] for i, j in zip(rows, cols)],
        "clusters": [list(c) for c in nf.partition.clusters],
        "omega": [float(w) for w in nf.net.omega],
    }
    if nf.mask is None:
        doc["mask_edges"] = "all"
    else:
        doc["mask_edges"] = [[int(i), int(j)] for i, j in zip(*np.nonzero(nf.mask))]
    return doc


def save_network(nf: NetworkFile, path) -> None:
    write_json(network_to_dict(nf), path)


def write_json(doc, path) -> None:
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def _fmt(x) -> str:
    return format(float(x), ".17g")


def write_trajectory_csv(traj: Trajectory, path) -> None:
    n = traj.thetas.shape[1]
    header = ["t"] + [f"theta_{i}" for i in range(n)] + [f"freq_{i}" for i in range(n)]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for t, th, fr in zip(traj.times, traj.thetas, traj.freqs):
            w.writerow([_fmt(t)] + [_fmt(x) for x in th] + [_fmt(x) for x in fr])


def trajectory_metrics(traj: Trajectory, partition: Partition):
    return (
        phase_spread(traj, partition),
        frequency_spread(traj, partition),
        cluster_order_parameter(traj, partition),
    )


def write_metrics_csv(traj: Trajectory, partition: Partition, path) -> None:
    m = partition.m
    ph, fr, order = trajectory_metrics(traj, partition)
    header = (
        ["t"]
        + [f"spread_phase_{k}" for k in range(m)]
        + [f"spread_freq_{k}" for k in range(m)]
        + [f"order_{k}" for k in range(m)]
    )
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in zip(traj.times, ph, fr, order):
            t, p, f, o = row
            w.writerow([_fmt(t)] + [_fmt(x) for x in p] + [_fmt(x) for x in f] + [_fmt(x) for x in o])


def read_trajectory_csv(path) -> Trajectory:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    n = (data.shape[1] - 1) // 2
    return Trajectory(data[:, 0], data[:, 1:1 + n], data[:, 1 + n:])
