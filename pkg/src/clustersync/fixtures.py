"""Reference networks.

Node ``k`` here is node ``k + 1`` in the usual 1-based drawings, so the
clusters {1,2,3}, {4,5,6} become [0, 1, 2], [3, 4, 5].
"""
from __future__ import annotations

import numpy as np

from .io import NetworkFile
from .model import NetworkSpec, Partition

TWO_BY_THREE = [[0, 1, 2], [3, 4, 5]]

EXAMPLE1_WEIGHTS = np.array([
    [0, 0, 0, 0, 0, 10],
    [0, 0, 0, 5, 0, 5],
    [0, 0, 0, 0, 10, 0],
    [9, 0, 0, 0, 0, 0],
    [0, 9, 0, 0, 0, 0],
    [0, 7, 2, 2, 0, 0],
], dtype=float)

# Example 1 with a_16 raised from 10 to 12 and the intra-cluster edge
# a_64 dropped.
EXAMPLE2_WEIGHTS = np.array([
    [0, 0, 0, 0, 0, 12],
    [0, 0, 0, 5, 0, 5],
    [0, 0, 0, 0, 10, 0],
    [9, 0, 0, 0, 0, 0],
    [0, 9, 0, 0, 0, 0],
    [0, 7, 2, 0, 0, 0],
], dtype=float)

EXAMPLE2_MASK = np.array([
    [0, 1, 1, 0, 0, 0],
    [1, 0, 1, 0, 1, 0],
    [1, 1, 0, 0, 1, 1],
    [0, 1, 1, 0, 1, 1],
    [1, 1, 1, 1, 0, 1],
    [1, 0, 0, 1, 1, 0],
], dtype=float)

FAST_SLOW_OMEGA = np.array([30, 30, 30, 10, 10, 10], dtype=float)
CLOSE_OMEGA = np.array([19, 19, 19, 10, 10, 10], dtype=float)


def example1(omega=FAST_SLOW_OMEGA) -> NetworkFile:
    return NetworkFile(NetworkSpec(EXAMPLE1_WEIGHTS, omega), Partition(TWO_BY_THREE, 6))


def example2(omega=CLOSE_OMEGA) -> NetworkFile:
    return NetworkFile(
        NetworkSpec(EXAMPLE2_WEIGHTS, omega), Partition(TWO_BY_THREE, 6), EXAMPLE2_MASK.copy()
    )


def remark1(omega_bar: float = 1.0, a12=2.0, a21=2.0, a23=-0.5, a32=-0.5, a34=2.0, a43=2.0) -> NetworkFile:
    """Four-node chain, clusters {0, 1} and {2, 3}, identical frequencies.

    Inter-cluster row sums differ (node 0 receives nothing from the second
    cluster, node 1 receives ``a23``), yet antipodal cluster phases stay
    locked because every coupling term vanishes. The default inter-cluster
    edges are repulsive so the antipodal state attracts; with attractive
    ones it is a repeller and rounding errors grow.
    """
    a = np.zeros((4, 4))
    a[0, 1], a[1, 0], a[1, 2] = a12, a21, a23
    a[2, 1], a[2, 3], a[3, 2] = a32, a34, a43
    return NetworkFile(NetworkSpec(a, np.full(4, omega_bar)), Partition([[0, 1], [2, 3]], 4))


def remark1_phases(offset: float = 0.3) -> np.ndarray:
    return np.array([offset, offset, offset + np.pi, offset + np.pi])
