"""Partitions of Q_n, n = 2^s - 1, into induced antipodal paths.

Every path flips the coordinates 0, 1, ..., n-1 in that order, so it is a
geodesic (hence induced) from its start u to the complement of u. Only the
set of start vertices changes with s:

* s = 1: Q_1 is the single path 0, 1.
* s -> s + 1: write Q_{2n+1} = Q_n x Q_1 x Q_n. The starts are (x, 0, y)
  where x and y sit at the same position along their respective paths of
  the Q_n decomposition.

The position of a vertex along its path then determines a disjoint
transversal in each layer, which is what makes the doubled family a
partition.
"""

from __future__ import annotations

from functools import lru_cache

from .certificate import PackingCertificate
from .errors import ParameterError
from .grid import Placement, PatternGraph, cube, path_power


def _walk(start: int, n: int) -> list:
    """Vertex codes of the geodesic flipping coordinates 0..n-1 in order."""
    out = [start]
    v = start
    for c in range(n):
        v ^= 1 << (n - 1 - c)
        out.append(v)
    return out


@lru_cache(maxsize=None)
def _decomposition(s: int) -> tuple:
    """(n, starts, position) with position[v] = index of v along its path."""
    if s == 1:
        return 1, (0,), (0, 1)
    n0, _, pos0 = _decomposition(s - 1)
    by_pos = [[] for _ in range(n0 + 1)]
    for v, i in enumerate(pos0):
        by_pos[i].append(v)
    n = 2 * n0 + 1
    starts = sorted(
        (x << (n0 + 1)) | y for group in by_pos for x in group for y in group
    )
    position = [0] * (1 << n)
    for st in starts:
        for i, v in enumerate(_walk(st, n)):
            position[v] = i
    return n, tuple(starts), tuple(position)


def antipodal_paths(s: int) -> list:
    """The paths of the decomposition of Q_{2^s - 1}, as lists of coordinate tuples."""
    if s < 1:
        raise ParameterError(f"need s >= 1, got {s}")
    n, starts, _ = _decomposition(s)
    host = cube(n)
    return [[host.decode(c) for c in _walk(st, n)] for st in starts]


def ramras_decomposition(s: int) -> PackingCertificate:
    """Partition Q_{2^s - 1} into 2^n / (n + 1) induced paths with antipodal ends."""
    paths = antipodal_paths(s)
    n = (1 << s) - 1
    host = cube(n)
    pattern = PatternGraph(path_power(n + 1, 1), tuple((i,) for i in range(n + 1)))
    placements = [Placement(pattern, host, tuple(p), "induced") for p in paths]
    return PackingCertificate.build(host, placements, {"s": s, "n": n})
