"""Induced copies of (P_l)^t in Q_n.

Two ingredients:

* the staircase: for a block H with a Hamilton order 1..l, the paths
  Q_i = (i,1)..(i,l-i),(i+1,l-i)..(i+1,l-1) partition H x P_{l-1} into
  induced P_l's;
* antipodal decompositions of Q_{2^m-1}, cut into induced P_{l-1}'s and one
  induced P_b per path, where 2^m = (l-1-a)(l-1) + b and a = 2^m mod l.

The host splits as Q_{n'} x (Q_{2^m-1})^t. Q_{n'} gets a packing by
Hamilton-ordered blocks of b+1 vertices; block i is paired with a piece of
cube factor i and the product is cut into induced P_l's.
"""

from __future__ import annotations

import itertools

from .antipodal import antipodal_paths
from .certificate import PackingCertificate
from .errors import ParameterError, SizingError
from .hampath import (
    BlockProductCopy, HamOrderedBlock, any_path_power_copies, any_uncovered_count,
    min_dimension, uncovered_constant,
)
from .grid import Box, Placement, cube, full_pattern, path_power


def staircase_paths(l: int) -> list:
    """Index form of the staircase: l-1 paths of (block position, column) pairs, 0-based."""
    if l < 2:
        raise ParameterError("staircase needs l >= 2")
    paths = []
    for i in range(1, l):
        first = [(i, j) for j in range(1, l - i + 1)]
        second = [(i + 1, j) for j in range(l - i, l)]
        paths.append([(h - 1, j - 1) for h, j in first + second])
    return paths


def staircase_blocks(block: HamOrderedBlock, column: HamOrderedBlock) -> list:
    """Staircase paths of ``block`` x ``column`` as Hamilton-ordered blocks.

    ``column`` must be a path on |block| - 1 vertices over coordinates
    disjoint from the block's.
    """
    l = len(block)
    if len(column) != l - 1:
        raise ParameterError(f"column has {len(column)} vertices, need {l - 1}")
    coords = block.coords + column.coords
    lengths = block.lengths + column.lengths
    return [
        HamOrderedBlock(coords, [block.order[h] + column.order[j] for h, j in path], lengths)
        for path in staircase_paths(l)
    ]


def staircase_partition(block: HamOrderedBlock) -> list:
    """Partition block x P_{l-1} into l-1 induced P_l placements.

    The host is the local box (block coordinates, then a path factor of
    length l-1).
    """
    l = len(block)
    if l < 2:
        raise ParameterError("staircase needs a block with at least 2 vertices")
    d = len(block.coords)
    local = HamOrderedBlock(tuple(range(d)), block.order, block.lengths)
    column = HamOrderedBlock((d,), [(j,) for j in range(l - 1)], (l - 1,))
    host = Box(block.lengths + (l - 1,))
    pattern = full_pattern(path_power(l, 1))
    out = []
    for sb in staircase_blocks(local, column):
        out.append(Placement(pattern, host, sb.order, "induced"))
    return out


def induced_parameters(l: int, m=None) -> dict:
    """Cube-factor exponent m and the cut sizes a, b for induced (P_l)^t packings."""
    if l < 2:
        raise ParameterError(f"need l >= 2, got {l}")
    if m is None:
        m = 1
        while 2 ** m < l * l:
            m += 1
    if m < 1:
        raise ParameterError(f"m must be >= 1, got {m}")
    a = 2 ** m % l
    b = 2 ** m - (l - 1 - a) * (l - 1)
    if b <= 0:
        raise ParameterError(f"m={m} gives b={b} <= 0 for l={l}")
    if (b + 1) % l:
        raise ParameterError(f"m={m} gives b={b}, not -1 mod {l}")
    return {"m": m, "a": a, "b": b}


def induced_min_dimension(l: int, t: int, m=None) -> int:
    p = induced_parameters(l, m)
    return t * (2 ** p["m"] - 1) + min_dimension(p["b"] + 1, t)


def induced_constant(l: int, t: int, m=None) -> float:
    """K with uncovered <= K * n^(t-1) for the induced packing."""
    p = induced_parameters(l, m)
    return 2 ** (t * (2 ** p["m"] - 1)) * uncovered_constant(p["b"] + 1, t)


def induced_uncovered_count(l: int, t: int, n: int, m=None) -> int:
    p = induced_parameters(l, m)
    width = 2 ** p["m"] - 1
    return 2 ** (t * width) * any_uncovered_count(p["b"] + 1, t, n - t * width)


def _factor_pieces(l, a, b, m, offset):
    """Cut every antipodal path of the cube factor into (l-1)-pieces then one b-piece."""
    width = 2 ** m - 1
    coords = tuple(range(offset, offset + width))
    pieces = []
    for path in antipodal_paths(m):
        cuts = [l - 1] * (l - 1 - a) + [b]
        pos = 0
        for size in cuts:
            pieces.append(HamOrderedBlock(coords, path[pos:pos + size]))
            pos += size
    return pieces


def _split_product(block: HamOrderedBlock, piece: HamOrderedBlock, l: int) -> list:
    """Partition block x piece into induced P_l's (as blocks)."""
    if len(piece) == l - 1:
        return [sp for sub in block.split(l) for sp in staircase_blocks(sub, piece)]
    return [sub for sp in staircase_blocks(block, piece) for sub in sp.split(l)]


def induced_path_power_packing(l: int, t: int, n: int, m=None) -> PackingCertificate:
    """Pairwise disjoint induced copies of (P_l)^t in Q_n, missing O(n^(t-1)) vertices."""
    if t < 1:
        raise ParameterError(f"need t >= 1, got {t}")
    p = induced_parameters(l, m)
    m, a, b = p["m"], p["a"], p["b"]
    width = 2 ** m - 1
    need = induced_min_dimension(l, t, m)
    if n < need:
        raise SizingError(
            f"n={n} too small for induced (P_{l})^{t} with m={m}: need n >= {need}",
            minimum=need,
        )
    base_n = n - t * width
    host = cube(n)
    factor_pieces = [_factor_pieces(l, a, b, m, base_n + i * width) for i in range(t)]
    pad = (0,) * (t * width)
    copies = []
    for base in any_path_power_copies(b + 1, t, base_n):
        anchor = base.anchor + pad
        for pieces in itertools.product(*factor_pieces):
            per_factor = [
                _split_product(blk, pc, l) for blk, pc in zip(base.blocks, pieces)
            ]
            for blocks in itertools.product(*per_factor):
                copies.append(BlockProductCopy(host, anchor, blocks))
    params = {"l": l, "t": t, "n": n, "m": m, "a": a, "b": b}
    return PackingCertificate.build(
        host, [c.to_placement("induced") for c in copies], params
    )
