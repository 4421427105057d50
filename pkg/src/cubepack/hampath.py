"""Gray-code Hamilton cycles and (not necessarily induced) packings of Q_n by path powers.

Odd l: write Q_n = (Q_m)^r x Q_a where l divides 2^m - 1. A Hamilton cycle of
Q_m minus its starting vertex splits into (2^m - 1)/l runs of l consecutive
vertices. A cell of (Q_m)^r picks, per factor, either the leftover vertex or
a run; cells with at least t runs are sliced into copies of (P_l)^t.

Even l: halve l, pack Q_{n-t}, then splice every block with one fresh
coordinate (the zig-zag Hamilton path of P_k x Q_1).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from .certificate import PackingCertificate
from .errors import ParameterError, SizingError
from .grid import Box, Placement, cube, full_pattern, path_power


def gray_cycle(n: int) -> list:
    """Reflected binary Gray code on Q_n, starting at the all-zeros vertex."""
    if n < 1:
        raise ParameterError("gray_cycle needs n >= 1")
    out = []
    for i in range(1 << n):
        g = i ^ (i >> 1)
        out.append(tuple((g >> (n - 1 - b)) & 1 for b in range(n)))
    return out


def mult_order_of_two(l: int) -> int:
    """Least m >= 1 with 2^m = 1 (mod l), for odd l."""
    if l < 1 or l % 2 == 0:
        raise ParameterError(f"mult_order_of_two needs odd l >= 1, got {l}")
    if l == 1:
        return 1
    m, x = 1, 2 % l
    while x != 1:
        x = (x * 2) % l
        m += 1
    return m


def two_adic_valuation(l: int) -> int:
    return (l & -l).bit_length() - 1


@dataclass(frozen=True)
class HamOrderedBlock:
    """A vertex set on a few host coordinates together with a Hamilton path through it.

    ``order`` lists sub-vertices (values on ``coords``) so that consecutive
    entries are adjacent.
    """

    coords: tuple
    order: tuple
    lengths: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))
        object.__setattr__(self, "order", tuple(tuple(v) for v in self.order))
        if self.lengths is None:
            object.__setattr__(self, "lengths", (2,) * len(self.coords))

    def __len__(self):
        return len(self.order)

    @property
    def box(self) -> Box:
        return Box(self.lengths)

    def validate(self) -> None:
        box = self.box
        for v in self.order:
            box.check(v)
        if len(set(self.order)) != len(self.order):
            raise ValueError("block order repeats a vertex")
        if len(set(self.coords)) != len(self.coords):
            raise ValueError("block coordinates repeat")
        for u, v in zip(self.order, self.order[1:]):
            if sorted(abs(a - b) for a, b in zip(u, v) if a != b) != [1]:
                raise ValueError(f"order entries {u} and {v} are not adjacent")

    def splice(self, coord: int) -> "HamOrderedBlock":
        """Double the block with a new Q_1 coordinate: (b1,0)..(bk,0),(bk,1)..(b1,1)."""
        order = [v + (0,) for v in self.order] + [v + (1,) for v in reversed(self.order)]
        return HamOrderedBlock(self.coords + (coord,), order, self.lengths + (2,))

    def split(self, size: int) -> list:
        """Cut the order into consecutive sub-blocks of ``size`` vertices."""
        if len(self.order) % size:
            raise ParameterError(f"block of {len(self.order)} vertices not divisible into {size}s")
        return [
            HamOrderedBlock(self.coords, self.order[i:i + size], self.lengths)
            for i in range(0, len(self.order), size)
        ]


@lru_cache(maxsize=None)
def path_power_pattern(l: int, t: int):
    return full_pattern(path_power(l, t))


@dataclass(frozen=True)
class BlockProductCopy:
    """Product of t blocks on disjoint host coordinates; other coordinates fixed by ``anchor``."""

    host: Box
    anchor: tuple
    blocks: tuple

    def to_placement(self, mode: str = "subgraph") -> Placement:
        l = len(self.blocks[0])
        t = len(self.blocks)
        strides = self.host.strides
        base = list(self.anchor)
        for b in self.blocks:
            for c in b.coords:
                base[c] = 0
        base_code = self.host.encode(base)
        tables = [
            [sum(strides[c] * x for c, x in zip(b.coords, v)) for v in b.order]
            for b in self.blocks
        ]
        decode = self.host.decode
        image = tuple(
            decode(base_code + sum(tab[i] for tab, i in zip(tables, idx)))
            for idx in itertools.product(range(l), repeat=t)
        )
        return Placement(
            path_power_pattern(l, t), self.host, image, mode,
            blocks=tuple(b.coords for b in self.blocks),
        )


def block_product_from_placement(p: Placement) -> BlockProductCopy:
    """Recover the block structure of a product-of-paths placement and check it.

    Raises ValueError when the placement is not a product of Hamilton-ordered
    blocks on its recorded coordinates.
    """
    if p.blocks is None:
        raise ValueError("placement records no block coordinates")
    amb = p.pattern.ambient.lengths
    t = len(p.blocks)
    if len(amb) != t or len(set(amb)) != 1 or len(p.pattern) != amb[0] ** t:
        raise ValueError("pattern is not a full (P_l)^t")
    l = amb[0]
    image = p.image
    stride = [l ** (t - 1 - j) for j in range(t)]
    blocks = []
    for j, coords in enumerate(p.blocks):
        order = [tuple(image[i * stride[j]][c] for c in coords) for i in range(l)]
        block = HamOrderedBlock(coords, order, tuple(p.host.lengths[c] for c in coords))
        block.validate()
        blocks.append(block)
    copy = BlockProductCopy(p.host, image[0], tuple(blocks))
    if copy.to_placement(p.mode).image != image:
        raise ValueError("placement is not the product of its blocks")
    return copy


def odd_uncovered_count(l: int, t: int, n: int) -> int:
    """Exact uncovered count of the odd-l construction on Q_n."""
    m = mult_order_of_two(l)
    r, a = divmod(n, m)
    return 2 ** a * sum(math.comb(r, s) * (2 ** m - 1) ** s for s in range(t))


def _trivial_core(l: int) -> bool:
    """l is a power of two >= 2: the doubling starts from single vertices, which tile perfectly."""
    return l >= 2 and l & (l - 1) == 0


def any_uncovered_count(l: int, t: int, n: int) -> int:
    if _trivial_core(l):
        return 0
    v = two_adic_valuation(l)
    return 2 ** (t * v) * odd_uncovered_count(l >> v, t, n - t * v)


def min_dimension(l: int, t: int) -> int:
    """Smallest n accepted by pack_any_path_power(l, t, n)."""
    v = two_adic_valuation(l)
    if _trivial_core(l):
        return t * v
    return t * v + t * mult_order_of_two(l >> v)


def uncovered_bound(l: int, t: int, n: int) -> int:
    """The 2^(a + m(t-1)) * |[r]^(<t)| bound, scaled by 2^(tv) for even l."""
    v = two_adic_valuation(l)
    m = mult_order_of_two(l >> v)
    r, a = divmod(n - t * v, m)
    return 2 ** (t * v) * 2 ** (a + m * (t - 1)) * sum(math.comb(r, s) for s in range(t))


def uncovered_constant(l: int, t: int) -> float:
    """K with any_uncovered_count(l, t, n) <= K * n^(t-1) for all admissible n."""
    if _trivial_core(l):
        return 0.0
    v = two_adic_valuation(l)
    m = mult_order_of_two(l >> v)
    c = (2 ** m - 1) / m
    return 2 ** (t * v) * 2 ** (m - 1) * sum(c ** s for s in range(t))


def _check_params(l, t, n):
    if l < 1 or t < 1:
        raise ParameterError(f"need l >= 1 and t >= 1, got l={l}, t={t}")
    need = min_dimension(l, t)
    if n < need:
        raise SizingError(f"n={n} too small for (P_{l})^{t}: need n >= {need}", minimum=need)


def _odd_copies(l: int, t: int, n: int) -> list:
    m = mult_order_of_two(l)
    r, a = divmod(n, m)
    host = cube(n)
    cyc = gray_cycle(m)
    runs = [cyc[1 + j * l: 1 + (j + 1) * l] for j in range(((1 << m) - 1) // l)]
    tail = list(range(r * m, n))
    copies = []
    for s in range(t, r + 1):
        for factors in itertools.combinations(range(r), s):
            blockf, freef = factors[:t], factors[t:]
            for run_ids in itertools.product(range(len(runs)), repeat=s):
                blocks = tuple(
                    HamOrderedBlock(tuple(range(f * m, (f + 1) * m)), runs[run_ids[i]])
                    for i, f in enumerate(blockf)
                )
                free_runs = [runs[i] for i in run_ids[t:]]
                for picks in itertools.product(*free_runs):
                    for tail_vals in itertools.product((0, 1), repeat=a):
                        anchor = [0] * n
                        for f, val in zip(freef, picks):
                            anchor[f * m:(f + 1) * m] = val
                        for c, x in zip(tail, tail_vals):
                            anchor[c] = x
                        copies.append(BlockProductCopy(host, tuple(anchor), blocks))
    return copies


def odd_params(l, t, n):
    m = mult_order_of_two(l)
    r, a = divmod(n, m)
    return {"l": l, "t": t, "n": n, "m": m, "r": r, "a": a}


def pack_odd_path_power(l: int, t: int, n: int) -> PackingCertificate:
    """Subgraph copies of (P_l)^t in Q_n for odd l, missing O(n^(t-1)) vertices."""
    if l % 2 == 0:
        raise ParameterError(f"pack_odd_path_power needs odd l, got {l}")
    _check_params(l, t, n)
    copies = _odd_copies(l, t, n)
    params = odd_params(l, t, n)
    return PackingCertificate.build(
        cube(n), [c.to_placement() for c in copies], params
    )


def any_path_power_copies(l: int, t: int, n: int) -> list:
    """BlockProductCopy list behind pack_any_path_power."""
    _check_params(l, t, n)
    v = two_adic_valuation(l)
    d = n - t * v
    if _trivial_core(l):
        point = HamOrderedBlock((), [()], ())
        copies = [BlockProductCopy(cube(d), u, (point,) * t) for u in cube(d).vertices()]
    else:
        copies = _odd_copies(l >> v, t, d)
    for _ in range(v):
        host = cube(d + t)
        copies = [
            BlockProductCopy(
                host,
                c.anchor + (0,) * t,
                tuple(b.splice(d + j) for j, b in enumerate(c.blocks)),
            )
            for c in copies
        ]
        d += t
    return copies


def pack_any_path_power(l: int, t: int, n: int) -> PackingCertificate:
    """Subgraph copies of (P_l)^t in Q_n for any l; every block carries a Hamilton order."""
    copies = any_path_power_copies(l, t, n)
    v = two_adic_valuation(l)
    params = odd_params(l >> v, t, n - t * v)
    params.update(l=l, n=n, v=v)
    return PackingCertificate.build(cube(n), [c.to_placement() for c in copies], params)
