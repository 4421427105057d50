"""Boxes (Cartesian products of paths), pattern graphs and placements.

A vertex is a plain tuple of ints. Internally vertices are also encoded as
mixed-radix integers with the first coordinate most significant, so integer
order agrees with lexicographic order of coordinate tuples.
"""

from __future__ import annotations

import itertools
import math
import sys
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import InvalidVertex, PlacementError

Vertex = tuple

MODES = ("subgraph", "induced", "isometric")


@dataclass(frozen=True)
class Box:
    """Product of paths P_{lengths[0]} x ... x P_{lengths[-1]}."""

    lengths: tuple

    def __post_init__(self):
        lengths = tuple(int(x) for x in self.lengths)
        if any(x < 1 for x in lengths):
            raise ValueError(f"factor lengths must be >= 1, got {lengths}")
        if math.prod(lengths) > sys.maxsize:
            raise OverflowError(f"box {lengths} has too many vertices to address")
        object.__setattr__(self, "lengths", lengths)

    @property
    def dim(self) -> int:
        return len(self.lengths)

    @cached_property
    def size(self) -> int:
        return math.prod(self.lengths)

    @cached_property
    def is_cube(self) -> bool:
        return all(x == 2 for x in self.lengths)

    @cached_property
    def strides(self) -> tuple:
        out = [1] * self.dim
        for i in range(self.dim - 2, -1, -1):
            out[i] = out[i + 1] * self.lengths[i + 1]
        return tuple(out)

    def check(self, v: Sequence[int]) -> Vertex:
        v = tuple(v)
        if len(v) != self.dim:
            raise InvalidVertex(f"vertex {v} has {len(v)} coordinates, box has {self.dim}")
        for x, n in zip(v, self.lengths):
            if not 0 <= x < n:
                raise InvalidVertex(f"vertex {v} out of range for box {self.lengths}")
        return v

    def contains(self, v: Sequence[int]) -> bool:
        return len(v) == self.dim and all(0 <= x < n for x, n in zip(v, self.lengths))

    def encode(self, v: Sequence[int]) -> int:
        return sum(x * s for x, s in zip(v, self.strides))

    def decode(self, code: int) -> Vertex:
        out = []
        for n in reversed(self.lengths):
            code, r = divmod(code, n)
            out.append(r)
        return tuple(reversed(out))

    def vertices(self) -> Iterator[Vertex]:
        """All vertices in lexicographic (= code) order."""
        return itertools.product(*(range(n) for n in self.lengths))

    def __str__(self):
        return ",".join(map(str, self.lengths))


def cube(n: int) -> Box:
    return Box((2,) * n)


def path_power(l: int, t: int) -> Box:
    return Box((l,) * t)


def adjacent(box: Box, u: Sequence[int], v: Sequence[int]) -> bool:
    u, v = box.check(u), box.check(v)
    diff = [abs(a - b) for a, b in zip(u, v) if a != b]
    return diff == [1]


def distance(box: Box, u: Sequence[int], v: Sequence[int]) -> int:
    u, v = box.check(u), box.check(v)
    return sum(abs(a - b) for a, b in zip(u, v))


def format_vertex(v: Sequence[int]) -> str:
    return ",".join(map(str, v))


def parse_vertex(text: str) -> Vertex:
    text = text.strip()
    if not text:
        raise InvalidVertex("empty vertex text")
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise InvalidVertex(f"bad vertex {text!r}") from exc


@dataclass(frozen=True)
class PatternGraph:
    """A finite graph given as a vertex subset of a box.

    With ``edges=None`` the graph is the induced subgraph of ``ambient`` on
    ``vertices``. Otherwise ``edges`` lists index pairs into ``vertices``.
    Distances are always measured in the ambient box.
    """

    ambient: Box
    vertices: tuple
    edges: Optional[frozenset] = None

    def __post_init__(self):
        verts = tuple(self.ambient.check(v) for v in self.vertices)
        if not verts:
            raise ValueError("pattern must be non-empty")
        if len(set(verts)) != len(verts):
            raise ValueError("pattern vertices must be distinct")
        object.__setattr__(self, "vertices", verts)
        if self.edges is not None:
            norm = set()
            for i, j in self.edges:
                if i == j or not (0 <= i < len(verts) and 0 <= j < len(verts)):
                    raise ValueError(f"bad explicit edge {(i, j)}")
                norm.add((min(i, j), max(i, j)))
            object.__setattr__(self, "edges", frozenset(norm))

    def __len__(self):
        return len(self.vertices)

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.ambient, self.vertices, self.edges))
            object.__setattr__(self, "_hash", h)
        return h

    @property
    def derived(self) -> bool:
        return self.edges is None

    @cached_property
    def codes(self) -> tuple:
        return tuple(self.ambient.encode(v) for v in self.vertices)

    @cached_property
    def distances(self) -> tuple:
        vs = self.vertices
        return tuple(
            tuple(sum(abs(a - b) for a, b in zip(u, v)) for v in vs) for u in vs
        )

    @cached_property
    def edge_set(self) -> frozenset:
        if self.edges is not None:
            return self.edges
        d = self.distances
        n = len(self.vertices)
        return frozenset((i, j) for i in range(n) for j in range(i + 1, n) if d[i][j] == 1)


def full_pattern(box: Box) -> PatternGraph:
    """The whole box as a pattern, vertices in lexicographic order."""
    return PatternGraph(box, tuple(box.vertices()))


def slice_pattern(pattern: PatternGraph, i: int, value: int) -> Optional[PatternGraph]:
    """Restrict ``pattern`` to coordinate ``i`` == ``value`` and drop that coordinate.

    Coordinates are 0-based. Returns None when the slice is empty.
    """
    amb = pattern.ambient
    if not 0 <= i < amb.dim:
        raise InvalidVertex(f"coordinate {i} out of range for box {amb.lengths}")
    keep = [k for k, v in enumerate(pattern.vertices) if v[i] == value]
    if not keep:
        return None
    box = Box(amb.lengths[:i] + amb.lengths[i + 1:])
    verts = tuple(pattern.vertices[k][:i] + pattern.vertices[k][i + 1:] for k in keep)
    edges = None
    if pattern.edges is not None:
        pos = {k: n for n, k in enumerate(keep)}
        edges = frozenset(
            (pos[a], pos[b]) for a, b in pattern.edges if a in pos and b in pos
        )
    return PatternGraph(box, verts, edges)


@dataclass(frozen=True)
class Placement:
    """One copy of ``pattern`` in ``host``.

    ``image[k]`` is the host vertex for ``pattern.vertices[k]``. ``blocks``
    optionally records, for product-of-paths copies, which host coordinates
    each path factor occupies.
    """

    pattern: PatternGraph
    host: Box
    image: tuple
    mode: str = "subgraph"
    blocks: Optional[tuple] = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise PlacementError(f"unknown mode {self.mode!r}")
        if len(self.image) != len(self.pattern.vertices):
            raise PlacementError(
                f"map has {len(self.image)} entries, pattern has {len(self.pattern.vertices)}"
            )
        try:
            image = tuple(self.host.check(v) for v in self.image)
        except InvalidVertex as exc:
            raise PlacementError(str(exc)) from exc
        object.__setattr__(self, "image", image)
        if self.blocks is not None:
            object.__setattr__(self, "blocks", tuple(tuple(b) for b in self.blocks))

    @classmethod
    def trusted(cls, pattern, host, image, mode="subgraph", blocks=None, codes=None) -> "Placement":
        """Build without re-checking coordinates; for constructors whose images are in range by design."""
        p = object.__new__(cls)
        for name, value in (("pattern", pattern), ("host", host), ("image", image),
                            ("mode", mode), ("blocks", blocks)):
            object.__setattr__(p, name, value)
        if codes is not None:
            p.__dict__["codes"] = codes
        return p

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.pattern, self.mode, self.blocks, self.codes))
            self.__dict__["_hash"] = h
        return h

    @cached_property
    def codes(self) -> tuple:
        enc = self.host.encode
        return tuple(enc(v) for v in self.image)

    @cached_property
    def key(self) -> tuple:
        """Canonical sort key: sorted image codes, then the aligned map."""
        return (tuple(sorted(self.codes)), self.codes)

    @property
    def vertex_set(self) -> frozenset:
        return frozenset(self.image)


@dataclass(frozen=True)
class ValidityReport:
    subgraph: bool
    induced: bool
    isometric: bool

    @property
    def strongest(self) -> Optional[str]:
        if not self.subgraph:
            return None
        if not self.induced:
            return "subgraph"
        return "isometric" if self.isometric else "induced"

    def satisfies(self, mode: str) -> bool:
        return getattr(self, mode)


# report by bit pattern sub*4 + induced*2 + isometric; -1 for a non-injective map
_REPORTS = {b: ValidityReport(bool(b & 4), bool(b & 2), bool(b & 1)) for b in range(8)}
_REPORTS[-1] = "placement map is not injective"


def validate_many(placements, chunk: int = 8192) -> list:
    """``validate_placement`` over many placements, vectorized per pattern.

    Entries are ValidityReport objects, or a string for a non-injective map.
    """
    out = [None] * len(placements)
    groups = {}
    for idx, p in enumerate(placements):
        groups.setdefault((id(p.pattern), p.host), []).append(idx)
    for (_, host), idxs in groups.items():
        pat = placements[idxs[0]].pattern
        v = len(pat.vertices)
        if v == 1:
            for i in idxs:
                out[i] = ValidityReport(True, True, True)
            continue
        strides = np.array(host.strides, dtype=np.int64)
        lengths = np.array(host.lengths, dtype=np.int64)
        iu, ju = np.triu_indices(v, 1)
        pd = np.array(pat.distances)[iu, ju]
        is_edge = np.array([(a, b) in pat.edge_set for a, b in zip(iu.tolist(), ju.tolist())])
        for start in range(0, len(idxs), chunk):
            part = idxs[start:start + chunk]
            codes = np.array([placements[i].codes for i in part], dtype=np.int64)
            img = (codes[:, :, None] // strides) % lengths
            d = np.abs(img[:, iu, :] - img[:, ju, :]).sum(axis=2)
            inj = (d > 0).all(axis=1)
            iso = (d == pd).all(axis=1)
            sub = (d[:, is_edge] == 1).all(axis=1)
            ind = sub & ~(d[:, ~is_edge] == 1).any(axis=1)
            kind = np.where(inj, sub * 4 + ind * 2 + iso, -1).tolist()
            for k, i in zip(kind, part):
                out[i] = _REPORTS[k]
    return out


def validate_placement(p: Placement) -> ValidityReport:
    """Check which of the three placement modes ``p`` satisfies.

    Raises PlacementError when the map is not injective.
    """
    codes = p.codes
    if len(set(codes)) != len(codes):
        raise PlacementError("placement map is not injective")
    n = len(codes)
    pd = p.pattern.distances
    edges = p.pattern.edge_set
    if p.host.is_cube:
        def hd(i, j):
            return (codes[i] ^ codes[j]).bit_count()
    else:
        img = p.image

        def hd(i, j):
            return sum(abs(a - b) for a, b in zip(img[i], img[j]))

    sub = ind = iso = True
    for i in range(n):
        row = pd[i]
        for j in range(i + 1, n):
            d = hd(i, j)
            if d != row[j]:
                iso = False
            if (i, j) in edges:
                if d != 1:
                    sub = ind = False
            elif d == 1:
                ind = False
        if not (sub or iso):
            break
    return ValidityReport(sub, ind and sub, iso)


def _axis_maps(pattern: PatternGraph, host: Box) -> Iterator[tuple]:
    """Encoded maps for every coordinate injection + offset + reflection."""
    pl = pattern.ambient.lengths
    hl = host.lengths
    strides = host.strides
    k, n = len(pl), len(hl)
    pverts = pattern.vertices
    for sigma in itertools.permutations(range(n), k):
        if any(pl[i] > hl[s] for i, s in enumerate(sigma)):
            continue
        options = []
        for i, s in enumerate(sigma):
            opts = []
            for off in range(hl[s] - pl[i] + 1):
                opts.append(tuple(strides[s] * (off + x) for x in range(pl[i])))
                if pl[i] > 1:
                    opts.append(tuple(strides[s] * (off + pl[i] - 1 - x) for x in range(pl[i])))
            options.append(opts)
        unused = [c for c in range(n) if c not in sigma]
        bases = [
            sum(strides[c] * x for c, x in zip(unused, vals))
            for vals in itertools.product(*(range(hl[c]) for c in unused))
        ]
        for tables in itertools.product(*options):
            partial = [sum(t[x] for t, x in zip(tables, v)) for v in pverts]
            for base in bases:
                yield tuple(x + base for x in partial)


def enumerate_placements(
    pattern: PatternGraph, host: Box, mode: str = "subgraph", *, distinct_images: bool = False
) -> Iterator[Placement]:
    """Yield every axis-generated placement of ``pattern`` in ``host`` valid in ``mode``.

    Candidates come from injecting pattern coordinates into host coordinates
    with a translation and optional reflection per factor. Output is sorted by
    the canonical key. With ``distinct_images`` only the first placement per
    image vertex set is kept (the one with the least map).
    """
    if mode not in MODES:
        raise PlacementError(f"unknown mode {mode!r}")
    if pattern.ambient.dim > host.dim:
        return iter(())
    if distinct_images:
        best = {}
        for codes in _axis_maps(pattern, host):
            img = frozenset(codes)
            cur = best.get(img)
            if cur is None or codes < cur:
                best[img] = codes
        maps = list(best.values())
    else:
        maps = list(set(_axis_maps(pattern, host)))
    maps.sort(key=lambda c: (tuple(sorted(c)), c))
    decode = host.decode

    def gen():
        for codes in maps:
            p = Placement(pattern, host, tuple(decode(c) for c in codes), mode)
            # axis maps are isometries of the ambient box, so only explicit
            # edge lists can fail
            if pattern.derived or validate_placement(p).satisfies(mode):
                yield p

    return gen()
