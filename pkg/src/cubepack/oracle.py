"""Brute-force ground truth for small hosts.

* ``enumerate_embeddings``: every injective map of a pattern into a host
  that respects the mode (not only the axis-generated ones).
* ``exact_cover_search``: Algorithm X over the vertex incidence of the
  candidate images, minimum-remaining-candidates column first.
* ``consecutive_induced_hamilton``: Hamilton paths of Q_n in which every
  window of l consecutive vertices induces a path.
"""

from __future__ import annotations

import itertools
import os
import random
import time
from dataclasses import dataclass, field
from typing import Optional

from .certificate import PackingCertificate
from .errors import ParameterError
from .grid import MODES, Box, Placement, PatternGraph, cube, enumerate_placements
from .hampath import gray_cycle

SAT = "SAT"
UNSAT = "UNSAT"
BUDGET_EXCEEDED = "BUDGET_EXCEEDED"

BUDGET_ENV = "CUBEPACK_BUDGET"
FALLBACK_BUDGET = 10 ** 7


def default_budget() -> int:
    """Node budget from the environment, or a fixed default."""
    raw = os.environ.get(BUDGET_ENV)
    if raw is None:
        return FALLBACK_BUDGET
    try:
        value = int(raw)
    except ValueError:
        raise ParameterError(f"{BUDGET_ENV} must be an integer, got {raw!r}")
    if value < 1:
        raise ParameterError(f"{BUDGET_ENV} must be positive")
    return value


@dataclass
class SearchResult:
    status: str
    nodes: int
    elapsed: float
    certificate: Optional[PackingCertificate] = None
    path: Optional[list] = None
    notes: dict = field(default_factory=dict)

    @property
    def sat(self) -> bool:
        return self.status == SAT


class _OutOfBudget(Exception):
    pass


class _Counter:
    def __init__(self, budget, time_limit):
        self.nodes = 0
        self.budget = budget
        self.deadline = None if time_limit is None else time.monotonic() + time_limit

    def tick(self):
        self.nodes += 1
        if self.nodes > self.budget:
            raise _OutOfBudget
        if self.deadline is not None and self.nodes % 4096 == 0 and time.monotonic() > self.deadline:
            raise _OutOfBudget


# ------------------------------------------------------------- embeddings


def _host_neighbours(host: Box) -> list:
    out = []
    for c in range(host.size):
        v = host.decode(c)
        nb = []
        for i, (x, n) in enumerate(zip(v, host.lengths)):
            if x > 0:
                nb.append(c - host.strides[i])
            if x + 1 < n:
                nb.append(c + host.strides[i])
        out.append(sorted(nb))
    return out


def _search_order(pattern: PatternGraph) -> list:
    """Pattern indices in BFS order, so later vertices usually have an earlier neighbour."""
    adj = {i: set() for i in range(len(pattern))}
    for i, j in pattern.edge_set:
        adj[i].add(j)
        adj[j].add(i)
    order, seen = [], set()
    for root in range(len(pattern)):
        if root in seen:
            continue
        seen.add(root)
        queue = [root]
        while queue:
            u = queue.pop(0)
            order.append(u)
            for w in sorted(adj[u]):
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
    return order


def enumerate_embeddings(
    pattern: PatternGraph, host: Box, mode: str = "subgraph", *, limit: Optional[int] = None
) -> list:
    """All injective maps of ``pattern`` into ``host`` valid in ``mode``, canonically sorted.

    Raises ParameterError when more than ``limit`` maps exist.
    """
    if mode not in MODES:
        raise ParameterError(f"unknown mode {mode!r}")
    k = len(pattern)
    if k > host.size:
        return []
    nbrs = _host_neighbours(host)
    nbr_sets = [set(x) for x in nbrs]
    coords = [host.decode(c) for c in range(host.size)]
    pd = pattern.distances
    edges = pattern.edge_set
    order = _search_order(pattern)
    pos = {u: i for i, u in enumerate(order)}
    # for each step: an earlier neighbour to extend from, plus the constraints
    anchor, checks = [], []
    for i, u in enumerate(order):
        earlier = order[:i]
        nb = [w for w in earlier if (min(u, w), max(u, w)) in edges]
        anchor.append(min(nb, key=pos.get) if nb else None)
        checks.append([(w, (min(u, w), max(u, w)) in edges) for w in earlier])

    def dist(a, b):
        return sum(abs(x - y) for x, y in zip(coords[a], coords[b]))

    out = []
    img = [None] * k
    used = set()

    def ok(u, c, step):
        for w, is_edge in checks[step]:
            cw = img[w]
            if is_edge:
                if cw not in nbr_sets[c]:
                    return False
            elif mode != "subgraph" and cw in nbr_sets[c]:
                return False
            if mode == "isometric" and dist(c, cw) != pd[min(u, w)][max(u, w)]:
                return False
        return True

    def extend(step):
        if step == k:
            out.append(tuple(img))
            if limit is not None and len(out) > limit:
                raise ParameterError(f"more than {limit} embeddings")
            return
        u = order[step]
        a = anchor[step]
        cands = nbrs[img[a]] if a is not None else range(host.size)
        for c in cands:
            if c in used or not ok(u, c, step):
                continue
            img[u] = c
            used.add(c)
            extend(step + 1)
            used.discard(c)
        img[u] = None

    extend(0)
    out.sort(key=lambda m: (tuple(sorted(m)), m))
    return [Placement.trusted(pattern, host, tuple(coords[c] for c in m), mode, codes=m) for m in out]


# ------------------------------------------------------------- exact cover


def _stabilizer_of_origin(host: Box, limit: int = 50_000):
    """Code permutations from swapping coordinates of equal length (they fix vertex 0)."""
    classes = {}
    for c, n in enumerate(host.lengths):
        classes.setdefault(n, []).append(c)
    count = 1
    for cs in classes.values():
        for i in range(2, len(cs) + 1):
            count *= i
    if count > limit:
        return None
    perms = []
    verts = [host.decode(c) for c in range(host.size)]
    for choice in itertools.product(*(itertools.permutations(cs) for cs in classes.values())):
        sigma = list(range(host.dim))
        for cs, img in zip(classes.values(), choice):
            for a, b in zip(cs, img):
                sigma[a] = b
        if sigma == list(range(host.dim)):
            continue
        perms.append([host.encode(tuple(v[s] for s in sigma)) for v in verts])
    return perms


def _root_representatives(rows: list, root_rows: list, perms) -> list:
    """One row per orbit of the candidates covering vertex 0, or all if the rows are not closed."""
    if not perms:
        return root_rows
    images = {frozenset(r) for r in rows}
    reps = []
    for idx in root_rows:
        own = tuple(sorted(rows[idx]))
        best = own
        for perm in perms:
            moved = frozenset(perm[c] for c in rows[idx])
            if moved not in images:
                return root_rows
            best = min(best, tuple(sorted(moved)))
        if best == own:
            reps.append(idx)
    return reps


def exact_cover_search(
    host: Box,
    pattern: PatternGraph,
    mode: str = "subgraph",
    budget: Optional[int] = None,
    *,
    seed: int = 0,
    time_limit: Optional[float] = None,
    placements=None,
    symmetry: bool = True,
) -> SearchResult:
    """Search for a perfect packing of ``host`` by copies of ``pattern``.

    Candidates default to all embeddings valid in ``mode``; pass
    ``placements`` to restrict them. UNSAT answers are exhaustive for the
    candidate set. Seed 0 keeps the canonical candidate order, other seeds
    shuffle it reproducibly.
    """
    start = time.monotonic()
    budget = default_budget() if budget is None else budget
    if host.size % len(pattern):
        return SearchResult(UNSAT, 0, 0.0, notes={"reason": "divisibility"})
    if placements is None:
        placements = enumerate_embeddings(pattern, host, mode)
    # one representative map per image
    by_image = {}
    for p in placements:
        by_image.setdefault(frozenset(p.codes), p)
    reps = list(by_image.values())
    rows = [p.codes for p in reps]
    rank = list(range(len(rows)))
    if seed:
        random.Random(seed).shuffle(rank)
    cols = {c: set() for c in range(host.size)}
    for r, codes in enumerate(rows):
        for c in codes:
            cols[c].add(r)

    counter = _Counter(budget, time_limit)
    solution = []

    def select(r):
        removed = []
        for c in rows[r]:
            for other in cols[c]:
                for c2 in rows[other]:
                    if c2 != c:
                        cols[c2].discard(other)
            removed.append(cols.pop(c))
        return removed

    def deselect(r, removed):
        for c in reversed(rows[r]):
            cols[c] = removed.pop()
            for other in cols[c]:
                for c2 in rows[other]:
                    if c2 != c:
                        cols[c2].add(other)

    def solve(candidates=None):
        if not cols:
            return True
        if candidates is None:
            c = min(cols, key=lambda x: (len(cols[x]), x))
            candidates = cols[c]
        for r in sorted(candidates, key=rank.__getitem__):
            counter.tick()
            solution.append(r)
            removed = select(r)
            if solve():
                return True
            deselect(r, removed)
            solution.pop()
        return False

    root = sorted(cols[0])
    notes = {"candidates": len(rows)}
    if symmetry:
        root = _root_representatives(rows, root, _stabilizer_of_origin(host))
        notes["root_orbits"] = len(root)
    try:
        found = solve(root)
    except _OutOfBudget:
        return SearchResult(BUDGET_EXCEEDED, counter.nodes, time.monotonic() - start, notes=notes)
    elapsed = time.monotonic() - start
    if not found:
        return SearchResult(UNSAT, counter.nodes, elapsed, notes=notes)
    chosen = [reps[r] for r in solution]
    cert = PackingCertificate.build(host, chosen, {"seed": seed})
    return SearchResult(SAT, counter.nodes, elapsed, certificate=cert, notes=notes)


def greedy_packing(host: Box, placements, *, seed: int = 0, params=None) -> PackingCertificate:
    """Take placements in canonical (or seeded) order whenever they fit."""
    order = list(placements)
    if seed:
        random.Random(seed).shuffle(order)
    used = bytearray(host.size)
    chosen = []
    for p in order:
        if any(used[c] for c in p.codes):
            continue
        for c in p.codes:
            used[c] = 1
        chosen.append(p)
    return PackingCertificate.build(host, chosen, dict(params or {}, seed=seed))


def p3_power_pattern(k: int) -> PatternGraph:
    """(P_3)^k as the product of corner paths {00, 01, 11} inside Q_2k, in grid order."""
    if k < 1:
        raise ParameterError("k must be >= 1")
    corner = ((0, 0), (0, 1), (1, 1))
    verts = tuple(sum((corner[d] for d in digits), ()) for digits in itertools.product(range(3), repeat=k))
    return PatternGraph(cube(2 * k), verts)


def greedy_p3_power_packing(k: int, n: int, *, seed: int = 0) -> PackingCertificate:
    """Greedy packing of Q_n by axis-generated (P_3)^k copies."""
    pattern = p3_power_pattern(k)
    host = cube(n)
    cands = enumerate_placements(pattern, host, "subgraph", distinct_images=True)
    return greedy_packing(host, cands, seed=seed, params={"k": k, "n": n})


# ------------------------------------------------------------- Hamilton paths


def window_induced_ok(path, l: int) -> bool:
    """Consecutive vertices adjacent, all distinct, every l-window an induced path."""
    codes = [_bits(v) for v in path]
    if len(set(codes)) != len(codes):
        return False
    for i in range(1, len(codes)):
        if (codes[i] ^ codes[i - 1]).bit_count() != 1:
            return False
    for i in range(len(codes)):
        for j in range(max(0, i - l + 1), i - 1):
            if (codes[i] ^ codes[j]).bit_count() == 1:
                return False
    return True


def _bits(v) -> int:
    out = 0
    for x in v:
        out = (out << 1) | x
    return out


def consecutive_induced_hamilton(
    n: int, l: int, budget: Optional[int] = None, *, time_limit: Optional[float] = None
) -> SearchResult:
    """Hamilton path of Q_n whose every l consecutive vertices induce P_l.

    Depth-first with a bitmask of visited vertices. The start is fixed at 0
    and each step that flips a not-yet-used coordinate uses the least such
    coordinate; both are symmetries of Q_n, so UNSAT stays exhaustive.
    """
    if n < 1 or l < 2:
        raise ParameterError(f"need n >= 1 and l >= 2, got n={n}, l={l}")
    start = time.monotonic()
    budget = default_budget() if budget is None else budget
    size = 1 << n
    if l <= 3 or l > size:
        # three distinct vertices of a walk u, v, w have d(u, w) = 2; longer
        # windows than the path impose nothing
        path = gray_cycle(n)
        return SearchResult(SAT, 0, time.monotonic() - start, path=path, notes={"fast_path": True})
    counter = _Counter(budget, time_limit)
    seq = [0]
    visited = 1

    def dfs(used_coords):
        nonlocal visited
        if len(seq) == size:
            return True
        cur = seq[-1]
        fresh_done = False
        for b in range(n):
            bit = 1 << (n - 1 - b)
            fresh = not used_coords & bit
            if fresh:
                if fresh_done:
                    continue
                fresh_done = True
            nxt = cur ^ bit
            if visited >> nxt & 1:
                continue
            p = len(seq)
            if any((nxt ^ seq[j]).bit_count() == 1 for j in range(max(0, p - l + 1), p - 1)):
                continue
            counter.tick()
            seq.append(nxt)
            visited |= 1 << nxt
            if dfs(used_coords | bit):
                return True
            visited &= ~(1 << nxt)
            seq.pop()
        return False

    try:
        found = dfs(0)
    except _OutOfBudget:
        return SearchResult(BUDGET_EXCEEDED, counter.nodes, time.monotonic() - start)
    elapsed = time.monotonic() - start
    if not found:
        return SearchResult(UNSAT, counter.nodes, elapsed)
    path = [tuple((c >> (n - 1 - b)) & 1 for b in range(n)) for c in seq]
    return SearchResult(SAT, counter.nodes, elapsed, path=path)
