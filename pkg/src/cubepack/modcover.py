"""Multiset covers of (P_{2l})^k by copies of an induced subgraph H of Q_k.

``shift_l_partition`` and ``lift_to_path_power`` give covers where every
vertex is hit exactly |H| times. ``one_mod_l_partition`` builds a cover with
every vertex hit 1 (mod |H|) times, by induction on k:

Split H along its last coordinate into H_- (last bit 0) and H_+ (last bit 1).
Take a (1 mod l) cover of (P_{2l})^{k-1} by copies of H_- and extend each
isometry by sending the last bit to layers (p, p+1) (family X_p) or to
(p, p-1) (family Y_p). Both families cover layer p once (mod l) and put the
same function G on the neighbouring layer. Choosing multiplicities alpha_p
for X_p and beta_p for Y_p with

    alpha_q + beta_q = 1          (layer q, own part)
    alpha_{q-1} + beta_{q+1} = 0  (layer q, G part)

makes the total 1 (mod l) everywhere, whatever G is. That small system is
solved mod l rather than written down by hand.
"""

from __future__ import annotations

import itertools
from typing import Optional

import numpy as np

from .certificate import MultisetCover
from .errors import BudgetExceeded, ParameterError, SizingError
from .grid import Box, Placement, PatternGraph, cube, enumerate_placements, path_power
from .modlinalg import DEFAULT_MAX_CELLS, solve_mod


def _require_cube_pattern(H: PatternGraph) -> int:
    if not H.ambient.is_cube:
        raise ParameterError(f"pattern must live in a hypercube, ambient is {H.ambient.lengths}")
    return H.ambient.dim


def shift_l_partition(H: PatternGraph, n: int) -> MultisetCover:
    """All 2^n shifts X + u of H x {0}^(n-k) in Q_n; each vertex covered exactly |H| times."""
    k = _require_cube_pattern(H)
    if n < k:
        raise SizingError(f"n={n} is smaller than the pattern dimension {k}", minimum=k)
    host = cube(n)
    pad = (0,) * (n - k)
    base = [v + pad for v in H.vertices]
    entries = []
    for u in host.vertices():
        image = tuple(tuple(a ^ b for a, b in zip(x, u)) for x in base)
        entries.append((Placement.trusted(H, host, image, "induced"), 1))
    l = len(H)
    return MultisetCover.build(host, entries, l, 0, exact=l, params={"n": n, "k": k})


def lift_to_path_power(cover: MultisetCover, l: int) -> MultisetCover:
    """Copy a cover of Q_n into each of the l^n sub-cubes of (P_{2l})^n."""
    if not cover.host.is_cube:
        raise ParameterError(f"cover host must be a hypercube, got {cover.host.lengths}")
    if l < 1:
        raise ParameterError("l must be >= 1")
    n = cover.host.dim
    host = path_power(2 * l, n)
    strides = np.array(host.strides, dtype=np.int64)
    offsets = np.array(list(itertools.product(range(0, 2 * l, 2), repeat=n)), dtype=np.int64)
    entries = []
    for p, mult in cover.entries:
        base = np.array(p.image, dtype=np.int64)
        images = base[None, :, :] + offsets[:, None, :]
        codes = (images @ strides).tolist()
        for image, cs in zip(images.tolist(), codes):
            image = tuple(map(tuple, image))
            entries.append((Placement.trusted(p.pattern, host, image, p.mode, codes=tuple(cs)), mult))
    params = dict(cover.params, l=l)
    return MultisetCover.build(host, entries, cover.modulus, cover.residue, cover.exact, params)


# ---------------------------------------------------------- (1 mod l) covers


def telescoping_weights(l: int) -> tuple:
    """Multiplicities (alpha, beta) for the X_p and Y_p families on 2l layers.

    alpha[p] is defined for p in 0..2l-2 and beta[p] for p in 1..2l-1; the
    other entries are 0. Returns None when no solution exists mod l.
    """
    L = 2 * l
    na = L - 1
    # unknowns: alpha_0..alpha_{L-2}, then beta_1..beta_{L-1}
    def ai(p):
        return p if 0 <= p <= L - 2 else None

    def bi(p):
        return na + p - 1 if 1 <= p <= L - 1 else None

    rows, rhs = [], []
    for q in range(L):
        own = [0] * (2 * na)
        for idx in (ai(q), bi(q)):
            if idx is not None:
                own[idx] = 1
        rows.append(own)
        rhs.append(1)
        spill = [0] * (2 * na)
        for idx in (ai(q - 1), bi(q + 1)):
            if idx is not None:
                spill[idx] = 1
        rows.append(spill)
        rhs.append(0)
    x = solve_mod(rows, rhs, l)
    if x is None:
        return None
    alpha = [int(x[p]) for p in range(na)] + [0]
    beta = [0] + [int(x[na + p - 1]) for p in range(1, L)]
    return alpha, beta


def _neighbour(x: int, L: int) -> int:
    return x + 1 if x + 1 < L else x - 1


def _isometry_cover(H: frozenset, k: int, l: int, weights) -> dict:
    """{isometry: multiplicity mod l}; an isometry is a tuple of (image of 0, image of 1) per coordinate."""
    L = 2 * l
    if k == 1:
        if H == {(0,), (1,)}:
            return {((2 * j, 2 * j + 1),): 1 for j in range(l)}
        (c,), = H
        out = {}
        for x in range(L):
            pair = (x, _neighbour(x, L)) if c == 0 else (_neighbour(x, L), x)
            out[(pair,)] = 1
        return out
    lower = frozenset(u[:-1] for u in H if u[-1] == 0)
    upper = frozenset(u[:-1] for u in H if u[-1] == 1)
    out = {}

    def add(iso, mult):
        # modulus 1: keep every copy once
        out[iso] = 1 if l == 1 else (out.get(iso, 0) + mult) % l

    if not upper or not lower:
        bit = 0 if upper == frozenset() else 1
        sub = _isometry_cover(lower or upper, k - 1, l, weights)
        for q in range(L):
            pair = (q, _neighbour(q, L)) if bit == 0 else (_neighbour(q, L), q)
            for iso, m in sub.items():
                add(iso + (pair,), m)
        return {iso: m for iso, m in out.items() if m}
    alpha, beta = weights
    sub = _isometry_cover(lower, k - 1, l, weights)
    for p in range(L):
        for coef, pair in ((alpha[p], (p, p + 1)), (beta[p], (p, p - 1))):
            if coef % l == 0:
                continue
            for iso, m in sub.items():
                add(iso + (pair,), coef * m)
    return {iso: m for iso, m in out.items() if m}


def one_mod_l_partition(H: PatternGraph, *, max_cells: int = DEFAULT_MAX_CELLS) -> MultisetCover:
    """Isometric copies of H in (P_{2l})^k, l = |H|, covering every vertex 1 (mod l) times."""
    k = _require_cube_pattern(H)
    l = len(H)
    host = path_power(2 * l, k)
    weights = telescoping_weights(l)
    if weights is not None:
        isos = _isometry_cover(frozenset(H.vertices), k, l, weights)
        entries = [
            (Placement(H, host, tuple(tuple(iso[i][x] for i, x in enumerate(v)) for v in H.vertices),
                       "isometric"), m)
            for iso, m in isos.items()
        ]
        cover = MultisetCover.build(host, entries, l, 1, params={"k": k, "l": l})
        if _residues_ok(cover):
            return cover
    generators = list(enumerate_placements(H, host, "isometric"))
    cover = congruence_cover_solve(host, generators, l, 1, max_cells=max_cells)
    if cover is None:
        raise ParameterError("no (1 mod l) cover exists among isometric copies")
    cover.params.update(k=k, l=l, fallback=1)
    return cover


def _residues_ok(cover: MultisetCover) -> bool:
    cov = np.zeros(cover.host.size, dtype=np.int64)
    for p, m in cover.entries:
        cov[list(p.codes)] += m
    return bool(np.all(cov % cover.modulus == cover.residue))


# ---------------------------------------------------------- general solver


def _box_symmetries(host: Box, limit: int = 4096, *, flips: bool = True, swaps: bool = True):
    """Code permutations for coordinate reflections and swaps of equal factors.

    ``flips`` and ``swaps`` select the subgroup. Returns None when the group
    is larger than ``limit``.
    """
    dims = host.dim
    classes = {}
    for c, n in enumerate(host.lengths):
        classes.setdefault(n, []).append(c)
    count = 2 ** dims if flips else 1
    if swaps:
        for cs in classes.values():
            for i in range(2, len(cs) + 1):
                count *= i
    if count > limit:
        return None
    coords = np.array(list(host.vertices()), dtype=np.int64)
    lengths = np.array(host.lengths)
    strides = np.array(host.strides)
    perms = []
    class_perms = [
        list(itertools.permutations(cs)) if swaps else [tuple(cs)] for cs in classes.values()
    ]
    flip_choices = list(itertools.product((False, True), repeat=dims)) if flips else [(False,) * dims]
    for choice in itertools.product(*class_perms):
        sigma = list(range(dims))
        for cs, img in zip(classes.values(), choice):
            for a, b in zip(cs, img):
                sigma[a] = b
        for f in flip_choices:
            # new coordinate a takes old coordinate sigma[a], maybe reflected
            moved = coords[:, sigma]
            moved = np.where(np.array(f), lengths[sigma] - 1 - moved, moved)
            perms.append(moved @ strides)
    return perms


def _canonical_classes(codes: np.ndarray, syms) -> np.ndarray:
    """Class index of each row of ``codes`` (sorted code sets) under ``syms``."""
    best = np.sort(syms[0][codes], axis=1)
    for perm in syms[1:]:
        cand = np.sort(perm[codes], axis=1)
        # lexicographic comparison, row by row
        diff = cand != best
        first = np.argmax(diff, axis=1)
        rows = np.arange(len(codes))
        less = diff.any(axis=1) & (cand[rows, first] < best[rows, first])
        best[less] = cand[less]
    _, cls = np.unique(best, axis=0, return_inverse=True)
    return cls.reshape(-1)


def _symmetric_solve(host, codes, syms, l, r, max_cells):
    """Solution constant on generator orbits, or None."""
    cls = _canonical_classes(codes, syms)
    pick = np.unique(syms.min(axis=0))  # least image of each vertex labels its orbit
    ncls = int(cls.max()) + 1
    if len(pick) * ncls > max_cells:
        return None
    # one equation per vertex orbit
    M = np.zeros((len(pick), ncls), dtype=np.int64)
    row = np.full(host.size, -1, dtype=np.int64)
    row[pick] = np.arange(len(pick))
    flat = codes.reshape(-1)
    owner = np.repeat(cls, codes.shape[1])
    hit = row[flat] >= 0
    np.add.at(M, (row[flat[hit]], owner[hit]), 1)
    y = solve_mod(M, np.full(len(pick), r % l, dtype=np.int64), l, max_cells)
    if y is None:
        return None
    x = y[cls] % l
    # the generator set need not be closed under the symmetries
    cov = np.zeros(host.size, dtype=np.int64)
    np.add.at(cov, flat, np.repeat(x, codes.shape[1]))
    if np.any((cov - r) % l):
        return None
    return x


def congruence_cover_solve(
    host: Box, generators, l: int, r: int, *, max_cells: int = DEFAULT_MAX_CELLS
) -> Optional[MultisetCover]:
    """Multiplicities in [0, l) for ``generators`` giving coverage r (mod l) everywhere.

    Returns None when no integer combination of these generators works
    (an exact answer for this generator set). Raises BudgetExceeded when the
    incidence system is too large.

    Symmetric solutions are tried first: multiplicities constant on orbits of
    the box symmetries only need one equation per vertex orbit.
    """
    if l < 1:
        raise ParameterError("l must be >= 1")
    generators = list(generators)
    for g in generators:
        if g.host != host:
            raise ParameterError("generator host differs from the target host")
    # identical columns are interchangeable
    by_image = {}
    for g in generators:
        by_image.setdefault(tuple(sorted(g.codes)), g)
    cols = list(by_image.values())
    if not cols:
        return MultisetCover.build(host, [], l, r) if r % l == 0 else None
    sizes = {len(g.codes) for g in cols}
    x = None
    if len(cols) > 1 and len(sizes) == 1:
        codes = np.array(list(by_image.keys()), dtype=np.int64)
        for flips, swaps in ((True, True), (True, False), (False, True)):
            syms = _box_symmetries(host, flips=flips, swaps=swaps)
            if syms is None or len(syms) == 1:
                continue
            x = _symmetric_solve(host, codes, np.array(syms), l, r, max_cells)
            if x is not None:
                break
    if x is None:
        if host.size * len(cols) > max_cells:
            raise BudgetExceeded(f"{host.size}x{len(cols)} incidence system exceeds {max_cells} cells")
        A = np.zeros((host.size, len(cols)), dtype=np.int64)
        for j, g in enumerate(cols):
            A[list(g.codes), j] = 1
        x = solve_mod(A, np.full(host.size, r % l, dtype=np.int64), l, max_cells)
    if x is None:
        return None
    entries = [(g, int(m)) for g, m in zip(cols, x) if m % l]
    return MultisetCover.build(host, entries, l, r)
