"""Independent checks for certificates, covers, and the lower-bound argument.

Nothing here trusts the constructors: every report is recomputed from the
placements alone.
"""

from __future__ import annotations

import enum
import itertools
import json
import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from .certificate import MultisetCover, PackingCertificate
from .errors import ClassificationFailure, PlacementError
from .grid import Placement, format_vertex, parse_vertex, validate_many, validate_placement
from .hampath import block_product_from_placement

MAX_LISTED = 50


@dataclass
class AuditReport:
    valid: bool
    mode_verified: list
    uncovered: list
    coverage_histogram: dict
    failures: list
    bad_vertices: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["uncovered"] = [format_vertex(v) for v in self.uncovered]
        d["bad_vertices"] = [format_vertex(v) for v in self.bad_vertices]
        d["coverage_histogram"] = {str(k): v for k, v in sorted(self.coverage_histogram.items())}
        d["failures"] = [list(f) for f in self.failures]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "AuditReport":
        d = json.loads(text)
        return cls(
            valid=d["valid"],
            mode_verified=d["mode_verified"],
            uncovered=[parse_vertex(v) for v in d["uncovered"]],
            coverage_histogram={int(k): v for k, v in d["coverage_histogram"].items()},
            failures=[tuple(f) for f in d["failures"]],
            bad_vertices=[parse_vertex(v) for v in d["bad_vertices"]],
            extra=d["extra"],
        )


def _check_placements(placements, host, failures) -> list:
    modes = [None] * len(placements)
    ok = []
    for idx, p in enumerate(placements):
        if p.host != host:
            failures.append((idx, f"placement host {p.host} differs from {host}"))
        else:
            ok.append(idx)
    reports = validate_many([placements[i] for i in ok])
    for idx, rep in zip(ok, reports):
        p = placements[idx]
        if isinstance(rep, str):
            failures.append((idx, rep))
            continue
        modes[idx] = rep.strongest
        if not rep.satisfies(p.mode):
            failures.append((idx, f"not a valid {p.mode} copy"))
        if p.blocks is not None:
            try:
                block_product_from_placement(p)
            except ValueError as exc:
                failures.append((idx, f"block structure: {exc}"))
    failures.sort(key=lambda f: f[0])
    return modes


def _coverage(host, placements, mults=None) -> np.ndarray:
    cov = np.zeros(host.size, dtype=np.int64)
    if not placements:
        return cov
    codes = np.fromiter(
        itertools.chain.from_iterable(p.codes for p in placements), dtype=np.int64
    )
    if mults is None:
        weights = None
    else:
        weights = np.repeat(np.asarray(mults, dtype=np.int64), [len(p.codes) for p in placements])
    if weights is None:
        cov += np.bincount(codes, minlength=host.size)
    else:
        np.add.at(cov, codes, weights)
    return cov


def verify_packing(cert: PackingCertificate) -> AuditReport:
    """Disjointness, per-placement mode validity, and the uncovered list."""
    host = cert.host
    failures = []
    modes = _check_placements(cert.placements, host, failures)
    cov = _coverage(host, [p for p, m in zip(cert.placements, modes) if p.host == host])
    over = np.flatnonzero(cov > 1)
    if over.size:
        owners = {}
        bad = set(over.tolist())
        for idx, p in enumerate(cert.placements):
            for c in p.codes:
                if c in bad:
                    owners.setdefault(c, []).append(idx)
        for c in over[:MAX_LISTED].tolist():
            ids = owners[c]
            failures.append(
                (ids[-1], f"disjointness: vertex {format_vertex(host.decode(c))} "
                          f"covered by placements {ids}")
            )
    uncovered = [host.decode(c) for c in np.flatnonzero(cov == 0).tolist()]
    if sorted(cert.uncovered) != uncovered:
        failures.append((None, "declared uncovered list differs from the complement of the copies"))
    values, counts = np.unique(cov, return_counts=True)
    return AuditReport(
        valid=not failures,
        mode_verified=modes,
        uncovered=uncovered,
        coverage_histogram=dict(zip(values.tolist(), counts.tolist())),
        failures=failures,
        bad_vertices=[host.decode(c) for c in over.tolist()],
    )


def verify_multiset(cover: MultisetCover) -> AuditReport:
    """Coverage with multiplicities must be the target residue at every vertex."""
    host = cover.host
    failures = []
    placements = [p for p, _ in cover.entries]
    mults = [m for _, m in cover.entries]
    for idx, m in enumerate(mults):
        if m < 1:
            failures.append((idx, f"multiplicity {m} < 1"))
    modes = _check_placements(placements, host, failures)
    ok = [i for i, p in enumerate(placements) if p.host == host]
    cov = _coverage(host, [placements[i] for i in ok], [mults[i] for i in ok])
    res = cov % cover.modulus
    bad = res != cover.residue % cover.modulus
    if cover.exact is not None:
        bad |= cov != cover.exact
    bad_codes = np.flatnonzero(bad).tolist()
    for c in bad_codes[:MAX_LISTED]:
        failures.append(
            (None, f"vertex {format_vertex(host.decode(c))} covered {int(cov[c])} times")
        )
    if len(bad_codes) > MAX_LISTED:
        failures.append((None, f"... {len(bad_codes) - MAX_LISTED} more bad vertices"))
    values, counts = np.unique(res, return_counts=True)
    return AuditReport(
        valid=not failures,
        mode_verified=modes,
        uncovered=[host.decode(c) for c in np.flatnonzero(cov == 0).tolist()],
        coverage_histogram=dict(zip(values.tolist(), counts.tolist())),
        failures=failures,
        bad_vertices=[host.decode(c) for c in bad_codes],
        extra={"coverage_min": int(cov.min()), "coverage_max": int(cov.max())},
    )


# ------------------------------------------------ codimension-1 intersections


class Codim1Class(enum.Enum):
    EMPTY = "EMPTY"
    P3_POW_KM1 = "P3_POW_KM1"
    P2_X_P3_POW_KM1 = "P2_X_P3_POW_KM1"
    P3_POW_K = "P3_POW_K"

    def label(self, k: int) -> str:
        """Name with k filled in, e.g. P2_X_P3_POW_0 for k = 1."""
        return {
            "EMPTY": "EMPTY",
            "P3_POW_KM1": f"P3_POW_{k - 1}",
            "P2_X_P3_POW_KM1": f"P2_X_P3_POW_{k - 1}",
            "P3_POW_K": f"P3_POW_{k}",
        }[self.value]


@lru_cache(maxsize=None)
def _grid3(k: int):
    """Base-3 digit tuples for indices 0..3^k-1 and the (P_3)^k edge set on indices."""
    coords = list(itertools.product(range(3), repeat=k))
    edges = frozenset(
        (a, b)
        for a in range(len(coords))
        for b in range(a + 1, len(coords))
        if sum(abs(x - y) for x, y in zip(coords[a], coords[b])) == 1
    )
    return coords, edges


def p3_power_order(copy: Placement) -> int:
    """k such that ``copy`` is a subgraph copy of (P_3)^k; raises ValueError otherwise.

    Pattern vertices must be listed in lexicographic order of their (P_3)^k
    grid coordinates.
    """
    size = len(copy.pattern)
    k = round(math.log(size, 3)) if size > 1 else 0
    if k < 1 or 3 ** k != size:
        raise ValueError(f"pattern has {size} vertices, not a power of 3")
    _, edges = _grid3(k)
    if copy.pattern.edge_set != edges:
        raise ValueError("pattern edges are not those of (P_3)^k in grid order")
    if not validate_placement(copy).subgraph:
        raise ValueError("placement is not a subgraph copy")
    return k


def classify_codim1_intersection(copy: Placement, i: int, b: int) -> Codim1Class:
    """Type of the intersection of a (P_3)^k copy with the halfspace x_i = b."""
    k = p3_power_order(copy)
    coords, _ = _grid3(k)
    inter = [idx for idx, v in enumerate(copy.image) if v[i] == b]
    size = len(inter)
    if size == 0:
        return Codim1Class.EMPTY
    if size == 3 ** k:
        return Codim1Class.P3_POW_K
    pts = {coords[idx] for idx in inter}
    for j in range(k):
        vals = {g[j] for g in pts}
        if {g for g in coords if g[j] in vals} != pts:
            continue
        if len(vals) == 1:
            return Codim1Class.P3_POW_KM1
        if vals in ({0, 1}, {1, 2}):
            return Codim1Class.P2_X_P3_POW_KM1
    raise ClassificationFailure(
        f"intersection with x_{i} = {b} ({size} vertices) matches none of the four types"
    )


# ------------------------------------------------------- separating families


@dataclass
class SeparatingReport:
    is_separating: bool
    witness_pair: Optional[tuple]
    size: int
    n: int
    k: int
    implied_bound: float
    meets_bound: bool

    def to_dict(self):
        d = asdict(self)
        if self.witness_pair is not None:
            d["witness_pair"] = [list(x) for x in self.witness_pair]
        return d


def separating_audit(uncovered, n: int, k: int = 1) -> SeparatingReport:
    """Do the uncovered vertices, read as subsets of [n], separate k-sets?

    For disjoint k-subsets I, J we need some set A with I contained in A and
    A disjoint from J. For k = 1 this is the usual separating family.
    Coordinates are 0-based.
    """
    if n < 2:
        raise ValueError("separating_audit needs n >= 2")
    masks = set()
    for v in uncovered:
        if len(v) != n:
            raise ValueError(f"vertex {v} is not in Q_{n}")
        masks.add(sum(1 << c for c in range(n) if v[c] == 1))
    masks = sorted(masks)
    witness = None
    subsets = list(itertools.combinations(range(n), k))
    for I in subsets:
        im = sum(1 << c for c in I)
        rel = [a for a in masks if a & im == im]
        for J in subsets:
            jm = sum(1 << c for c in J)
            if jm & im:
                continue
            if not any(a & jm == 0 for a in rel):
                witness = (I, J)
                break
        if witness:
            break
    size = len(uncovered)
    bound = k * math.log2(n)
    return SeparatingReport(
        is_separating=witness is None,
        witness_pair=witness,
        size=size,
        n=n,
        k=k,
        implied_bound=bound,
        meets_bound=size >= bound,
    )


@dataclass
class Codim2Report:
    valid: bool
    failures: list
    pairs_checked: int = 0
    intersections_checked: int = 0

    def to_dict(self):
        d = asdict(self)
        d["failures"] = [list(f) if isinstance(f, tuple) else f for f in self.failures]
        return d


def codim2_coverage_check(cert: PackingCertificate) -> Codim2Report:
    """Every subcube {x_i = 1, x_j = 0} keeps an uncovered vertex; copies meet
    every codimension-2 subcube in a multiple of 3 vertices."""
    base = verify_packing(cert)
    if not base.valid:
        return Codim2Report(False, [("verify_packing", f) for f in base.failures[:MAX_LISTED]])
    failures = []
    for idx, p in enumerate(cert.placements):
        try:
            if p3_power_order(p) < 3:
                failures.append((idx, "copy is (P_3)^k with k < 3"))
        except ValueError as exc:
            failures.append((idx, str(exc)))
    if failures:
        return Codim2Report(False, failures)
    n = cert.host.dim
    unc = np.array(cert.uncovered, dtype=np.int8).reshape(-1, n)
    pairs = 0
    for i, j in itertools.permutations(range(n), 2):
        pairs += 1
        if not np.any((unc[:, i] == 1) & (unc[:, j] == 0)):
            failures.append(((i, j), f"no uncovered vertex with x_{i}=1, x_{j}=0"))
    checked = 0
    for idx, p in enumerate(cert.placements):
        img = np.array(p.image, dtype=np.int8)
        for i, j in itertools.combinations(range(n), 2):
            for bi, bj in itertools.product((0, 1), repeat=2):
                checked += 1
                cnt = int(np.count_nonzero((img[:, i] == bi) & (img[:, j] == bj)))
                if cnt % 3:
                    failures.append(
                        (idx, f"meets subcube x_{i}={bi}, x_{j}={bj} in {cnt} vertices")
                    )
    return Codim2Report(not failures, failures, pairs, checked)
