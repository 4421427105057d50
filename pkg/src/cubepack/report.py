"""Uncovered-vs-n tables, the Hamilton sweep, and the two-step composition.

Every table is a list of dict rows; ``write_csv`` renders them.
"""

from __future__ import annotations

import csv
import io
import math

from .audit import verify_packing
from .certificate import PackingCertificate
from .errors import ParameterError
from .grid import Placement, PatternGraph, path_power
from .hampath import (
    pack_any_path_power, pack_odd_path_power, uncovered_bound,
)
from .induced import induced_constant, induced_parameters, induced_path_power_packing
from .oracle import SAT, consecutive_induced_hamilton, exact_cover_search

UNCOVERED_COLUMNS = ("n", "uncovered", "bound_expr_value", "log2n_floor")
HAMILTON_COLUMNS = ("n", "l", "status", "nodes")


def parse_range(text: str) -> list:
    """``"4..8"`` -> [4, 5, 6, 7, 8]; a single integer is a one-element range."""
    try:
        if ".." in text:
            lo, hi = (int(x) for x in text.split("..", 1))
        else:
            lo = hi = int(text)
    except ValueError:
        raise ParameterError(f"bad range {text!r}, expected A..B")
    if lo > hi:
        raise ParameterError(f"empty range {text!r}")
    return list(range(lo, hi + 1))


def _row(n, cert, bound):
    report = verify_packing(cert)
    if not report.valid:
        raise RuntimeError(f"constructed packing failed its audit at n={n}: {report.failures[:3]}")
    return {
        "n": n,
        "uncovered": len(cert.uncovered),
        "bound_expr_value": bound,
        "log2n_floor": int(math.floor(math.log2(n))),
    }


def path_power_table(family: str, l: int, t: int, ns, m=None) -> list:
    """One audited construction per n. ``family`` is odd-power, any-power or induced-power."""
    rows = []
    for n in ns:
        if family == "odd-power":
            cert = pack_odd_path_power(l, t, n)
            bound = uncovered_bound(l, t, n)
        elif family == "any-power":
            cert = pack_any_path_power(l, t, n)
            bound = uncovered_bound(l, t, n)
        elif family == "induced-power":
            cert = induced_path_power_packing(l, t, n, m)
            bound = round(induced_constant(l, t, m) * n ** (t - 1), 6)
        else:
            raise ParameterError(f"unknown family {family!r}")
        rows.append(_row(n, cert, bound))
    return rows


def hamilton_table(l: int, ns, budget=None) -> list:
    rows = []
    for n in ns:
        res = consecutive_induced_hamilton(n, l, budget)
        rows.append({"n": n, "l": l, "status": res.status, "nodes": res.nodes})
    return rows


def compose(outer: PackingCertificate, tiling: PackingCertificate, mode: str = "induced") -> PackingCertificate:
    """Push every tile of ``tiling`` through every copy in ``outer``.

    ``tiling`` must perfectly pack the pattern box of the outer copies. When
    both levels are induced the composed copies are induced as well.
    """
    if tiling.uncovered:
        raise ParameterError("inner tiling leaves vertices uncovered")
    composed = []
    for copy in outer.placements:
        if copy.pattern.ambient != tiling.host:
            raise ParameterError(
                f"outer pattern lives in {copy.pattern.ambient}, tiling host is {tiling.host}"
            )
        where = dict(zip(copy.pattern.vertices, copy.image))
        for tile in tiling.placements:
            image = tuple(where[v] for v in tile.image)
            composed.append(Placement(tile.pattern, outer.host, image, mode))
    params = {f"outer_{k}": v for k, v in outer.params.items()}
    params.update({f"inner_{k}": v for k, v in tiling.params.items()})
    return PackingCertificate.build(outer.host, composed, params)


def box_tiling(H: PatternGraph, t: int, budget=None, seed: int = 0) -> PackingCertificate:
    """Perfect packing of (P_{2|H|})^t by induced copies of H, found by the oracle."""
    host = path_power(2 * len(H), t)
    res = exact_cover_search(host, H, "induced", budget, seed=seed)
    if res.status != SAT:
        raise ParameterError(f"no perfect induced tiling of {host} by H found ({res.status})")
    return res.certificate


def almost_tiling_table(H: PatternGraph, t: int, ns, m=None, budget=None, seed: int = 0) -> list:
    """Induced H-packings of Q_n via a perfect tiling of (P_{2|H|})^t and an induced (P_{2|H|})^t packing."""
    L = 2 * len(H)
    induced_parameters(L, m)
    tiling = box_tiling(H, t, budget, seed)
    rows = []
    for n in ns:
        outer = induced_path_power_packing(L, t, n, m)
        cert = compose(outer, tiling)
        bound = round(induced_constant(L, t, m) * n ** (t - 1), 6)
        rows.append(_row(n, cert, bound))
    return rows


def write_csv(rows, columns, fh=None) -> str:
    """Header plus one line per row; returns the text and writes it to ``fh`` if given."""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    text = buf.getvalue()
    if fh is not None:
        fh.write(text)
    return text


def read_csv(text: str) -> list:
    """Rows back as dicts with integer fields converted."""
    out = []
    for r in csv.DictReader(io.StringIO(text)):
        row = {}
        for k, v in r.items():
            try:
                row[k] = int(v)
            except ValueError:
                try:
                    row[k] = float(v)
                except ValueError:
                    row[k] = v
        out.append(row)
    return out
