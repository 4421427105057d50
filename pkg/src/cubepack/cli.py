"""Command-line interface: construct certificates, verify them, print report tables.

Exit codes: 0 ok, 1 semantic failure (invalid certificate, failed audit),
2 usage, parameter or parse errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import report as rp
from .antipodal import ramras_decomposition
from .audit import codim2_coverage_check, separating_audit, verify_multiset, verify_packing
from .certificate import MultisetCover, PackingCertificate, parse, serialize, write_atomic
from .errors import CubepackError, FormatError
from .grid import PatternGraph, parse_vertex
from .hampath import HamOrderedBlock, gray_cycle, pack_any_path_power, pack_odd_path_power
from .induced import induced_path_power_packing, staircase_partition
from .modcover import lift_to_path_power, one_mod_l_partition, shift_l_partition

EXIT_OK, EXIT_INVALID, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read_pattern(path) -> PatternGraph:
    with open(path, encoding="utf-8") as fh:
        obj = parse(fh.read())
    if not isinstance(obj, PatternGraph):
        raise FormatError(f"{path} does not hold a pattern")
    return obj


def _parse_block(text: str) -> HamOrderedBlock:
    """``"0,0;0,1;1,1"``: a Hamilton order of a vertex set of some Q_d."""
    order = [parse_vertex(v) for v in text.split(";") if v.strip()]
    if not order:
        raise FormatError("empty block")
    d = len(order[0])
    block = HamOrderedBlock(tuple(range(d)), order, (2,) * d)
    block.validate()
    return block


def _default_block(l: int) -> HamOrderedBlock:
    """First l vertices of the Gray cycle of the smallest cube holding them."""
    d = max(1, (l - 1).bit_length())
    return HamOrderedBlock(tuple(range(d)), gray_cycle(d)[:l], (2,) * d)


def _echo(pairs, out):
    for k, v in pairs:
        print(f"{k}={v}", file=out)


def cmd_construct(args, out) -> int:
    kind = args.kind
    if kind == "shift-l":
        H = _read_pattern(args.pattern)
        obj = shift_l_partition(H, args.n)
        if args.lift:
            obj = lift_to_path_power(obj, args.lift)
    elif kind == "one-mod-l":
        obj = one_mod_l_partition(_read_pattern(args.pattern))
    elif kind == "odd-power":
        obj = pack_odd_path_power(args.l, args.t, args.n)
    elif kind == "any-power":
        obj = pack_any_path_power(args.l, args.t, args.n)
    elif kind == "ramras":
        obj = ramras_decomposition(args.s)
    elif kind == "staircase":
        block = _parse_block(args.block) if args.block else _default_block(args.l)
        placements = staircase_partition(block)
        obj = PackingCertificate.build(
            placements[0].host, placements, {"l": len(block)}
        )
    elif kind == "induced-power":
        obj = induced_path_power_packing(args.l, args.t, args.n, args.m)
    else:  # argparse restricts the choices
        raise AssertionError(kind)
    if args.out:
        write_atomic(args.out, serialize(obj))
    pairs = [("kind", kind), ("host", obj.host)]
    if isinstance(obj, MultisetCover):
        pairs += [("copies", len(obj.entries)), ("modulus", obj.modulus), ("residue", obj.residue)]
    else:
        pairs += [("copies", len(obj.placements)), ("uncovered", len(obj.uncovered))]
    pairs += sorted(obj.params.items())
    _echo(pairs, out)
    return EXIT_OK


def cmd_verify(args, out) -> int:
    with open(args.path, encoding="utf-8") as fh:
        obj = parse(fh.read())
    if isinstance(obj, PatternGraph):
        raise FormatError("a pattern file is not a certificate")
    doc = {}
    if isinstance(obj, MultisetCover):
        rep = verify_multiset(obj)
        doc["kind"] = "multiset"
    else:
        rep = verify_packing(obj)
        doc["kind"] = "packing"
    doc["audit"] = rep.to_dict()
    ok = rep.valid
    if args.separating or args.codim2:
        if isinstance(obj, MultisetCover) or not obj.host.is_cube:
            raise FormatError("the lower-bound audits need a packing of a hypercube")
    if args.separating:
        sep = separating_audit(obj.uncovered, obj.host.dim, args.k)
        doc["separating"] = sep.to_dict()
    if args.codim2:
        c2 = codim2_coverage_check(obj)
        doc["codim2"] = c2.to_dict()
        ok = ok and c2.valid
    json.dump(doc, out, indent=2, sort_keys=True)
    out.write("\n")
    return EXIT_OK if ok else EXIT_INVALID


def cmd_report(args, out) -> int:
    ns = rp.parse_range(args.n)
    if args.family == "consecutive-hamilton":
        rows = rp.hamilton_table(args.l, ns, args.budget)
        columns = rp.HAMILTON_COLUMNS
    elif args.family == "almost-tiling":
        H = _read_pattern(args.pattern)
        rows = rp.almost_tiling_table(H, args.t, ns, args.m, args.budget, args.seed)
        columns = rp.UNCOVERED_COLUMNS
    else:
        rows = rp.path_power_table(args.family, args.l, args.t, ns, args.m)
        columns = rp.UNCOVERED_COLUMNS
    text = rp.write_csv(rows, columns)
    if args.out:
        write_atomic(args.out, text)
    else:
        out.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cubepack", description=__doc__.splitlines()[0])
    p.add_argument("--seed", type=int, default=0, help="seed for randomized steps (default 0)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("construct", help="build a certificate")
    c.add_argument("kind", choices=[
        "shift-l", "one-mod-l", "odd-power", "any-power", "ramras", "staircase", "induced-power",
    ])
    c.add_argument("--pattern", help="pattern file (shift-l, one-mod-l)")
    c.add_argument("--n", type=int)
    c.add_argument("--l", type=int)
    c.add_argument("--t", type=int, default=1)
    c.add_argument("--m", type=int, help="cube-factor exponent override (induced-power)")
    c.add_argument("--s", type=int, help="Q_(2^s - 1) for ramras")
    c.add_argument("--lift", type=int, help="copy a shift-l cover into (P_2L)^n")
    c.add_argument("--block", help="staircase block as a Hamilton order, e.g. 0,0;0,1;1,1")
    c.add_argument("--out", help="certificate path")

    v = sub.add_parser("verify", help="audit a certificate file")
    v.add_argument("path")
    v.add_argument("--codim2", action="store_true", help="codimension-2 coverage check")
    v.add_argument("--separating", action="store_true", help="separating-family audit of the uncovered set")
    v.add_argument("--k", type=int, default=1, help="k for the separating audit")

    r = sub.add_parser("report", help="CSV tables")
    r.add_argument("family", choices=[
        "odd-power", "any-power", "induced-power", "consecutive-hamilton", "almost-tiling",
    ])
    r.add_argument("--n", required=True, help="range A..B")
    r.add_argument("--l", type=int)
    r.add_argument("--t", type=int, default=1)
    r.add_argument("--m", type=int)
    r.add_argument("--pattern", help="pattern file (almost-tiling)")
    r.add_argument("--budget", type=int, help="oracle node budget (default from CUBEPACK_BUDGET)")
    r.add_argument("--out", help="CSV path (default standard output)")
    return p


_REQUIRED = {
    "shift-l": ("pattern", "n"),
    "one-mod-l": ("pattern",),
    "odd-power": ("l", "n"),
    "any-power": ("l", "n"),
    "ramras": ("s",),
    "staircase": (),
    "induced-power": ("l", "n"),
    "consecutive-hamilton": ("l",),
    "almost-tiling": ("pattern",),
}


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    args = parser.parse_args(argv)
    name = getattr(args, "kind", None) or getattr(args, "family", None)
    if name is not None:
        missing = [f for f in _REQUIRED.get(name, ("l",)) if getattr(args, f) is None]
        if name == "staircase" and args.block is None and args.l is None:
            missing.append("l")
        if missing:
            parser.error(f"{name} needs " + ", ".join("--" + f for f in missing))
    try:
        if args.command == "construct":
            return cmd_construct(args, out)
        if args.command == "verify":
            return cmd_verify(args, out)
        return cmd_report(args, out)
    except (CubepackError, ValueError, OSError) as exc:
        # sizing, parameter and parse errors all carry a readable message
        print(f"cubepack: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
