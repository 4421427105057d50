"""Packing certificates, multiset covers, and their line-oriented text format.

Format (UTF-8, one record per line)::

    %cubepack v1 packing|multiset|pattern
    host 2,2,2
    param <key> <value>
    modulus 3            # multiset only
    residue 1            # multiset only
    exact 3              # optional, multiset only
    pattern P0 ambient 2,2 verts 0,0;0,1;1,1 [edges 0-1;1-2]
    copy P0 mode induced [mult 2] [blocks 0,1|2,3] map 0,0->1,0,0;...
    uncovered 0,0,0;1,1,1

Placements are written in canonical order, so equal objects serialize to
identical bytes.
"""

from __future__ import annotations

import os
import re
import tempfile
from dataclasses import dataclass, field
from typing import Optional

from .errors import CubepackError, FormatError
from .grid import Box, PatternGraph, Placement, format_vertex, parse_vertex

HEADER = "%cubepack v1"
_INT = re.compile(r"-?\d+\Z")


def _sort_key(p: Placement):
    return (p.key, p.mode, p.pattern.ambient.lengths, p.pattern.vertices, p.blocks or ())


@dataclass
class PackingCertificate:
    host: Box
    placements: list
    uncovered: list
    params: dict = field(default_factory=dict)

    @classmethod
    def build(cls, host: Box, placements, params: Optional[dict] = None) -> "PackingCertificate":
        """Canonically order ``placements`` and compute the uncovered vertices."""
        placements = sorted(placements, key=_sort_key)
        covered = bytearray(host.size)
        for p in placements:
            for c in p.codes:
                covered[c] = 1
        uncovered = [host.decode(i) for i, x in enumerate(covered) if not x]
        return cls(host, placements, uncovered, dict(params or {}))


@dataclass
class MultisetCover:
    """Placements with multiplicities; claims coverage = residue (mod modulus) everywhere.

    ``exact``, when set, additionally claims the coverage equals that value.
    """

    host: Box
    entries: list
    modulus: int
    residue: int
    exact: Optional[int] = None
    params: dict = field(default_factory=dict)

    @classmethod
    def build(cls, host, entries, modulus, residue, exact=None, params=None) -> "MultisetCover":
        """Merge repeated placements, reduce multiplicities mod ``modulus``, sort.

        Reduction is skipped for exact covers and for modulus 1.
        """
        if modulus < 1:
            raise ValueError("modulus must be >= 1")
        merged = {}
        for p, mult in entries:
            merged[p] = merged.get(p, 0) + mult
        out = []
        for p, mult in merged.items():
            if exact is None and modulus > 1:
                mult %= modulus
            if mult > 0:
                out.append((p, mult))
        out.sort(key=lambda e: (_sort_key(e[0]), e[1]))
        return cls(host, out, modulus, residue % modulus, exact, dict(params or {}))

    @property
    def placements(self) -> list:
        return [p for p, _ in self.entries]


# ---------------------------------------------------------------- writing


def _pattern_line(pid: str, pat: PatternGraph) -> str:
    parts = [
        "pattern", pid, "ambient", str(pat.ambient),
        "verts", ";".join(format_vertex(v) for v in pat.vertices),
    ]
    if pat.edges is not None:
        parts += ["edges", ";".join(f"{i}-{j}" for i, j in sorted(pat.edges)) or "-"]
    return " ".join(parts)


def _copy_line(pid: str, p: Placement, mult: Optional[int]) -> str:
    parts = ["copy", pid, "mode", p.mode]
    if mult is not None:
        parts += ["mult", str(mult)]
    if p.blocks is not None:
        parts += ["blocks", "|".join(format_vertex(b) for b in p.blocks)]
    parts += [
        "map",
        ";".join(
            f"{format_vertex(u)}->{format_vertex(v)}"
            for u, v in zip(p.pattern.vertices, p.image)
        ),
    ]
    return " ".join(parts)


def _vertex_list(vs) -> str:
    return ";".join(format_vertex(v) for v in vs)


def serialize_pattern(pat: PatternGraph, pid: str = "H") -> str:
    return f"{HEADER} pattern\n{_pattern_line(pid, pat)}\n"


def serialize(obj) -> str:
    if isinstance(obj, PatternGraph):
        return serialize_pattern(obj)
    multiset = isinstance(obj, MultisetCover)
    if multiset:
        items = obj.entries
    elif isinstance(obj, PackingCertificate):
        items = [(p, None) for p in obj.placements]
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")
    lines = [f"{HEADER} {'multiset' if multiset else 'packing'}", f"host {obj.host}"]
    for k in sorted(obj.params):
        lines.append(f"param {k} {obj.params[k]}")
    if multiset:
        lines.append(f"modulus {obj.modulus}")
        lines.append(f"residue {obj.residue}")
        if obj.exact is not None:
            lines.append(f"exact {obj.exact}")
    ids = {}
    body = []
    for p, mult in items:
        pid = ids.get(p.pattern)
        if pid is None:
            pid = ids[p.pattern] = f"P{len(ids)}"
            lines.append(_pattern_line(pid, p.pattern))
        body.append(_copy_line(pid, p, mult))
    lines += body
    if not multiset:
        lines.append(f"uncovered {_vertex_list(obj.uncovered)}".rstrip())
    return "\n".join(lines) + "\n"


def write_atomic(path, text: str) -> None:
    """Write ``text`` to ``path`` via a temp file and rename."""
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".cubepack-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------- reading


def _fields(tokens, line_no):
    """Turn ``key value key value ...`` into a dict."""
    if len(tokens) % 2:
        raise FormatError(f"line {line_no}: odd number of fields")
    return dict(zip(tokens[::2], tokens[1::2]))


def _box(text):
    try:
        return Box(tuple(int(x) for x in text.split(",")))
    except (ValueError, OverflowError) as exc:
        raise FormatError(f"bad box {text!r}") from exc


def _vertices(text):
    text = text.strip()
    if not text:
        return []
    return [parse_vertex(v) for v in text.split(";")]


def _param_value(text):
    return int(text) if _INT.match(text) else text


def parse(text: str):
    """Parse a certificate, cover, or pattern file. Raises FormatError."""
    try:
        return _parse(text)
    except FormatError:
        raise
    except (CubepackError, ValueError, KeyError, IndexError) as exc:
        raise FormatError(str(exc)) from exc


def _parse(text):
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise FormatError("empty file")
    head = lines[0].split()
    if len(head) != 3 or " ".join(head[:2]) != HEADER:
        raise FormatError(f"bad header {lines[0]!r}")
    kind = head[2]
    if kind not in ("packing", "multiset", "pattern"):
        raise FormatError(f"unknown kind {kind!r}")

    host = None
    params = {}
    header_ints = {}
    patterns = {}
    copies = []
    uncovered = None
    for no, line in enumerate(lines[1:], start=2):
        tok = line.split()
        tag = tok[0]
        if tag == "host":
            host = _box(tok[1])
        elif tag == "param":
            params[tok[1]] = _param_value(tok[2] if len(tok) > 2 else "")
        elif tag in ("modulus", "residue", "exact"):
            header_ints[tag] = int(tok[1])
        elif tag == "pattern":
            pid = tok[1]
            f = _fields(tok[2:], no)
            edges = None
            if "edges" in f:
                edges = frozenset(
                    tuple(int(x) for x in e.split("-")) for e in f["edges"].split(";") if e != "-"
                )
            patterns[pid] = PatternGraph(_box(f["ambient"]), tuple(_vertices(f["verts"])), edges)
        elif tag == "copy":
            f = _fields(tok[2:], no)
            copies.append((tok[1], f, no))
        elif tag == "uncovered":
            uncovered = _vertices(" ".join(tok[1:]))
        else:
            raise FormatError(f"line {no}: unknown record {tag!r}")

    if kind == "pattern":
        if len(patterns) != 1:
            raise FormatError("pattern file must hold exactly one pattern")
        return next(iter(patterns.values()))
    if host is None:
        raise FormatError("missing host line")

    entries = []
    for pid, f, no in copies:
        if pid not in patterns:
            raise FormatError(f"line {no}: unknown pattern {pid!r}")
        pat = patterns[pid]
        pairs = [m.split("->") for m in f["map"].split(";")]
        if any(len(pr) != 2 for pr in pairs):
            raise FormatError(f"line {no}: bad map entry")
        mapping = {parse_vertex(a): parse_vertex(b) for a, b in pairs}
        if len(mapping) != len(pairs) or set(mapping) != set(pat.vertices):
            raise FormatError(f"line {no}: map domain differs from pattern vertices")
        blocks = None
        if "blocks" in f:
            blocks = tuple(parse_vertex(b) for b in f["blocks"].split("|"))
        p = Placement(pat, host, tuple(mapping[v] for v in pat.vertices), f["mode"], blocks)
        entries.append((p, int(f["mult"]) if "mult" in f else None))

    if kind == "packing":
        if uncovered is None:
            raise FormatError("missing uncovered line")
        for v in uncovered:
            host.check(v)
        return PackingCertificate(host, [p for p, _ in entries], uncovered, params)
    for key in ("modulus", "residue"):
        if key not in header_ints:
            raise FormatError(f"missing {key} line")
    if any(m is None for _, m in entries):
        raise FormatError("multiset copy without mult field")
    return MultisetCover(
        host, entries, header_ints["modulus"], header_ints["residue"],
        header_ints.get("exact"), params,
    )


def read_file(path):
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def write_file(path, obj) -> None:
    write_atomic(path, serialize(obj))
