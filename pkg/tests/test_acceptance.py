"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` or directly as a script.
"""

import hashlib
import itertools
import math
import os
import subprocess
import sys
import time

import pytest

from cubepack.antipodal import ramras_decomposition
from cubepack.audit import (
    Codim1Class, classify_codim1_intersection, codim2_coverage_check, separating_audit,
    verify_multiset, verify_packing,
)
from cubepack.certificate import PackingCertificate, serialize
from cubepack.errors import ClassificationFailure
from cubepack.grid import (
    PatternGraph, cube, enumerate_placements, full_pattern, path_power, validate_placement,
)
from cubepack.hampath import (
    HamOrderedBlock, any_uncovered_count, block_product_from_placement, gray_cycle,
    min_dimension, mult_order_of_two, pack_any_path_power, pack_odd_path_power,
    two_adic_valuation,
)
from cubepack.induced import (
    induced_constant, induced_min_dimension, induced_path_power_packing, staircase_partition,
)
from cubepack.modcover import (
    congruence_cover_solve, lift_to_path_power, one_mod_l_partition, shift_l_partition,
)
from cubepack.oracle import (
    SAT, UNSAT, consecutive_induced_hamilton, enumerate_embeddings, exact_cover_search,
    greedy_p3_power_packing, p3_power_pattern, window_induced_ok,
)

EDGE = full_pattern(cube(1))
P3 = PatternGraph(cube(2), ((0, 0), (0, 1), (1, 1)))
Q2 = full_pattern(cube(2))
# Q_3 minus an antipodal pair: a 6-cycle
HEX = PatternGraph(cube(3), tuple(v for v in cube(3).vertices() if v not in ((0, 0, 0), (1, 1, 1))))


@pytest.fixture
def record(capsys):
    def _record(number, problems, detail, elapsed=None, limit=None):
        problems = list(problems)
        if limit is not None and elapsed > limit:
            problems.append(f"took {elapsed:.1f}s, limit {limit}s")
        status = "PASS" if not problems else "FAIL"
        timing = f" [{elapsed:.1f}s]" if elapsed is not None else ""
        with capsys.disabled():
            print(f"\ncriterion {number}: {status} {detail}{timing}")
            for p in problems[:10]:
                print(f"    {p}")
        assert not problems, problems
    return _record


def test_criterion_1_shift_partitions(record):
    problems = []
    start = time.monotonic()
    cases = 0
    for H in (EDGE, P3, Q2, HEX):
        k, l = H.ambient.dim, len(H)
        for n in (k, k + 1, k + 2):
            for cover in (shift_l_partition(H, n), lift_to_path_power(shift_l_partition(H, n), l)):
                cases += 1
                rep = verify_multiset(cover)
                if not rep.valid:
                    problems.append(f"|H|={l} n={n} host={cover.host}: {rep.failures[:2]}")
                if (rep.extra["coverage_min"], rep.extra["coverage_max"]) != (l, l):
                    problems.append(f"|H|={l} n={n}: coverage range {rep.extra}")
    record(1, problems, f"{cases} shift/lift covers with coverage exactly |H|",
           time.monotonic() - start, 10)


@pytest.mark.parametrize("name,H,l,k", [
    ("edge", EDGE, 2, 1), ("P3", P3, 3, 2), ("Q2-as-P4", Q2, 4, 2),
])
def test_criterion_2_one_mod_l(record, name, H, l, k):
    problems = []
    start = time.monotonic()
    cover = one_mod_l_partition(H)
    if (cover.modulus, cover.residue, cover.host) != (l, 1 % l, path_power(2 * l, k)):
        problems.append(f"unexpected cover header {cover.modulus} {cover.residue} {cover.host}")
    rep = verify_multiset(cover)
    if not rep.valid:
        problems.append(f"verify_multiset: {rep.failures[:2]}")
    bad = [p for p, _ in cover.entries if not validate_placement(p).isometric]
    if bad:
        problems.append(f"{len(bad)} placements not isometric")
    own = congruence_cover_solve(cover.host, [p for p, _ in cover.entries], l, 1)
    if own is None or not verify_multiset(own).valid:
        problems.append("solver found no solution on the construction's generators")
    gens = list(enumerate_placements(H, cover.host, "isometric"))
    full = congruence_cover_solve(cover.host, gens, l, 1)
    if full is None or not verify_multiset(full).valid:
        problems.append("solver found no solution on all isometric placements")
    record(2, problems,
           f"{name}: (1 mod {l}) cover of {cover.host} with {len(cover.entries)} entries, solver agrees",
           time.monotonic() - start, 60)


def closed_form(l, t, n):
    v = two_adic_valuation(l)
    m = mult_order_of_two(l >> v)
    r, a = divmod(n - t * v, m)
    return 2 ** (t * v) * 2 ** a * sum(math.comb(r, s) * (2 ** m - 1) ** s for s in range(t))


def test_criterion_3_path_power_counts(record):
    problems = []
    start = time.monotonic()
    runs = 0
    for l, t in itertools.product((3, 5, 6), (1, 2)):
        build = pack_odd_path_power if l % 2 else pack_any_path_power
        for n in range(min_dimension(l, t), 15):
            cert = build(l, t, n)
            runs += 1
            rep = verify_packing(cert)
            if not rep.valid:
                problems.append(f"l={l} t={t} n={n}: {rep.failures[:2]}")
            for p in cert.placements:
                try:
                    for b in block_product_from_placement(p).blocks:
                        b.validate()
                        if len(b) != l:
                            raise ValueError(f"block of size {len(b)}")
                except ValueError as exc:
                    problems.append(f"l={l} t={t} n={n}: {exc}")
                    break
            if len(cert.uncovered) != closed_form(l, t, n):
                problems.append(f"l={l} t={t} n={n}: {len(cert.uncovered)} != {closed_form(l, t, n)}")
    if len(pack_odd_path_power(3, 1, 4).uncovered) != 1:
        problems.append("l=3 t=1 n=4 does not leave exactly 1 vertex")
    record(3, problems, f"{runs} packings match the closed form", time.monotonic() - start, 30)


def test_criterion_4_ramras(record):
    problems = []
    start = time.monotonic()
    q15 = None
    for s in (1, 2, 3, 4):
        t0 = time.monotonic()
        cert = ramras_decomposition(s)
        n = 2 ** s - 1
        rep = verify_packing(cert)
        if not rep.valid or rep.uncovered:
            problems.append(f"s={s}: valid={rep.valid} uncovered={len(rep.uncovered)}")
        if len(cert.placements) != 2 ** n // (n + 1):
            problems.append(f"s={s}: {len(cert.placements)} paths")
        if any(m not in ("induced", "isometric") for m in rep.mode_verified):
            problems.append(f"s={s}: a path is not induced")
        for p in cert.placements:
            if sum(a != b for a, b in zip(p.image[0], p.image[-1])) != n:
                problems.append(f"s={s}: ends of {p.image[0]}..{p.image[-1]} not antipodal")
                break
        if s == 4:
            q15 = time.monotonic() - t0
            if q15 >= 5:
                problems.append(f"Q_15 took {q15:.1f}s")
    record(4, problems, f"s=1..4 antipodal decompositions, Q_15 in {q15:.2f}s",
           time.monotonic() - start)


def hamilton_blocks(d, l):
    """Every l-vertex path of Q_d as a Hamilton-ordered block (each vertex set, each order)."""
    host = cube(d)
    out = []

    def extend(seq):
        if len(seq) == l:
            out.append(HamOrderedBlock(tuple(range(d)), list(seq)))
            return
        last = seq[-1]
        for i in range(d):
            nxt = last[:i] + (1 - last[i],) + last[i + 1:]
            if nxt not in seq:
                seq.append(nxt)
                extend(seq)
                seq.pop()

    for v in host.vertices():
        extend([v])
    return out


def test_criterion_5_staircase(record):
    problems = []
    start = time.monotonic()
    total = 0
    sets = 0
    for l in (2, 3, 4, 5):
        d = math.ceil(math.log2(l)) + 1
        blocks = hamilton_blocks(d, l)
        sets += len({frozenset(b.order) for b in blocks})
        for block in blocks:
            total += 1
            out = staircase_partition(block)
            want = {u + (j,) for u in block.order for j in range(l - 1)}
            got = [v for p in out for v in p.image]
            if len(out) != l - 1 or len(got) != len(set(got)) or set(got) != want:
                problems.append(f"l={l} block={block.order}: not a partition")
            for p in out:
                if len(p.image) != l or not validate_placement(p).induced:
                    problems.append(f"l={l} block={block.order}: {p.image} not an induced P_{l}")
    record(5, problems,
           f"{total} Hamilton-ordered blocks ({sets} vertex sets) for l=2..5, all staircases induced",
           time.monotonic() - start, 30)


def test_criterion_6_induced_packing(record):
    problems = []
    start = time.monotonic()
    l, m = 3, 2
    width = 2 ** m - 1
    K1 = induced_constant(l, 1, m)
    counts = []
    for n in range(7, 14):
        cert = induced_path_power_packing(l, 1, n, m)
        rep = verify_packing(cert)
        if not rep.valid or any(x not in ("induced", "isometric") for x in rep.mode_verified):
            problems.append(f"t=1 n={n}: valid={rep.valid}")
        # base packing of Q_{n-3} by Hamilton blocks of b+1 = 3 vertices
        want = 2 ** width * any_uncovered_count(3, 1, n - width)
        counts.append(len(cert.uncovered))
        if len(cert.uncovered) != want or len(cert.uncovered) > K1:
            problems.append(f"t=1 n={n}: uncovered {len(cert.uncovered)}, expected {want}, K={K1}")
    K2 = induced_constant(l, 2, m)
    ratios = []
    for n in range(14, 19):
        cert = induced_path_power_packing(l, 2, n, m)
        rep = verify_packing(cert)
        if not rep.valid or any(x not in ("induced", "isometric") for x in rep.mode_verified):
            problems.append(f"t=2 n={n}: valid={rep.valid}")
        u = len(cert.uncovered)
        ratios.append(u / n)
        if u > K2 * n:
            problems.append(f"t=2 n={n}: uncovered {u} > K*n = {K2 * n}")
    record(6, problems,
           f"t=1 uncovered {counts} (K={K1:g}); t=2 K={K2:g}, uncovered/n in "
           f"[{min(ratios):.1f}, {max(ratios):.1f}] (min n for t=2: {induced_min_dimension(l, 2, m)})",
           time.monotonic() - start, 300)


def test_criterion_7_codim1_classes(record):
    problems = []
    start = time.monotonic()
    realized = set()
    copies = 0
    for k, n in ((1, 2), (1, 3), (2, 4)):
        for copy in enumerate_embeddings(p3_power_pattern(k), cube(n), "subgraph"):
            copies += 1
            for i, b in itertools.product(range(n), (0, 1)):
                try:
                    realized.add(classify_codim1_intersection(copy, i, b))
                except ClassificationFailure as exc:
                    problems.append(f"k={k} n={n} {copy.image}: {exc}")
    missing = set(Codim1Class) - realized
    if missing:
        problems.append(f"classes never realized: {sorted(c.value for c in missing)}")
    record(7, problems, f"{copies} copies classified, all four classes realized",
           time.monotonic() - start, 120)


def test_criterion_8_lower_bound(record):
    problems = []
    start = time.monotonic()
    sizes = {}
    for n in (6, 7):
        cert = greedy_p3_power_packing(3, n)
        rep = verify_packing(cert)
        if not rep.valid:
            problems.append(f"Q_{n}: packing invalid {rep.failures[:2]}")
        sep = separating_audit(cert.uncovered, n)
        if not sep.is_separating:
            problems.append(f"Q_{n}: uncovered set not separating, witness {sep.witness_pair}")
        if sep.size < math.ceil(math.log2(n)):
            problems.append(f"Q_{n}: only {sep.size} uncovered")
        c2 = codim2_coverage_check(cert)
        if not c2.valid:
            problems.append(f"Q_{n}: codim2 {c2.failures[:2]}")
        sizes[n] = (len(cert.placements), sep.size)
    record(8, problems,
           "greedy (P_3)^3 packings: " + ", ".join(f"Q_{n} {c} copies/{u} uncovered" for n, (c, u) in sizes.items()),
           time.monotonic() - start, 300)


def test_criterion_9_oracle(record):
    problems = []
    start = time.monotonic()
    t0 = time.monotonic()
    for host, pattern in ((cube(2), P3), (cube(5), P3), (path_power(5, 2), Q2)):
        res = exact_cover_search(host, pattern, "subgraph")
        if res.status != UNSAT or res.nodes != 0:
            problems.append(f"{host} / |H|={len(pattern)}: {res.status} after {res.nodes} nodes")
    if time.monotonic() - t0 > 0.5:
        problems.append("divisibility UNSAT was not instant")
    res = exact_cover_search(cube(3), full_pattern(path_power(4, 1)), "induced")
    if res.status != SAT or not verify_packing(res.certificate).valid:
        problems.append(f"(Q_3, induced P_4): {res.status}")
    ham = consecutive_induced_hamilton(3, 4, 10 ** 8)
    if ham.status != UNSAT:
        problems.append(f"(n=3, l=4): {ham.status}")
    for n in range(2, 11):
        r = consecutive_induced_hamilton(n, 3)
        if not r.sat or r.path != gray_cycle(n) or not window_induced_ok(r.path, 3):
            problems.append(f"l=3 n={n}: fast path did not return the Gray path")
    record(9, problems, f"divisibility UNSAT instant, Q_3/P_4 SAT, (3,4) {ham.status} in {ham.nodes} nodes",
           time.monotonic() - start)


def constructor_outputs():
    yield "shift", serialize(shift_l_partition(P3, 3))
    yield "lift", serialize(lift_to_path_power(shift_l_partition(HEX, 3), 6))
    for name, H in (("edge", EDGE), ("P3", P3), ("Q2", Q2)):
        yield f"one-mod-l {name}", serialize(one_mod_l_partition(H))
    yield "odd-power", serialize(pack_odd_path_power(5, 2, 10))
    yield "any-power", serialize(pack_any_path_power(6, 2, 9))
    yield "ramras", serialize(ramras_decomposition(4))
    for block in hamilton_blocks(3, 4)[:5]:
        placements = staircase_partition(block)
        yield "staircase", serialize(PackingCertificate.build(placements[0].host, placements, {}))
    yield "induced t=1", serialize(induced_path_power_packing(3, 1, 10, 2))
    yield "induced t=2", serialize(induced_path_power_packing(3, 2, 14, 2))


def digests():
    return [(name, hashlib.sha256(text.encode()).hexdigest()) for name, text in constructor_outputs()]


def test_criterion_10_format_stability(record):
    problems = []
    start = time.monotonic()
    first = digests()
    second = digests()
    if first != second:
        problems.append("two in-process runs differ")
    # a fresh interpreter with a different hash seed catches set-order leaks
    env = dict(os.environ, PYTHONHASHSEED="12345")
    code = ("import sys; sys.path.insert(0, %r); import test_acceptance as t; "
            "print('\\n'.join(n + ' ' + d for n, d in t.digests()))") % os.path.dirname(__file__)
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, env=env)
    fresh = [tuple(line.rsplit(" ", 1)) for line in out.stdout.splitlines()]
    if out.returncode or fresh != first:
        problems.append(f"fresh process differs (exit {out.returncode}) {out.stderr[-300:]}")
    record(10, problems, f"{len(first)} certificates byte-identical across runs",
           time.monotonic() - start)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
