import pytest
from hypothesis import given, settings, strategies as st

from cubepack.antipodal import ramras_decomposition
from cubepack.certificate import (
    MultisetCover, PackingCertificate, parse, read_file, serialize, serialize_pattern, write_file,
)
from cubepack.errors import FormatError
from cubepack.grid import PatternGraph, Placement, cube
from cubepack.hampath import pack_any_path_power
from cubepack.modcover import one_mod_l_partition, shift_l_partition

P3 = PatternGraph(cube(2), ((0, 0), (0, 1), (1, 1)))


def same_packing(a, b):
    return (a.host == b.host and a.placements == b.placements
            and list(a.uncovered) == list(b.uncovered) and a.params == b.params)


def test_packing_roundtrip():
    cert = pack_any_path_power(6, 1, 3)
    text = serialize(cert)
    back = parse(text)
    assert same_packing(cert, back)
    assert serialize(back) == text


def test_blocks_survive_roundtrip():
    cert = pack_any_path_power(4, 2, 6)
    back = parse(serialize(cert))
    assert [p.blocks for p in back.placements] == [p.blocks for p in cert.placements]


def test_multiset_roundtrip():
    cover = one_mod_l_partition(P3)
    text = serialize(cover)
    back = parse(text)
    assert isinstance(back, MultisetCover)
    assert back.entries == cover.entries
    assert (back.modulus, back.residue, back.exact) == (3, 1, None)
    assert serialize(back) == text


def test_exact_field_roundtrip():
    cover = shift_l_partition(P3, 2)
    back = parse(serialize(cover))
    assert back.exact == 3 and back.residue == 0


def test_pattern_roundtrip():
    assert parse(serialize_pattern(P3)) == P3
    explicit = PatternGraph(cube(2), ((0, 0), (0, 1), (1, 1), (1, 0)), frozenset({(0, 1), (1, 2), (2, 3)}))
    assert parse(serialize(explicit)) == explicit


def test_header_and_records():
    text = serialize(ramras_decomposition(2))
    lines = text.splitlines()
    assert lines[0] == "%cubepack v1 packing"
    assert lines[1] == "host 2,2,2"
    assert any(ln.startswith("pattern P0 ambient 4 verts 0;1;2;3") for ln in lines)
    assert sum(ln.startswith("copy P0 mode induced map ") for ln in lines) == 2
    assert lines[-1] == "uncovered"


def test_canonical_order_independent_of_input_order():
    cert = pack_any_path_power(3, 1, 4)
    shuffled = PackingCertificate.build(cert.host, list(reversed(cert.placements)), cert.params)
    assert serialize(shuffled) == serialize(cert)


def test_build_merges_and_reduces():
    host = cube(2)
    p = Placement(P3, host, P3.vertices, "induced")
    cover = MultisetCover.build(host, [(p, 2), (p, 2)], 3, 1)
    assert cover.entries == [(p, 1)]
    cover = MultisetCover.build(host, [(p, 3)], 3, 1)
    assert cover.entries == []


@pytest.mark.parametrize("text", [
    "",
    "%cubepack v2 packing\n",
    "%cubepack v1 tiling\nhost 2\n",
    "%cubepack v1 packing\nuncovered\n",
    "%cubepack v1 packing\nhost 2,2\nbogus 1\nuncovered\n",
    "%cubepack v1 packing\nhost 2,2\ncopy P0 mode induced map 0->0,0\nuncovered\n",
    "%cubepack v1 packing\nhost 2,2\npattern P0 ambient 2 verts 0;1\n"
    "copy P0 mode induced map 0->0,0;1->0,5\nuncovered\n",
    "%cubepack v1 packing\nhost 2,2\npattern P0 ambient 2 verts 0;1\n"
    "copy P0 mode induced map 0->0,0\nuncovered\n",
    "%cubepack v1 multiset\nhost 2\npattern P0 ambient 2 verts 0;1\n"
    "copy P0 mode induced map 0->0;1->1\nmodulus 2\nresidue 0\n",
    "%cubepack v1 multiset\nhost 2\nresidue 0\n",
    "%cubepack v1 packing\nhost 2,x\nuncovered\n",
])
def test_parse_errors(text):
    with pytest.raises(FormatError):
        parse(text)


def test_file_helpers(tmp_path):
    cert = ramras_decomposition(2)
    path = tmp_path / "r.pack"
    write_file(path, cert)
    assert same_packing(read_file(path), cert)
    assert not [f for f in tmp_path.iterdir() if f.name.startswith(".cubepack-")]


@settings(max_examples=25, deadline=None)
@given(st.lists(st.sampled_from(range(16)), min_size=1, max_size=6, unique=True),
       st.integers(1, 4))
def test_random_packing_roundtrip(codes, mult):
    host = cube(4)
    single = PatternGraph(cube(1), ((0,),))
    placements = [Placement(single, host, (host.decode(c),), "isometric") for c in codes]
    cert = PackingCertificate.build(host, placements, {"note": "x"})
    assert same_packing(parse(serialize(cert)), cert)
    cover = MultisetCover.build(host, [(p, mult) for p in placements], 5, 2)
    back = parse(serialize(cover))
    assert back.entries == cover.entries
