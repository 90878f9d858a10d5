import itertools
import json

import pytest

from relkit.algebra import (
    App,
    CapExceeded,
    FiniteAlgebra,
    Operation,
    Var,
    eval_term,
    load_algebra,
    parse_term,
    power,
    product,
    save_algebra,
)
from relkit.caps import Caps


def mod3_alg():
    # f(a,b) = (2a + b) mod 3, flat table with the LAST argument fastest
    table = [(2 * a + b) % 3 for a in range(3) for b in range(3)]
    return FiniteAlgebra(3, [("f", 2, tuple(table))], name="mod3")


def test_table_indexing_last_argument_fastest():
    alg = mod3_alg()
    for a in range(3):
        for b in range(3):
            assert alg.apply("f", (a, b)) == (2 * a + b) % 3
    # explicit flat index check: f(2,1) sits at 2*3 + 1
    assert alg.op("f").table[2 * 3 + 1] == alg.apply("f", (2, 1))


def test_ternary_indexing():
    table = [a for a in range(2) for b in range(2) for c in range(2)]
    # that table is the first projection; index = ((a)*2 + b)*2 + c
    alg = FiniteAlgebra(2, [("p", 3, tuple(table))])
    for a, b, c in itertools.product(range(2), repeat=3):
        assert alg.apply("p", (a, b, c)) == a


def test_validation_errors():
    with pytest.raises(ValueError):
        FiniteAlgebra(0, [])
    with pytest.raises(ValueError):
        FiniteAlgebra(2, [("f", 2, (0, 0, 0))])  # wrong length
    with pytest.raises(ValueError):
        FiniteAlgebra(2, [("f", 1, (0, 2))])  # entry out of range
    with pytest.raises(ValueError):
        FiniteAlgebra(2, [("f", 1, (0, 1)), ("f", 1, (1, 0))])  # duplicate name
    with pytest.raises(KeyError):
        mod3_alg().op("g")
    with pytest.raises(ValueError):
        mod3_alg().apply("f", (0,))


def test_product_encoding(lattice2):
    sq = product(lattice2, lattice2)
    assert sq.size == 4
    # pair (x,y) encoded as x*|B|+y; join acts coordinatewise
    for x1, y1, x2, y2 in itertools.product(range(2), repeat=4):
        a = x1 * 2 + y1
        b = x2 * 2 + y2
        j = sq.apply("join", (a, b))
        assert j == (x1 | x2) * 2 + (y1 | y2)
        m = sq.apply("meet", (a, b))
        assert m == (x1 & x2) * 2 + (y1 & y2)


def test_power_matches_iterated_product(z2):
    cube = power(z2, 3)
    assert cube.size == 8
    for a, b in itertools.product(range(8), repeat=2):
        expected = ((a ^ b) & 4) | ((a ^ b) & 2) | ((a ^ b) & 1)
        assert cube.apply("add", (a, b)) == a ^ b == expected


def test_product_signature_mismatch(lattice2, z2):
    with pytest.raises(ValueError):
        product(lattice2, z2)


def test_caps_respected(z2):
    small = Caps(max_universe=4)
    with pytest.raises(CapExceeded):
        power(z2, 3, caps=small)
    with pytest.raises(CapExceeded):
        product(power(z2, 2), z2, caps=small)


def test_fingerprint_shape_and_stability(lattice2):
    fp = lattice2.fingerprint()
    size, digest = fp.split(":")
    assert size == "2" and len(digest) == 16
    assert fp == lattice2.fingerprint()
    other = FiniteAlgebra(2, lattice2.ops)  # same tables, no name
    assert other.fingerprint() == fp
    assert power(lattice2, 2).fingerprint() != fp


def test_json_roundtrip(tmp_path, baker4):
    data = baker4.to_json()
    clone = FiniteAlgebra.from_json(json.loads(json.dumps(data)))
    assert clone == baker4
    path = tmp_path / "baker4.json"
    save_algebra(baker4, str(path))
    assert load_algebra(str(path)) == baker4


def test_term_eval_and_parse(lattice2):
    t = parse_term("join(meet(x,y),z)")
    assert t == App("join", (App("meet", (Var(0), Var(1))), Var(2)))
    assert str(t) == "join(meet(x,y),z)"
    assert parse_term(str(t)) == t
    for a, b, c in itertools.product(range(2), repeat=3):
        assert eval_term(lattice2, t, (a, b, c)) == (a & b) | c


def test_parse_term_errors():
    for bad in ("join(x", "join x,y)", "", "join(x,)"):
        with pytest.raises(ValueError):
            parse_term(bad)
