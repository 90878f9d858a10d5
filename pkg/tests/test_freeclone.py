import itertools

import numpy as np
import pytest

from relkit.algebra import App, CapExceeded, Var, parse_term
from relkit.caps import Caps
from relkit.freeclone import (
    clone_as_algebra,
    dump_clone,
    free_relations,
    generate_clone,
    identity_holds,
    principal_sigma_4ary,
    restrict_table,
    slot_identifications,
    table_of_term,
)
from relkit.relations import admissible_closure, compose, intersect


def monotone_01_preserving_tables(k):
    """Oracle for the 2-chain: term functions of the lattice (0,1,∨,∧) in k
    variables are exactly the monotone functions fixing the constant tuples."""
    points = list(itertools.product((0, 1), repeat=k))
    out = set()
    for bits in range(1 << len(points)):
        f = {p: (bits >> i) & 1 for i, p in enumerate(points)}
        if f[points[0]] != 0 or f[points[-1]] != 1:
            continue
        if all(
            f[p] <= f[q]
            for p, q in itertools.combinations(points, 2)
            if all(a <= b for a, b in zip(p, q))
        ):
            out.add(tuple(f[p] for p in points))
    return out


def parity_tables(k):
    # z2 term functions: sums of variable subsets (empty sum via x+x)
    points = list(itertools.product((0, 1), repeat=k))
    out = set()
    for coeffs in itertools.product((0, 1), repeat=k):
        out.add(tuple(sum(c * a for c, a in zip(coeffs, p)) % 2 for p in points))
    return out


def test_clone_counts_with_oracles(lattice2, z2):
    c = generate_clone(lattice2, 3)
    assert c.complete and len(c) == 18
    assert {tuple(e.table) for e in c.elements} == monotone_01_preserving_tables(3)
    c4 = generate_clone(lattice2, 4)
    assert c4.complete and len(c4) == 166
    assert {tuple(e.table) for e in c4.elements} == monotone_01_preserving_tables(4)
    cz = generate_clone(z2, 3)
    assert cz.complete and len(cz) == 8
    assert {tuple(e.table) for e in cz.elements} == parity_tables(3)


def test_clone_counts_regression(baker4, lattice_2x2):
    assert len(generate_clone(baker4, 3)) == 10
    assert len(generate_clone(baker4, 4)) == 53
    # same variety as the 2-chain, so the same free algebra size
    assert len(generate_clone(lattice_2x2, 3)) == 18


def test_projections_and_witness_depths(lattice2):
    c = generate_clone(lattice2, 3)
    for i in range(3):
        assert c.elements[i].witness == Var(i)
        assert c.elements[i].depth == 0
    # depths never exceed a parent chain: witnesses replay to their tables
    for e in c.elements:
        assert list(table_of_term(lattice2, e.witness, 3)) == list(e.table)


def test_witness_tables_replay(z2, baker4):
    for alg in (z2, baker4):
        c = generate_clone(alg, 3)
        for e in c.elements:
            assert list(table_of_term(alg, e.witness, 3)) == list(e.table)


def test_clone_closed_under_operations(lattice2):
    c = generate_clone(lattice2, 3)
    keys = {e.key() for e in c.elements}
    tables = c.matrix()
    for op in lattice2.ops:
        table = np.array(op.table, dtype=tables.dtype)
        for combo in itertools.product(range(len(c)), repeat=op.arity):
            args = tables[list(combo)]
            flat = args[0].copy()
            for col in args[1:]:
                flat *= lattice2.size
                flat += col
            assert table[flat].tobytes() in keys


def test_generation_cap(lattice2):
    c = generate_clone(lattice2, 3, cap=5)
    assert not c.complete and len(c) == 5
    with pytest.raises(CapExceeded):
        clone_as_algebra(c)
    tight = Caps(clone_cap_3=7)
    assert len(generate_clone(lattice2, 3, caps=tight)) == 7


def test_clone_as_algebra_operations(lattice2):
    c = generate_clone(lattice2, 3)
    free = clone_as_algebra(c)
    assert free.size == 18
    # the induced operation composes pointwise
    for i, j in itertools.product(range(0, 18, 5), repeat=2):
        k = free.apply("join", (i, j))
        assert (c.table(k) == np.maximum(c.table(i), c.table(j))).all()
        m = free.apply("meet", (i, j))
        assert (c.table(m) == np.minimum(c.table(i), c.table(j))).all()


def test_free_relations_basics(lattice2):
    fr = free_relations(generate_clone(lattice2, 3))
    assert (fr.x, fr.y, fr.z) == (0, 1, 2)
    assert fr.alpha.contains(fr.x, fr.z) and fr.alpha.is_transitive()
    assert fr.r_xy.contains(fr.x, fr.y) and fr.r_xy.is_reflexive()
    # the distributive-lattice middle element joins x to z through both sides
    mid = intersect(compose(intersect(fr.alpha, fr.beta), intersect(fr.alpha, fr.gamma)), fr.alpha)
    assert mid.contains(fr.x, fr.z)


def test_identity_holds_patterns(lattice2):
    c = generate_clone(lattice2, 3)
    maj = parse_term("join(meet(x,y),join(meet(x,z),meet(y,z)))")
    assert identity_holds(lattice2, maj, Var(0), "aab")
    assert identity_holds(lattice2, maj, Var(0), "aba")
    assert identity_holds(lattice2, maj, Var(1), "abb")
    assert not identity_holds(lattice2, maj, Var(0), "abc")
    assert identity_holds(lattice2, App("join", (Var(0), Var(1))), App("join", (Var(1), Var(0))), "ab")
    assert len({e.key() for e in c.elements}) == 18


def test_restrict_table_oracle(lattice2):
    c4 = generate_clone(lattice2, 4)
    n = 2
    for e in c4.elements[:12]:
        for slot in range(3):
            got = restrict_table(e.table, n, 4, slot)
            want = []
            for args in itertools.product(range(n), repeat=3):
                full = args + (args[slot],)
                idx = 0
                for a in full:
                    idx = idx * n + a
                want.append(e.table[idx])
            assert list(got) == want


def test_slot_identifications(lattice2):
    c3 = generate_clone(lattice2, 3)
    c4 = generate_clone(lattice2, 4)
    slots = slot_identifications(c4, c3)
    assert len(slots) == len(c4)
    by_key = {e.key(): e.id for e in c3.elements}
    for uid, (ax, ay, az) in enumerate(slots):
        tab = c4.table(uid)
        assert by_key[restrict_table(tab, 2, 4, 0).tobytes()] == ax
        assert by_key[restrict_table(tab, 2, 4, 1).tobytes()] == ay
        assert by_key[restrict_table(tab, 2, 4, 2).tobytes()] == az


def test_principal_sigma_dual_route(lattice2, baker4):
    """The 4-ary slot relation equals the admissible closure of {(x,z)} in the
    free algebra — two independent constructions of the same object."""
    for alg in (lattice2, baker4):
        c3 = generate_clone(alg, 3)
        c4 = generate_clone(alg, 4)
        fr = free_relations(c3)
        sigma = principal_sigma_4ary(c4, c3)
        assert sigma == admissible_closure(fr.free, [(fr.x, fr.z)])


def test_dump_clone_format(z2):
    c = generate_clone(z2, 3)
    d = dump_clone(c)
    assert d["count"] == 8 and d["complete"] and d["arity"] == 3
    assert len(d["elements"]) == 8
    for el in d["elements"]:
        assert el["table"] == list(c.table(el["id"]))
        assert parse_term(el["witness"]) == c.witness(el["id"])


def test_nullary_free_algebra_error(lattice2):
    with pytest.raises(ValueError):
        generate_clone(lattice2, 0)
    with pytest.raises(ValueError):
        free_relations(generate_clone(lattice2, 4))
