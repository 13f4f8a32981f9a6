"""Relation schemas: enumeration counts, closure, the twist's P edge."""

import pytest

from gcover.blocks import StandardBlock
from gcover.groups import cyclic, symmetric
from gcover.moves import Bounds, MoveError, apply_step
from gcover.param import Parameterization, Target, canonical_key, seed
from gcover.relations import (SCHEMAS, enumerate_all_instances,
                              enumerate_instances, verify_closure)

Z2 = cyclic(2)
BOUNDS = Bounds(max_cuts=2, max_block_size=5)


def single(G, g, h):
    b = StandardBlock(tuple(g), tuple(h))
    ext = {(0, i): ("b1", i) for i in range(1, b.n + 1)}
    return Parameterization(G, {"b1": b}, {}, ext, {})


def canonical(p):
    from gcover.param import canonicalize
    return canonicalize(p)[0]


def test_r11_single_instance_per_block():
    p = canonical(single(Z2, (1, 1, 0), (0, 0, 0)))
    insts = enumerate_instances(p, "R11", BOUNDS)
    assert len(insts) == 1
    assert [s[0] for s in insts[0].steps].count("Z") == 3


def test_r5_count_is_blocks_times_g_squared():
    G = cyclic(3)
    p = canonical(single(G, (1, 2, 0), (0, 0, 0)))
    insts = enumerate_instances(p, "R5", BOUNDS)
    assert len(insts) == 1 * G.order ** 2


def test_r17_empty_without_cylinder():
    p = canonical(single(Z2, (1, 1, 0), (0, 0, 0)))
    assert enumerate_instances(p, "R17", BOUNDS) == []


def test_r12_supports_disjoint():
    from gcover.relations import _support
    G = Z2
    p = canonical(Parameterization(
        G,
        {"b1": StandardBlock((1, 1, 0), (0, 0, 0)),
         "b2": StandardBlock((1, 1), (0, 0))},
        {"c1": (("b1", 3), ("b2", 1))},
        {(0, 1): ("b1", 1), (0, 2): ("b1", 2), (0, 3): ("b2", 2)}, {}))
    for inst in enumerate_instances(p, "R12", BOUNDS):
        e1, e2 = inst.params[0], inst.params[1]
        assert _support(p, e1).isdisjoint(_support(p, e2)), inst.params


@pytest.mark.parametrize("G", [Z2, cyclic(3)], ids=["Z2", "Z3"])
def test_all_schemas_close_from_seeds(G):
    """Every instance of every schema closes, over the move closure of
    small seeds (the desk-scale closure lemma)."""
    from gcover.complex import build_bounded
    total = 0
    ms = [(0,), (1, 1), (1, 1, 0)] if G.order == 2 \
        else [(0,), (1, 2), (1, 2, 0)]
    for m in ms:
        t = Target(G, (m,))
        cx = build_bounded(t, Bounds(max_cuts=1, max_block_size=4,
                                     vertex_budget=20_000),
                           with_cells=False)
        keys = sorted(cx.bounded_vertices)[:40]
        for k in keys:
            v = cx.vertices[k]
            for inst in enumerate_all_instances(v, Bounds(2, 4)):
                assert verify_closure(v, inst), (inst.schema, inst.params)
                total += 1
    assert total > 100


def cylinder_vertex():
    """S2(1,1;0,0) glued onto a 3-holed block over Z/2: the twist
    schema's home."""
    b1 = StandardBlock((1, 1), (0, 0))
    b2 = StandardBlock((1, 1, 0), (0, 0, 0))
    p = Parameterization(
        Z2, {"b1": b1, "b2": b2},
        {"c1": (("b1", 2), ("b2", 1))},
        {(0, 1): ("b1", 1), (0, 2): ("b2", 2), (0, 3): ("b2", 3)}, {})
    return canonical(p)


def test_r17_closes_on_cylinder():
    p = cylinder_vertex()
    insts = enumerate_instances(p, "R17", Bounds(2, 5))
    assert insts
    for inst in insts:
        assert verify_closure(p, inst)


def test_r17_needs_its_p_edge():
    """AC-level negative check: dropping the P_g edge (g != identity)
    breaks closure of the twist loop."""
    p = cylinder_vertex()
    insts = enumerate_instances(p, "R17", Bounds(2, 5))
    broken = 0
    for inst in insts:
        without = [s for s in inst.steps if s[0] != "P"]
        if len(without) == len(inst.steps):
            continue   # this instance's g is the identity; P-free anyway
        cur = p
        try:
            for step in without:
                cur = apply_step(cur, step).param
        except MoveError:
            broken += 1
            continue
        if canonical_key(cur) != canonical_key(p):
            broken += 1
    assert broken > 0


def test_instances_respect_bounds_gating():
    """No instance enumerated at the cut limit grows the base vertex's
    cut count in its parameters beyond one extra cut."""
    p = cylinder_vertex()
    tight = Bounds(max_cuts=1, max_block_size=5)
    for inst in enumerate_all_instances(p, tight):
        assert verify_closure(p, inst)


def test_s3_schemas_close_spot_check():
    G = symmetric(3)
    t = Target(G, ((0, 0, 0),))
    p = canonical(seed(t))
    count = 0
    for schema in SCHEMAS:
        for inst in enumerate_instances(p, schema, Bounds(1, 4))[:20]:
            assert verify_closure(p, inst), (schema, inst.params)
            count += 1
    assert count > 30
