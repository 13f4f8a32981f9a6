"""Label-erasing projection: fibers, their P/T connectivity and simple
connectivity, lifting squares over structural edges, and surjectivity
onto the trivial-group complex."""

import pytest

from gcover.blocks import StandardBlock
from gcover.groups import cyclic, symmetric
from gcover.moves import Bounds
from gcover.param import Parameterization, Target, canonical_key, seed, validate
from gcover.fibration import (DEGENERATE, FibrationError, check_fiber,
                              check_lifting_squares,
                              check_projection_surjective, compute_fiber,
                              erase_target, lift_base_relation, project,
                              project_step)

Z2 = cyclic(2)


def four_boundary_pair():
    """Two 3-holed blocks over Z/2 glued at one cut; all four external
    monodromies equal 1."""
    t = Target(Z2, ((1, 1, 1, 1),))
    b1 = StandardBlock((1, 1, 0), (0, 0, 0))
    b2 = StandardBlock((0, 1, 1), (0, 0, 0))
    p = Parameterization(Z2, {"b1": b1, "b2": b2},
                         {"c1": (("b1", 3), ("b2", 1))},
                         {(0, 1): ("b1", 1), (0, 2): ("b1", 2),
                          (0, 3): ("b2", 2), (0, 4): ("b2", 3)}, {})
    assert validate(p, t) == []
    return p, t


def test_project_erases_labels_only():
    p, t = four_boundary_pair()
    q = project(p)
    assert q.group.order == 1
    assert set(q.blocks) == set(p.blocks)
    assert q.cuts == p.cuts
    assert q.external == p.external
    for blk in q.blocks.values():
        assert set(blk.g) == {0} and set(blk.h) == {0}
    # projecting is idempotent on shapes
    assert canonical_key(project(q)) == canonical_key(q)


def test_project_step_kinds():
    assert project_step(("Z", "b1")) == ("Z", "b1")
    assert project_step(("F", "c1")) == ("F", "c1")
    assert project_step(("P", "b1", 1)) is DEGENERATE
    assert project_step(("T", "c1", 1)) is DEGENERATE
    # label arguments are erased to the identity
    fi = project_step(("Finv", "b1", 2, 1))
    assert fi[0] == "Finv" and fi[3] == 0


def test_two_block_fiber_size_eight():
    p, t = four_boundary_pair()
    fiber = compute_fiber(project(p), t)
    rep = check_fiber(fiber)
    assert rep == {"size": 8, "edges": 10, "cells": 19,
                   "connected": True, "pi1": "ProvenTrivial"}


def test_fiber_disconnects_without_t():
    """P alone cannot rewrite the cut lift; dropping the T edges splits
    the two-block fiber."""
    p, t = four_boundary_pair()
    fiber = compute_fiber(project(p), t, include_t=False)
    rep = check_fiber(fiber)
    assert rep["size"] == 8
    assert not rep["connected"]


@pytest.mark.parametrize("G", [cyclic(2), cyclic(3), symmetric(3)],
                         ids=["Z2", "Z3", "S3"])
def test_single_block_fiber_is_relabel_orbit(G):
    t = Target(G, ((0, 0),))
    s = seed(t)
    rep = check_fiber(compute_fiber(project(s), t))
    assert rep["size"] == G.order
    assert rep["connected"]
    assert rep["pi1"] == "ProvenTrivial"


def test_lifting_squares_structural_edges():
    p, t = four_boundary_pair()
    base = project(p)
    rep = check_lifting_squares(base, ("Z", "b1"), t)
    assert rep == {"pairs": 28, "ok": 28, "fail": 0,
                   "lifts": 8, "inapplicable": 0}
    rep = check_lifting_squares(base, ("B", "b1", 1), t)
    assert rep["fail"] == 0 and rep["lifts"] == 8
    # gluing the cut only applies where the two lift labels agree
    rep = check_lifting_squares(base, ("F", "c1"), t)
    assert rep == {"pairs": 6, "ok": 6, "fail": 0,
                   "lifts": 4, "inapplicable": 4}


def test_lifting_rejects_fiber_direction_edges():
    p, t = four_boundary_pair()
    with pytest.raises(FibrationError):
        check_lifting_squares(project(p), ("T", "c1", 0), t)


def test_erase_target():
    _, t = four_boundary_pair()
    down = erase_target(t)
    assert down.group.order == 1
    assert down.components == ((0, 0, 0, 0),)


def test_projection_surjective_small():
    rep = check_projection_surjective(Target(Z2, ((1, 1, 0),)),
                                      Bounds(max_cuts=1, max_block_size=5))
    assert rep["surjective"]
    assert rep["vertices_down"] == 42
    assert rep["edges_down"] == 102


def test_lift_base_relations():
    from gcover.relations import enumerate_all_instances, verify_closure
    p, t = four_boundary_pair()
    base = project(p)
    insts = enumerate_all_instances(base, Bounds(2, 5))
    assert len(insts) == 41
    for inst in insts:
        lifted = lift_base_relation(inst, p, Bounds(2, 5))
        assert lifted.schema == inst.schema
        assert verify_closure(p, lifted)
