"""Projection onto the trivial-group base complex and per-fiber checks.

The base complex is the same engine run over the order-1 group.  project
erases labels; a fiber over a base vertex collects every labeling of
that shape compatible with the target cover, joined by P and T edges
(label-only rewrites, which project to degenerate edges).  check_fiber
verifies the fiber is connected and simply connected;
check_lifting_squares verifies that any two lifts of a structural edge
close up through fiber paths at both ends.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .groups import GroupTable, cyclic
from .blocks import StandardBlock
from .param import (Target, Parameterization, canonicalize, canonical_key,
                    validate, in_seed_class, ParamError)
from .moves import Bounds, Step, apply_step, MoveError
from .presentation import Presentation, prove_trivial


class FibrationError(ValueError):
    pass


TRIVIAL_GROUP = cyclic(1)


# ---------------------------------------------------------------------------
# projection

def project(p: Parameterization) -> Parameterization:
    """Erase all labels: same forest, slots, external assignment and
    component structure over the order-1 group (canonical form)."""
    q = Parameterization(
        TRIVIAL_GROUP,
        {b: StandardBlock((0,) * blk.n, (0,) * blk.n)
         for b, blk in p.blocks.items()},
        dict(p.cuts),
        dict(p.external),
        {c: (b, 0) for c, (b, _x) in p.lifts.items()},
    )
    return canonicalize(q)[0]


DEGENERATE = ("degenerate",)


def project_step(step: Step):
    """Image of an edge downstairs: structural moves keep their shape
    (group-element parameters erased); label-only moves map to the
    explicit DEGENERATE marker (endpoints project equal)."""
    kind = step[0]
    if kind in ("P", "T"):
        return DEGENERATE
    if kind == "Finv":
        return (kind, step[1], step[2], 0)
    return step


# ---------------------------------------------------------------------------
# fibers

@dataclass
class Fiber:
    base: Parameterization          # canonical, trivial group
    target: Target
    members: dict[bytes, Parameterization]   # key -> labeling (base's ids)
    edges: dict[tuple, tuple]       # eid -> (src, dst, step)
    cells: list[tuple]              # (schema, base key, [(eid, sign)])
    stats: dict = field(default_factory=dict)


def _base_shape(base: Parameterization):
    """(block arities dict, cut side pairs, external map, lifted comps)"""
    return ({b: blk.n for b, blk in base.blocks.items()},
            dict(base.cuts), dict(base.external), sorted(base.lifts))


def _labelings(base: Parameterization, t: Target):
    """Every valid labeling of the base's shape, keeping the base's
    block/cut ids."""
    G = t.group
    arities, cuts, external, lifted = _base_shape(base)
    bids = sorted(arities, key=lambda b: int(b[1:]))
    slots = [(b, s) for b in bids for s in range(1, arities[b] + 1)]
    index = {bs: i for i, bs in enumerate(slots)}
    ext_of = {}
    for (comp, bnd), side in external.items():
        ext_of[side] = t.components[comp][bnd - 1]
    cut_pairs = list(cuts.values())
    lift_opts = [G.elements()] * len(lifted)
    for h in itertools.product(G.elements(), repeat=len(slots)):
        g = [None] * len(slots)
        for side, m in ext_of.items():
            hi = h[index[side]]
            g[index[side]] = G.prod((G.inv(hi), G.inv(m), hi))
        if not _solve_cut_labels(G, arities, bids, cut_pairs, index, g, h):
            continue
        blocks = {}
        ok = True
        for b in bids:
            gs = tuple(g[index[(b, s)]] for s in range(1, arities[b] + 1))
            hs = tuple(h[index[(b, s)]] for s in range(1, arities[b] + 1))
            if G.prod(gs) != G.identity:
                ok = False
                break
            blocks[b] = StandardBlock(gs, hs)
        if not ok:
            continue
        for lift_combo in itertools.product(*lift_opts):
            lifts = {comp: (base.lifts[comp][0], lift_combo[i])
                     for i, comp in enumerate(lifted)}
            yield Parameterization(G, blocks, dict(cuts), dict(external),
                                   lifts)


def _solve_cut_labels(G, arities, bids, cut_pairs, index, g, h):
    """Peel leaves of each component tree to force cut-slot g labels from
    the already-known ones; False when inconsistent/underdetermined."""
    remaining = list(cut_pairs)
    while remaining:
        progress = False
        for pair in list(remaining):
            for near, far in (pair, pair[::-1]):
                nb = near[0]
                idxs = [index[(nb, s)] for s in range(1, arities[nb] + 1)]
                unknown = [i for i in idxs if g[i] is None]
                if unknown != [index[near]]:
                    continue
                before = G.identity
                acc = G.identity
                for i in idxs:
                    if i == index[near]:
                        before = acc
                        acc = G.identity
                    else:
                        acc = G.mul(acc, g[i])
                gc = G.mul(G.inv(before), G.inv(acc))
                g[index[near]] = gc
                hn = h[index[near]]
                m_near = G.prod((hn, G.inv(gc), G.inv(hn)))
                hf = h[index[far]]
                g[index[far]] = G.prod((G.inv(hf), m_near, hf))
                remaining.remove(pair)
                progress = True
                break
            if progress:
                break
        if not progress:
            return False
    return True


def _fiber_steps(p: Parameterization):
    """P and T edges applicable at a fiber member (identity rewrites
    excluded)."""
    G = p.group
    out = []
    for b in sorted(p.blocks, key=lambda b: int(b[1:])):
        for x in G.elements():
            if x != G.identity:
                out.append(("P", b, x))
    for c in sorted(p.cuts, key=lambda c: int(c[1:])):
        (ba, sa), (bb, sb) = p.cuts[c]
        y = p.blocks[ba].h[sa - 1]
        if y == p.blocks[bb].h[sb - 1]:
            for z in G.elements():
                if z != y:
                    out.append(("T", c, z))
    return out


def _p_all(pb_steps, p, x):
    """P_x applied to every block (and every S0 lift) of p: the fiberwise
    translation; returns the step list."""
    return [("P", b, x) for b in sorted(p.blocks, key=lambda b: int(b[1:]))]


def compute_fiber(base: Parameterization, t: Target,
                  member_budget: int = 200_000,
                  anchor: Parameterization | None = None,
                  include_t: bool = True) -> Fiber:
    """All valid labelings of the base's shape in one labelled-cover
    class (the seed's, or the given anchor's — braids translate the
    class), with every P/T edge and the label-rewriting cells among
    them."""
    from .param import cover_invariant
    want = None if anchor is None else cover_invariant(anchor, t)
    members: dict[bytes, Parameterization] = {}
    for p in _labelings(base, t):
        if want is None:
            if not in_seed_class(p, t):
                continue
        elif cover_invariant(p, t) != want:
            continue
        problems = validate(p, t)
        if problems:
            continue
        k = canonical_key(p)
        if k not in members:
            members[k] = p
        if len(members) > member_budget:
            raise FibrationError("fiber member budget exceeded")
    fiber = Fiber(base, t, members, {}, [])
    for k in sorted(members):
        p = members[k]
        for step in _fiber_steps(p):
            if not include_t and step[0] == "T":
                continue         # diagnostic mode: P edges only
            res = apply_step(p, step)
            wk = canonical_key(res.param)
            if wk not in members:
                raise FibrationError("fiber edge leaves the fiber")
            eid, _sign = _fiber_edge(fiber, k, step, wk, p)
    if include_t:
        _fiber_cells(fiber)      # cells reference T edges; diagnostic
                                 # mode only asks about connectivity
    fiber.stats = {"size": len(members), "edges": len(fiber.edges),
                   "cells": len(fiber.cells)}
    return fiber


def _step_key(step: Step):
    return step


def _inverse_fiber_step(p: Parameterization, step: Step) -> Step:
    G = p.group
    if step[0] == "P":
        return ("P", step[1], G.inv(step[2]))
    (ba, sa), _ = p.cuts[step[1]]
    return ("T", step[1], p.blocks[ba].h[sa - 1])


def _fiber_edge(fiber: Fiber, src: bytes, step: Step, dst: bytes,
                p_src: Parameterization):
    """Record the traversal (identifying it with its reverse); returns
    (eid, sign)."""
    inv = _inverse_fiber_step(p_src, step)
    a = (_step_key(step), src, dst)
    b = (_step_key(inv), dst, src)
    eid, sign = (a, 1) if a <= b else (b, -1)
    if eid not in fiber.edges:
        fiber.edges[eid] = (src, dst, step) if sign == 1 else (dst, src, inv)
    return eid, sign


def _replay_loop(fiber: Fiber, start: bytes, steps: list[Step]):
    """Replay a loop of P/T steps among members; returns the signed edge
    word, or None if any endpoint leaves the fiber."""
    word = []
    cur = start
    for step in steps:
        p = fiber.members[cur]
        res = apply_step(p, step)
        wk = canonical_key(res.param)
        if wk == cur and step == res.inverse:
            continue                    # identity rewrite
        if wk not in fiber.members:
            return None
        word.append(_fiber_edge(fiber, cur, step, wk, p))
        cur = wk
    if cur != start:
        raise FibrationError("fiber cell does not close")
    return word


def _fiber_cells(fiber: Fiber):
    """Label-rewriting cells: P composition per block, commutation of
    disjoint P/T pairs, T composition per cut, and the P-T interchange at
    a cut (translating both sides by x conjugates the lift choice)."""
    G = fiber.target.group
    seen = set()

    def add(schema, base_key, steps):
        word = _replay_loop(fiber, base_key, steps)
        if word is None:
            return
        wkey = tuple(word)
        best = None
        for rot in range(max(len(wkey), 1)):
            r = wkey[rot:] + wkey[:rot]
            rr = tuple((e, -s) for e, s in reversed(r))
            for cand in (r, rr):
                if best is None or cand < best:
                    best = cand
        if best in seen:
            return
        seen.add(best)
        fiber.cells.append((schema, base_key, word))

    for k in sorted(fiber.members):
        p = fiber.members[k]
        bids = sorted(p.blocks, key=lambda b: int(b[1:]))
        matched = []
        for c in sorted(p.cuts, key=lambda c: int(c[1:])):
            (ba, sa), (bb, sb) = p.cuts[c]
            y = p.blocks[ba].h[sa - 1]
            if y == p.blocks[bb].h[sb - 1]:
                matched.append((c, ba, bb, y))
        for b in bids:
            for x in G.elements():
                for y in G.elements():
                    add("P-comp", k,
                        [("P", b, y), ("P", b, x),
                         ("P", b, G.inv(G.mul(x, y)))])
        for i, b1 in enumerate(bids):
            for b2 in bids[i + 1:]:
                for x in G.elements():
                    for y in G.elements():
                        add("P-disjoint", k,
                            [("P", b1, x), ("P", b2, y),
                             ("P", b1, G.inv(x)), ("P", b2, G.inv(y))])
        for c, ba, bb, y in matched:
            for z in G.elements():
                for w in G.elements():
                    # T to w, then to z, back to y directly
                    add("T-comp", k,
                        [("T", c, w), ("T", c, z), ("T", c, y)])
        for c, ba, bb, y in matched:
            if ba == bb:
                continue
            for x in G.elements():
                for z in G.elements():
                    # T_z (P_x both sides) = (P_x both sides) T_{zx}
                    lhs = [("P", ba, x), ("P", bb, x), ("T", c, z)]
                    rhs = [("T", c, G.mul(z, x)), ("P", ba, x), ("P", bb, x)]
                    add("PT-interchange", k,
                        lhs + _reverse_path(fiber, k, rhs))


def _reverse_path(fiber: Fiber, start: bytes, steps: list[Step]):
    """Steps undoing `steps` (replayed from start), reversed."""
    cur = start
    inverses = []
    for step in steps:
        p = fiber.members[cur]
        res = apply_step(p, step)
        inverses.append(_inverse_fiber_step(p, step))
        cur = canonical_key(res.param)
    return list(reversed(inverses))


# ---------------------------------------------------------------------------
# fiber verdicts

def fiber_pi1(fiber: Fiber):
    """(Presentation, connected) for the fiber subcomplex."""
    adj: dict[bytes, list] = {v: [] for v in fiber.members}
    for eid, (src, dst, _step) in fiber.edges.items():
        adj[src].append(eid)
        if dst != src:
            adj[dst].append(eid)
    tree = set()
    root = min(fiber.members) if fiber.members else None
    seen = {root} if root is not None else set()
    queue = [root] if root is not None else []
    head = 0
    while head < len(queue):
        v = queue[head]
        head += 1
        for eid in adj[v]:
            src, dst, _ = fiber.edges[eid]
            w = dst if src == v else src
            if w not in seen:
                seen.add(w)
                tree.add(eid)
                queue.append(w)
    connected = len(seen) == len(fiber.members)
    gens = {}
    for eid in sorted(fiber.edges):
        if eid not in tree:
            gens[eid] = len(gens) + 1
    relators = []
    for _schema, _bk, word in fiber.cells:
        relators.append(tuple(gens[eid] * sign for eid, sign in word
                              if eid not in tree))
    return Presentation(len(gens), relators), connected


def check_fiber(fiber: Fiber, coset_budget: int = 100_000) -> dict:
    """Connectivity (union-find over P/T edges) and simple connectivity
    of the fiber subcomplex."""
    pres, connected = fiber_pi1(fiber)
    verdict = prove_trivial(pres, coset_budget) if connected else "Nontrivial"
    return {"size": len(fiber.members), "edges": len(fiber.edges),
            "cells": len(fiber.cells), "connected": connected,
            "pi1": verdict}


# ---------------------------------------------------------------------------
# lifting squares

def _fiber_path(fiber: Fiber, src: bytes, dst: bytes):
    """A P/T step path src -> dst inside the fiber, or None."""
    if src == dst:
        return []
    prev = {src: None}
    queue = [src]
    head = 0
    while head < len(queue):
        v = queue[head]
        head += 1
        p = fiber.members[v]
        for step in _fiber_steps(p):
            res = apply_step(p, step)
            wk = canonical_key(res.param)
            if wk in fiber.members and wk not in prev:
                prev[wk] = (v, step)
                if wk == dst:
                    path = []
                    cur = wk
                    while prev[cur] is not None:
                        pv, st = prev[cur]
                        path.append(st)
                        cur = pv
                    return list(reversed(path))
                queue.append(wk)
    return None


def check_lifting_squares(base_src: Parameterization, step: Step,
                          t: Target, fibers: dict | None = None) -> dict:
    """For a structural base edge (Z, B, or F family), verify every pair
    of lifts closes into a commuting square through fiber paths."""
    if project_step(step) is DEGENERATE:
        raise FibrationError("base edge must be structural (Z/B/F)")
    src_fiber = compute_fiber(base_src, t) if fibers is None \
        else fibers[canonical_key(base_src)]
    lifts = []
    dst_base = None
    anchor = None
    inapplicable = 0
    for k in sorted(src_fiber.members):
        p = src_fiber.members[k]
        try:
            res = apply_step(p, step)
        except MoveError:
            inapplicable += 1    # labels refuse the lift (e.g. unmatched F)
            continue
        q = res.param
        if dst_base is None:
            dst_base = project(q)
            anchor = q
        lifts.append((k, canonical_key(q)))
    if dst_base is None:
        return {"pairs": 0, "ok": 0, "fail": 0,
                "lifts": 0, "inapplicable": inapplicable}
    dst_fiber = compute_fiber(dst_base, t, anchor=anchor) \
        if fibers is None else fibers[canonical_key(dst_base)]
    pairs = ok = 0
    for i, (s1, d1) in enumerate(lifts):
        for s2, d2 in lifts[i + 1:]:
            pairs += 1
            e1 = _fiber_path(src_fiber, s2, s1)
            e2 = _fiber_path(dst_fiber, d2, d1)
            if e1 is not None and e2 is not None:
                ok += 1
    return {"pairs": pairs, "ok": ok, "fail": pairs - ok,
            "lifts": len(lifts), "inapplicable": inapplicable}


# ---------------------------------------------------------------------------
# lifting base relations

def _erase_step_params(step: Step):
    kind = step[0]
    if kind in ("P", "T"):
        return None
    if kind == "Finv":
        return (kind, step[1], step[2])
    return step


def _loop_shadow(steps):
    return tuple(s for s in (_erase_step_params(st) for st in steps)
                 if s is not None)


def lift_base_relation(base_inst, fiber_vertex: Parameterization,
                       bounds: Bounds):
    """Given a relation instance at the projection of fiber_vertex,
    return an instance of the same schema at fiber_vertex whose
    projection is the base loop (label-only edges degenerate), verified
    to close."""
    from .relations import enumerate_instances, verify_closure
    proj = project(fiber_vertex)
    if canonical_key(proj) != base_inst.base:
        raise FibrationError("vertex does not project onto the "
                             "instance's base")
    want = _loop_shadow(base_inst.steps)
    for inst in enumerate_instances(fiber_vertex, base_inst.schema, bounds):
        if _loop_shadow(inst.steps) == want:
            if not verify_closure(fiber_vertex, inst):
                raise FibrationError("lifted instance does not close")
            return inst
    raise FibrationError("no lift of the base relation at this vertex")


# ---------------------------------------------------------------------------
# surjectivity of the projection

def erase_target(t: Target) -> Target:
    """The same boundary pattern over the order-1 group."""
    return Target(TRIVIAL_GROUP,
                  tuple((0,) * len(c) for c in t.components))


def check_projection_surjective(t: Target, bounds) -> dict:
    """Build the bounded complex upstairs and the bounded trivial-group
    complex downstairs (same bounds) and verify every downstairs vertex
    and structural edge is the image of an upstairs one."""
    from .complex import build_bounded
    up = build_bounded(t, bounds, with_cells=False)
    down = build_bounded(erase_target(t), bounds, with_cells=False)
    v_img = set()
    e_img = set()
    for k in up.bounded_vertices:
        v_img.add(canonical_key(project(up.vertices[k])))
    for eid in up.bounded_edges:
        e = up.edges[eid]
        ps = project_step(e.step)
        if ps is DEGENERATE:
            continue
        p = up.vertices[e.src]
        res = apply_step(p, e.step)
        src = canonical_key(project(p))
        dst = canonical_key(project(res.param))
        e_img.add(frozenset((src, dst)))
    v_missed = [k for k in down.bounded_vertices if k not in v_img]
    e_missed = []
    for eid in down.bounded_edges:
        e = down.edges[eid]
        if frozenset((e.src, e.dst)) not in e_img:
            e_missed.append(eid)
    return {"vertices_down": len(down.bounded_vertices),
            "edges_down": len(down.bounded_edges),
            "vertices_missed": len(v_missed),
            "edges_missed": len(e_missed),
            "surjective": not v_missed and not e_missed}
