"""Relation schemas: the 2-cells of the move complex.

Each schema instantiates, at an applicable vertex, a closed loop of
primitive moves (left-hand path followed by the reversed inverses of the
right-hand path).  Construction checks that both paths land on the same
canonical vertex; verify_closure independently replays the loop.

Catalog (R1, the edge/inverse-edge cancellation, lives in the path
algebra itself and needs no cell):

  R2   P and Z commute on a block
  R3   P and B commute on a block
  R4   relabelling both sides of a removable cut commutes with F
  R5   P composition: P_x after P_y equals P_{xy}
  R6   a cut can be made removable by relabelling either side
  R7   Z shifts the braid index: B_i then Z equals Z then B_{i+1}
  R8   Z on either glued block commutes with T
  R9   B away from the cut slot commutes with T
  R10  T equals F followed by the reverse split with the new label
  R11  n rotations of an arity-n block close up
  R12  moves of disjoint support commute
  R13  F is symmetric in its two blocks, up to rotations
  R14  two removable cuts can be removed in either order
  R15  moves on the other block commute with gluing on a cylinder
  R16  two adjacent braids compose to an interval braid (and mirror)
  R17  rotating an arity-2 block braids and relabels (Dehn twist)
"""

from __future__ import annotations

from dataclasses import dataclass

from .blocks import f_applicable
from .param import Parameterization, canonical_key
from .moves import (Bounds, PathBuilder, Step, MoveError, apply_step,
                    enumerate_moves, do_GB)

SCHEMAS = ["R2", "R3", "R4", "R5", "R6", "R7", "R8", "R9", "R10", "R11",
           "R12", "R13", "R14", "R15", "R16", "R17"]


class RelationError(ValueError):
    pass


@dataclass
class RelationInstance:
    schema: str
    base: bytes                  # canonical key of the base vertex
    steps: list[Step]
    params: tuple

    def __repr__(self):
        return "RelationInstance(%s, %s)" % (self.schema, self.params)


def verify_closure(p: Parameterization, inst: RelationInstance) -> bool:
    """Replay the loop from its base vertex; true iff it returns there.
    Raises MoveError if an edge is inapplicable mid-replay (a schema
    instantiation bug, not a closure failure)."""
    key = canonical_key(p)
    if key != inst.base:
        raise RelationError("instance base does not match vertex")
    cur = p
    for step in inst.steps:
        cur = apply_step(cur, step).param
    return canonical_key(cur) == key


def _two_path(p, schema, params, lhs_prog, rhs_prog,
              cache=None, key=None) -> RelationInstance:
    lpb = PathBuilder(p, cache=cache, key=key)
    lhs_prog(lpb)
    rpb = PathBuilder(p, cache=cache, key=key)
    rhs_prog(rpb)
    lk = lpb.key if cache is not None else canonical_key(lpb.p)
    rk = rpb.key if cache is not None else canonical_key(rpb.p)
    if lk != rk:
        raise RelationError("%s paths diverge at %s" % (schema, (params,)))
    base = key if key is not None else canonical_key(p)
    return RelationInstance(schema, base,
                            lpb.steps + rpb.reversed_inverse_steps(), params)


def _blocks(p):
    return sorted(p.blocks, key=lambda b: int(b[1:]))


def _cuts(p):
    return sorted(p.cuts, key=lambda c: int(c[1:]))


def _f_orient(p, cid):
    """(left block, right block) if the cut is directly removable."""
    sa, sb = p.cuts[cid]
    for (la, ls), (rb, rs) in ((sa, sb), (sb, sa)):
        if (ls == p.blocks[la].n and rs == 1
                and f_applicable(p.group, p.blocks[la], ls,
                                 p.blocks[rb], rs)):
            return la, rb
    return None


def _positional_orients(p, cid):
    """Orientations (left, right) where only the slot positions fit
    (last slot against first slot), labels arbitrary."""
    sa, sb = p.cuts[cid]
    out = []
    for (la, ls), (rb, rs) in ((sa, sb), (sb, sa)):
        if ls == p.blocks[la].n and rs == 1:
            out.append((la, rb))
    return out


def _matched(p, cid):
    (ba, sa), (bb, sb) = p.cuts[cid]
    return p.blocks[ba].h[sa - 1] == p.blocks[bb].h[sb - 1]


# --- per-schema instance generators ---------------------------------------

def _gen_R2(p, G, bounds):
    for b in _blocks(p):
        if p.blocks[b].n < 1:
            continue
        for x in G.elements():
            def lhs(pb, b=b, x=x):
                r = pb.do("Z", b)
                pb.do("P", r.block_map[b], x)

            def rhs(pb, b=b, x=x):
                r = pb.do("P", b, x)
                pb.do("Z", r.block_map[b])

            yield ("R2", (b, x), lhs, rhs)


def _gen_R3(p, G, bounds):
    for b in _blocks(p):
        for i in range(1, p.blocks[b].n):
            for x in G.elements():
                def lhs(pb, b=b, i=i, x=x):
                    r = pb.do("B", b, i)
                    pb.do("P", r.block_map[b], x)

                def rhs(pb, b=b, i=i, x=x):
                    r = pb.do("P", b, x)
                    pb.do("B", r.block_map[b], i)

                yield ("R3", (b, i, x), lhs, rhs)


def _gen_R4(p, G, bounds):
    for c in _cuts(p):
        orient = _f_orient(p, c)
        if orient is None:
            continue
        a, b = orient
        for x in G.elements():
            def lhs(pb, a=a, b=b, c=c, x=x):
                r = pb.do("P", a, x)
                b2, c2 = r.block_map[b], r.cut_map[c]
                r = pb.do("P", b2, x)
                pb.do("F", r.cut_map[c2])

            def rhs(pb, a=a, c=c, x=x):
                r = pb.do("F", c)
                pb.do("P", r.extras["merged"], x)

            yield ("R4", (c, x), lhs, rhs)


def _gen_R5(p, G, bounds):
    for b in _blocks(p):
        for x in G.elements():
            for y in G.elements():
                def lhs(pb, b=b, x=x, y=y):
                    r = pb.do("P", b, y)
                    pb.do("P", r.block_map[b], x)

                def rhs(pb, b=b, xy=G.mul(x, y)):
                    pb.do("P", b, xy)

                yield ("R5", (b, x, y), lhs, rhs)


def _gen_R6(p, G, bounds):
    for c in _cuts(p):
        for a, b in _positional_orients(p, c):
            sa, sb = p.cuts[c]
            if sa[0] != a:
                sa, sb = sb, sa
            y = p.blocks[a].h[sa[1] - 1]   # left block's cut label
            w = p.blocks[b].h[sb[1] - 1]   # right block's cut label
            t = G.mul(G.inv(w), y)

            # relabelling the left side by t or the right side by t^-1
            # both make the cut removable; the two removals differ by a
            # relabelling of the merged block
            def lhs(pb, a=a, c=c, t=t):
                r = pb.do("P", a, t)
                pb.do("F", r.cut_map[c])

            def rhs(pb, b=b, c=c, t=t):
                r = pb.do("P", b, G.inv(t))
                r = pb.do("F", r.cut_map[c])
                pb.do("P", r.extras["merged"], t)

            yield ("R6", (c, a), lhs, rhs)


def _gen_R7(p, G, bounds):
    for b in _blocks(p):
        for i in range(1, p.blocks[b].n - 1):
            def lhs(pb, b=b, i=i):
                r = pb.do("B", b, i)
                pb.do("Z", r.block_map[b])

            def rhs(pb, b=b, i=i):
                r = pb.do("Z", b)
                pb.do("B", r.block_map[b], i + 1)

            yield ("R7", (b, i), lhs, rhs)


def _gen_R8(p, G, bounds):
    for c in _cuts(p):
        if not _matched(p, c):
            continue
        for side in (0, 1):
            x = p.cuts[c][side][0]
            if p.blocks[x].n < 1:
                continue
            for z in G.elements():
                def lhs(pb, x=x, c=c, z=z):
                    r = pb.do("Z", x)
                    pb.do("T", r.cut_map[c], z)

                def rhs(pb, x=x, c=c, z=z):
                    r = pb.do("T", c, z)
                    pb.do("Z", r.block_map[x])

                yield ("R8", (c, x, z), lhs, rhs)


def _gen_R9(p, G, bounds):
    for c in _cuts(p):
        if not _matched(p, c):
            continue
        for side in (0, 1):
            x, slot = p.cuts[c][side]
            for i in range(1, p.blocks[x].n):
                if slot == i + 1:
                    continue   # the braid would drag the cut's label
                for z in G.elements():
                    def lhs(pb, x=x, i=i, c=c, z=z):
                        r = pb.do("B", x, i)
                        pb.do("T", r.cut_map[c], z)

                    def rhs(pb, x=x, i=i, c=c, z=z):
                        r = pb.do("T", c, z)
                        pb.do("B", r.block_map[x], i)

                    yield ("R9", (c, x, i, z), lhs, rhs)


def _gen_R10(p, G, bounds):
    for c in _cuts(p):
        orient = _f_orient(p, c)
        if orient is None:
            continue
        a, _b = orient
        k = p.blocks[a].n - 1
        for z in G.elements():
            def lhs(pb, c=c, z=z):
                pb.do("T", c, z)

            def rhs(pb, c=c, k=k, z=z):
                r = pb.do("F", c)
                pb.do("Finv", r.extras["merged"], k, z)

            yield ("R10", (c, z), lhs, rhs)


def _gen_R11(p, G, bounds):
    for b in _blocks(p):
        n = p.blocks[b].n
        if n < 1:
            continue

        def lhs(pb, b=b, n=n):
            for _ in range(n):
                r = pb.do("Z", b)
                b = r.block_map[b]

        def rhs(pb):
            pass

        yield ("R11", (b,), lhs, rhs)


def _support(p, step: Step):
    kind = step[0]
    if kind in ("Z", "Zinv", "B", "Binv", "P", "Finv"):
        return frozenset([("b", step[1])])
    if kind in ("F", "T"):
        (ba, _), (bb, _) = p.cuts[step[1]]
        return frozenset([("c", step[1]), ("b", ba), ("b", bb)])
    raise RelationError("unsupported kind %r" % kind)


def _track_step(step: Step, res) -> Step:
    """Translate a step's entity ids through an ApplyResult's maps."""
    kind = step[0]
    if kind in ("Z", "Zinv", "P", "Finv"):
        return (kind, res.block_map[step[1]]) + step[2:]
    if kind in ("B", "Binv"):
        return (kind, res.block_map[step[1]], step[2])
    if kind in ("F", "T"):
        return (kind, res.cut_map[step[1]]) + step[2:]
    raise RelationError("unsupported kind %r" % kind)


def _gen_R12(p, G, bounds):
    moves = enumerate_moves(p, bounds)
    for i, e1 in enumerate(moves):
        s1 = _support(p, e1)
        for e2 in moves[i + 1:]:
            if s1 & _support(p, e2):
                continue

            def lhs(pb, e1=e1, e2=e2):
                r = pb.do(*e1)
                pb.do(*_track_step(e2, r))

            def rhs(pb, e1=e1, e2=e2):
                r = pb.do(*e2)
                pb.do(*_track_step(e1, r))

            yield ("R12", (e1, e2), lhs, rhs)


def _gen_R13(p, G, bounds):
    for c in _cuts(p):
        orient = _f_orient(p, c)
        if orient is None:
            continue
        a, b = orient
        l = p.blocks[b].n - 1

        def lhs(pb, c=c, l=l):
            r = pb.do("F", c)
            m = r.extras["merged"]
            for _ in range(l):
                r = pb.do("Z", m)
                m = r.block_map[m]

        def rhs(pb, a=a, b=b, c=c):
            r = pb.do("Z", a)
            b2, c2 = r.block_map[b], r.cut_map[c]
            r = pb.do("Zinv", b2)
            pb.do("F", r.cut_map[c2])

        yield ("R13", (c,), lhs, rhs)


def _gen_R14(p, G, bounds):
    removable = [c for c in _cuts(p) if _f_orient(p, c) is not None]
    for i, c1 in enumerate(removable):
        for c2 in removable[i + 1:]:
            def lhs(pb, c1=c1, c2=c2):
                r = pb.do("F", c1)
                pb.do("F", r.cut_map[c2])

            def rhs(pb, c1=c1, c2=c2):
                r = pb.do("F", c2)
                pb.do("F", r.cut_map[c1])

            yield ("R14", (c1, c2), lhs, rhs)


def _cylinder_positions(p, G):
    """Cuts joining some block's last slot to slot 1 of an arity-2 block,
    directly removable: the standard cylinder gluing."""
    out = []
    for c in _cuts(p):
        sa, sb = p.cuts[c]
        for (ja, js), (cb, cs) in ((sa, sb), (sb, sa)):
            if (p.blocks[cb].n == 2 and cs == 1 and ja != cb
                    and js == p.blocks[ja].n
                    and f_applicable(G, p.blocks[ja], js, p.blocks[cb], cs)):
                out.append((c, ja, cb))
    return out


def _gen_R15(p, G, bounds):
    for c, j, cyl in _cylinder_positions(p, G):
        n_j = p.blocks[j].n
        # candidate moves E on the non-cylinder block leaving the cut's
        # slot labels alone (P has its own cells, R4/R6)
        cands: list[Step] = [("Z", j)]
        for i in range(1, n_j - 1):   # braids not touching the cut slot
            cands.append(("B", j, i))
            cands.append(("Binv", j, i))
        for k in range(1, n_j):
            for y in G.elements():
                cands.append(("Finv", j, k, y))
        for c2 in _cuts(p):
            if c2 == c:
                continue
            sides = p.cuts[c2]
            if not any(s[0] == j for s in sides):
                continue
            if _matched(p, c2):
                for z in G.elements():
                    cands.append(("T", c2, z))
            if _f_orient(p, c2) is not None:
                cands.append(("F", c2))
        for e in cands:
            def lhs(pb, c=c, e=e):
                r = pb.do("F", c)
                pb.do(*_track_step(e, r))

            def rhs(pb, c=c, cyl=cyl, e=e):
                from .moves import do_GF
                r = pb.do(*e)
                c2, cyl2 = r.cut_map[c], r.block_map[cyl]
                # after E the cut may have left the last slot; the
                # generalized removal rotates as needed
                side_a, side_b = pb.p.cuts[c2]
                jside = side_a if side_a[0] != cyl2 else side_b
                if jside[1] == pb.p.blocks[jside[0]].n:
                    do_GF(pb, c2, jside[0])
                else:
                    do_GF(pb, c2, cyl2)

            yield ("R15", (c, e), lhs, rhs)


def _gen_R16(p, G, bounds):
    for b in _blocks(p):
        n = p.blocks[b].n
        for i in range(1, n - 1):
            def lhs(pb, b=b, i=i):
                r = pb.do("B", b, i)
                pb.do("B", r.block_map[b], i + 1)

            def rhs(pb, b=b, i=i):
                do_GB(pb, b, (i, i), (i + 1, i + 2))

            yield ("R16", (b, i, "fwd"), lhs, rhs)

            def lhs2(pb, b=b, i=i):
                r = pb.do("B", b, i + 1)
                pb.do("B", r.block_map[b], i)

            def rhs2(pb, b=b, i=i):
                do_GB(pb, b, (i, i + 1), (i + 2, i + 2))

            yield ("R16", (b, i, "mirror"), lhs2, rhs2)


def _gen_R17(p, G, bounds):
    for b in _blocks(p):
        blk = p.blocks[b]
        if blk.n != 2:
            continue
        g = blk.g[0]

        def lhs(pb, b=b):
            r = pb.do("B", b, 1)
            pb.do("Z", r.block_map[b])

        def rhs(pb, b=b, g=g):
            r = pb.do("Z", b)
            b2 = r.block_map[b]
            r = pb.do("B", b2, 1)
            pb.do("P", r.block_map[b2], g)

        yield ("R17", (b,), lhs, rhs)


_GENERATORS = {
    "R2": _gen_R2, "R3": _gen_R3, "R4": _gen_R4, "R5": _gen_R5,
    "R6": _gen_R6, "R7": _gen_R7, "R8": _gen_R8, "R9": _gen_R9,
    "R10": _gen_R10, "R11": _gen_R11, "R12": _gen_R12, "R13": _gen_R13,
    "R14": _gen_R14, "R15": _gen_R15, "R16": _gen_R16, "R17": _gen_R17,
}


def enumerate_instances(p: Parameterization, schema: str, bounds: Bounds,
                        cache=None, key=None) -> list[RelationInstance]:
    """All loops of the schema based at the (canonical) vertex p whose
    every edge is applicable; deterministic order.  An optional shared
    (vertex key, step) cache (with p's canonical key) skips repeated
    rewrites across instances."""
    try:
        gen = _GENERATORS[schema]
    except KeyError:
        raise RelationError("unknown schema %r" % schema) from None
    out = []
    seen = set()
    for name, params, lhs, rhs in gen(p, p.group, bounds):
        if params in seen:
            continue
        seen.add(params)
        out.append(_two_path(p, name, params, lhs, rhs, cache, key))
    return out


def enumerate_all_instances(p: Parameterization, bounds: Bounds,
                            cache=None, key=None) -> list[RelationInstance]:
    out = []
    for schema in SCHEMAS:
        out.extend(enumerate_instances(p, schema, bounds, cache, key))
    return out
