"""Parameterizations: forests of standard blocks glued along cuts,
presenting a principal cover of a disjoint union of genus-zero surfaces
with boundary.

A target fixes the base: a list of components, each a list of boundary
monodromies.  A parameterization assigns to every component a tree of
blocks; block slots are either glued pairwise by cuts or matched to the
component's boundaries.  Components without boundary are presented by a
single arity-0 block plus a choice of global sheet lift.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .groups import GroupTable
from .blocks import (StandardBlock, make_block, monodromy, glue_admissible,
                     block_text, parse_block, BlockError)

Side = tuple[str, int]           # (block id, slot 1-based)


class ParamError(ValueError):
    pass


class TargetError(ValueError):
    pass


@dataclass(frozen=True)
class Target:
    group: GroupTable
    components: tuple[tuple[int, ...], ...]   # boundary monodromies

    @property
    def n_components(self) -> int:
        return len(self.components)


@dataclass
class Parameterization:
    group: GroupTable
    blocks: dict[str, StandardBlock]
    cuts: dict[str, tuple[Side, Side]]
    external: dict[tuple[int, int], Side]     # (component, boundary) -> side
    lifts: dict[int, tuple[str, int]]         # component -> (block id, lift)

    def copy(self) -> "Parameterization":
        return Parameterization(self.group, dict(self.blocks),
                                dict(self.cuts), dict(self.external),
                                dict(self.lifts))

    def slot_map(self) -> dict[Side, tuple]:
        """Map every occupied slot to its role:
        ("cut", cut_id, other_side) or ("ext", comp, idx)."""
        out: dict[Side, tuple] = {}
        for cid, (sa, sb) in self.cuts.items():
            for near, far in ((sa, sb), (sb, sa)):
                if near in out:
                    raise ParamError("slot %s used twice" % (near,))
                out[near] = ("cut", cid, far)
        for (comp, idx), side in self.external.items():
            if side in out:
                raise ParamError("slot %s used twice" % (side,))
            out[side] = ("ext", comp, idx)
        return out


def _num(ident: str) -> int:
    return int(ident[1:])


def canonicalize(p: Parameterization):
    """Relabel blocks and cuts by a deterministic depth-first traversal.

    Returns (canonical parameterization, block id map, cut id map); the
    maps send old ids to new ids.  Traversal starts at each component's
    first boundary (or its arity-0 block) and walks slots in order.
    """
    slot_map = p.slot_map()
    block_map: dict[str, str] = {}
    cut_map: dict[str, str] = {}

    def visit(bid: str):
        block_map[bid] = "b%d" % (len(block_map) + 1)
        blk = p.blocks[bid]
        for slot in range(1, blk.n + 1):
            role = slot_map.get((bid, slot))
            if role is not None and role[0] == "cut":
                cid, far = role[1], role[2]
                if cid not in cut_map:
                    cut_map[cid] = "c%d" % (len(cut_map) + 1)
                    if far[0] not in block_map:
                        visit(far[0])

    comps = sorted(set(c for c, _ in p.external) | set(p.lifts))
    for comp in comps:
        if comp in p.lifts:
            root = p.lifts[comp][0]
        else:
            try:
                root = p.external[(comp, 1)][0]
            except KeyError:
                raise ParamError("component %d missing boundary 1" % comp)
        if root not in block_map:
            visit(root)
    if len(block_map) != len(p.blocks):
        raise ParamError("parameterization is not a forest of "
                         "component trees (unreachable blocks)")

    def mside(s: Side) -> Side:
        return (block_map[s[0]], s[1])

    q = Parameterization(
        p.group,
        {block_map[b]: blk for b, blk in p.blocks.items()},
        {cut_map[c]: (mside(sa), mside(sb)) if _order_ok(block_map, sa, sb)
         else (mside(sb), mside(sa))
         for c, (sa, sb) in p.cuts.items()},
        {k: mside(s) for k, s in p.external.items()},
        {c: (block_map[b], x) for c, (b, x) in p.lifts.items()},
    )
    return q, block_map, cut_map


def _order_ok(block_map, sa: Side, sb: Side) -> bool:
    ka = (_num(block_map[sa[0]]), sa[1])
    kb = (_num(block_map[sb[0]]), sb[1])
    return ka <= kb


def serialize(p: Parameterization) -> str:
    """Deterministic text form; assumes canonical ids."""
    G = p.group
    lines = []
    for bid in sorted(p.blocks, key=_num):
        lines.append("block %s: %s" % (bid, block_text(G, p.blocks[bid])))
    for cid in sorted(p.cuts, key=_num):
        (ba, sa), (bb, sb) = p.cuts[cid]
        lines.append("cut %s: %s.%d -- %s.%d" % (cid, ba, sa, bb, sb))
    for (comp, idx) in sorted(p.external):
        bid, slot = p.external[(comp, idx)]
        lines.append("ext %d.%d: %s.%d" % (comp, idx, bid, slot))
    for comp in sorted(p.lifts):
        bid, x = p.lifts[comp]
        lines.append("lift %d: %s %s" % (comp, bid, G.format(x)))
    return "\n".join(lines) + "\n"


def canonical_key(p: Parameterization) -> bytes:
    q, _, _ = canonicalize(p)
    return serialize(q).encode()


def key_of_canonical(p: Parameterization) -> bytes:
    """canonical_key without re-canonicalizing; p must already carry
    canonical ids (as every move result does)."""
    return serialize(p).encode()


def parse_param(G: GroupTable, text: str) -> Parameterization:
    blocks: dict[str, StandardBlock] = {}
    cuts: dict[str, tuple[Side, Side]] = {}
    external: dict[tuple[int, int], Side] = {}
    lifts: dict[int, tuple[str, int]] = {}

    def side(tok: str) -> Side:
        bid, slot = tok.rsplit(".", 1)
        return (bid, int(slot))

    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        head, _, rest = line.partition(":")
        kw, _, name = head.strip().partition(" ")
        name = name.strip()
        rest = rest.strip()
        if kw == "block":
            blocks[name] = parse_block(G, rest)
        elif kw == "cut":
            a, b = (t.strip() for t in rest.split("--"))
            cuts[name] = (side(a), side(b))
        elif kw == "ext":
            comp, idx = (int(t) for t in name.split("."))
            external[(comp, idx)] = side(rest)
        elif kw == "lift":
            comp = int(name)
            bid, elem = rest.split(None, 1)
            lifts[comp] = (bid, G.parse(elem))
        else:
            raise ParamError("unrecognized line %r" % line)
    return Parameterization(G, blocks, cuts, external, lifts)


# ---------------------------------------------------------------------------
# validation and the cover invariant

def _component_trees(p: Parameterization):
    """Partition block ids into connected trees; returns list of sets.
    Raises if any cut closes a cycle (genus) or joins a block to itself."""
    parent = {b: b for b in p.blocks}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for cid, ((ba, _), (bb, _)) in p.cuts.items():
        if ba == bb:
            raise ParamError("cut %s joins block %s to itself" % (cid, ba))
        ra, rb = find(ba), find(bb)
        if ra == rb:
            raise ParamError("cut %s closes a cycle" % cid)
        parent[ra] = rb
    trees: dict[str, set] = {}
    for b in p.blocks:
        trees.setdefault(find(b), set()).add(b)
    return list(trees.values())


def validate(p: Parameterization, t: Target) -> list[str]:
    """Return a list of violations (empty means p is a vertex of the
    move complex over t, i.e. structurally valid, cut-admissible, with
    matching boundary data and the right equivalence class of cover)."""
    G = p.group
    problems: list[str] = []
    if G is not t.group and G.table != t.group.table:
        return ["parameterization group differs from target group"]

    for bid, blk in p.blocks.items():
        if G.prod(blk.g) != G.identity:
            problems.append("block %s: g labels do not multiply to 1" % bid)

    # slot coverage
    try:
        slot_map = p.slot_map()
    except ParamError as e:
        return problems + [str(e)]
    for bid, blk in p.blocks.items():
        for slot in range(1, blk.n + 1):
            if (bid, slot) not in slot_map:
                problems.append("slot %s.%d is unattached" % (bid, slot))
    for (bid, slot) in slot_map:
        if bid not in p.blocks:
            problems.append("unknown block %s" % bid)
        elif not (1 <= slot <= p.blocks[bid].n):
            problems.append("slot %s.%d out of range" % (bid, slot))
    if problems:
        return problems

    # forest structure and component assignment
    try:
        trees = _component_trees(p)
    except ParamError as e:
        return [str(e)]
    tree_of = {b: i for i, tr in enumerate(trees) for b in tr}
    comp_tree: dict[int, int] = {}
    for (comp, _idx), (bid, _slot) in p.external.items():
        prev = comp_tree.setdefault(comp, tree_of[bid])
        if prev != tree_of[bid]:
            problems.append("component %d spans several trees" % comp)
    for comp, (bid, _x) in p.lifts.items():
        if comp in comp_tree:
            problems.append("component %d has both boundaries and a lift"
                            % comp)
        if p.blocks[bid].n != 0:
            problems.append("lift of component %d names a block of arity %d"
                            % (comp, p.blocks[bid].n))
        comp_tree[comp] = tree_of[bid]
    used_trees = sorted(comp_tree.values())
    if used_trees != sorted(range(len(trees))):
        problems.append("trees and components do not correspond one-to-one")

    # boundary bookkeeping against the target
    if sorted(comp_tree) != list(range(t.n_components)):
        problems.append("components %s do not match target (%d components)"
                        % (sorted(comp_tree), t.n_components))
        return problems
    for comp, bnds in enumerate(t.components):
        if len(bnds) == 0:
            if comp not in p.lifts:
                problems.append("closed component %d needs a lift" % comp)
            continue
        idxs = sorted(i for (c, i) in p.external if c == comp)
        if idxs != list(range(1, len(bnds) + 1)):
            problems.append("component %d boundaries %s incomplete"
                            % (comp, idxs))
    if problems:
        return problems

    # admissibility of cuts and boundary monodromies
    for cid, ((ba, sa), (bb, sb)) in p.cuts.items():
        if not glue_admissible(G, p.blocks[ba], sa, p.blocks[bb], sb):
            problems.append("cut %s is not admissible" % cid)
    for (comp, idx), (bid, slot) in p.external.items():
        m = monodromy(G, p.blocks[bid], slot)
        if m != t.components[comp][idx - 1]:
            problems.append("boundary %d.%d monodromy mismatch" % (comp, idx))
    return problems


def in_seed_class(p: Parameterization, t: Target) -> bool:
    """Whether p carries the same labelled-cover invariant as the
    reference seed.  Preserved by every move except braids, which
    translate a boundary's labelling by the holonomy braided over."""
    return cover_invariant(p, t) == _seed_invariant(t)


def cover_invariant(p: Parameterization, t: Target):
    """Equivalence-class invariant of the presented cover.

    Per component: transport every boundary's sheet labelling back to the
    block holding boundary 1, normalize by the first boundary, and pair
    with the exact boundary monodromies.  Rotations, cut insertions and
    removals, relabellings and lift translations all preserve this record
    (boundaryless components carry no invariant: any two global lifts are
    related by a deck transformation).  Braids act on it by translating
    the moved boundary's entry by a holonomy element.
    """
    G = p.group
    slot_map = p.slot_map()
    record = []
    for comp in range(t.n_components):
        if len(t.components[comp]) == 0:
            record.append(("free",))
            continue
        root = p.external[(comp, 1)][0]
        # transport factor from each block's labelling to the root's
        tau = {root: G.identity}
        stack = [root]
        while stack:
            bid = stack.pop()
            blk = p.blocks[bid]
            for slot in range(1, blk.n + 1):
                role = slot_map.get((bid, slot))
                if role is None or role[0] != "cut":
                    continue
                far_bid, far_slot = role[2]
                if far_bid in tau:
                    continue
                y_near = blk.h[slot - 1]
                y_far = p.blocks[far_bid].h[far_slot - 1]
                tau[far_bid] = G.prod((G.inv(y_far), y_near, tau[bid]))
                stack.append(far_bid)
        n = len(t.components[comp])
        iota = []
        mono = []
        for idx in range(1, n + 1):
            bid, slot = p.external[(comp, idx)]
            blk = p.blocks[bid]
            iota.append(G.mul(blk.h[slot - 1], tau[bid]))
            mono.append(monodromy(G, blk, slot))
        base = G.inv(iota[0])
        record.append((tuple(mono), tuple(G.mul(i, base) for i in iota)))
    return tuple(record)


def equivalent_covers(p: Parameterization, q: Parameterization,
                      t: Target) -> bool:
    return cover_invariant(p, t) == cover_invariant(q, t)


# ---------------------------------------------------------------------------
# reference seed

def seed(t: Target) -> Parameterization:
    """Deterministic one-block-per-component parameterization of t.

    For each boundary, g_i = h_i^-1 * m_i^-1 * h_i makes the monodromy
    through the labelling h_i equal to m_i; the h vector is the
    lexicographically first one whose induced g labels multiply to 1.
    """
    G = t.group
    blocks: dict[str, StandardBlock] = {}
    external: dict[tuple[int, int], Side] = {}
    lifts: dict[int, tuple[str, int]] = {}
    next_b = 1
    for comp, mono in enumerate(t.components):
        bid = "b%d" % next_b
        next_b += 1
        if len(mono) == 0:
            blocks[bid] = make_block(G, (), ())
            lifts[comp] = (bid, G.identity)
            continue
        found = None
        for h in _lex_vectors(G.order, len(mono)):
            g = tuple(G.prod((G.inv(hi), G.inv(mi), hi))
                      for hi, mi in zip(h, mono))
            if G.prod(g) == G.identity:
                found = (g, h)
                break
        if found is None:
            raise TargetError("component %d admits no standard block "
                              "with monodromies %s" % (comp, mono))
        blocks[bid] = StandardBlock(*found)
        for idx in range(1, len(mono) + 1):
            external[(comp, idx)] = (bid, idx)
    return Parameterization(G, blocks, {}, external, lifts)


def _lex_vectors(order: int, n: int):
    vec = [0] * n
    while True:
        yield tuple(vec)
        i = n - 1
        while i >= 0 and vec[i] == order - 1:
            vec[i] = 0
            i -= 1
        if i < 0:
            return
        vec[i] += 1


@lru_cache(maxsize=None)
def _seed_invariant(t: Target):
    return cover_invariant(seed(t), t)


# ---------------------------------------------------------------------------
# graphviz export

def to_dot(p: Parameterization) -> str:
    q, _, _ = canonicalize(p)
    G = q.group
    lines = ["graph parameterization {", "  node [shape=box];"]
    for bid in sorted(q.blocks, key=_num):
        lines.append('  %s [label="%s\\n%s"];'
                     % (bid, bid, block_text(G, q.blocks[bid])))
    for cid in sorted(q.cuts, key=_num):
        (ba, sa), (bb, sb) = q.cuts[cid]
        lines.append('  %s -- %s [label="%s: %d--%d"];'
                     % (ba, bb, cid, sa, sb))
    for (comp, idx) in sorted(q.external):
        bid, slot = q.external[(comp, idx)]
        ext = "x%d_%d" % (comp, idx)
        lines.append('  %s [shape=plaintext, label="%d.%d"];'
                     % (ext, comp, idx))
        lines.append('  %s -- %s [style=dashed, label="%d"];'
                     % (ext, bid, slot))
    for comp in sorted(q.lifts):
        bid, x = q.lifts[comp]
        lines.append('  lift%d [shape=plaintext, label="lift %s"];'
                     % (comp, G.format(x)))
        lines.append('  lift%d -- %s [style=dotted];' % (comp, bid))
    lines.append("}")
    return "\n".join(lines) + "\n"
