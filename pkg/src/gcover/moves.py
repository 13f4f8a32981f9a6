"""Moves on parameterizations.

Primitive moves:

  Z     rotate a block's slots by one (slot i -> i+1, last -> first)
  B     braid two adjacent slots of a block
  F     remove a cut joining the last slot of one block to the first
        slot of another, when the labels match directly
  Finv  split a block at position k, introducing a cut with h-label y
  P     change a block's sheet labelling by x (or translate a lift)
  T     re-choose the common h-label of a matched cut

Zinv and Binv are the formal inverses of Z and B.  Every application
returns the canonicalized result together with id maps and a step that
undoes it, so paths and loops can be tracked through relabelling.

Composite moves (emitted as primitive step sequences):

  GF    remove any directly-removable cut, rotating both blocks first
  GB    braid two adjacent label intervals of a block
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .blocks import StandardBlock, monodromy, f_applicable
from .param import (Parameterization, canonicalize, canonical_key,
                    key_of_canonical, serialize)

# shared (vertex key, step) caches stop growing past this many entries
_CACHE_CAP = 400_000

Step = tuple  # (kind, params...)


class MoveError(ValueError):
    pass


@dataclass(frozen=True)
class Bounds:
    max_cuts: int = 2
    max_block_size: int = 6
    vertex_budget: int = 200_000
    coset_budget: int = 100_000
    slack: int = 3


@dataclass
class ApplyResult:
    param: Parameterization          # canonical
    block_map: dict[str, str]        # surviving blocks, old id -> new id
    cut_map: dict[str, str]
    inverse: Step                    # undoes the move, in result ids
    extras: dict = field(default_factory=dict)


def _finish(raw: Parameterization, pre_b: dict, pre_c: dict, mk_inverse,
            extras_pre: dict | None = None) -> ApplyResult:
    q, bm, cm = canonicalize(raw)
    block_map = {old: bm[new] for old, new in pre_b.items()}
    cut_map = {old: cm[new] for old, new in pre_c.items()}
    extras = {}
    for k, v in (extras_pre or {}).items():
        if k.endswith("cut"):
            extras[k] = cm[v]
        else:
            extras[k] = bm[v]
    return ApplyResult(q, block_map, cut_map, mk_inverse(bm, cm), extras)


def _remap_slots(p: Parameterization, table: dict):
    """Rewrite cut/external sides according to table: side -> side."""
    for cid, (sa, sb) in list(p.cuts.items()):
        p.cuts[cid] = (table.get(sa, sa), table.get(sb, sb))
    for key, side in list(p.external.items()):
        p.external[key] = table.get(side, side)


def _ident_maps(p: Parameterization):
    return ({b: b for b in p.blocks}, {c: c for c in p.cuts})


def apply_Z(p: Parameterization, bid: str, inverse=False) -> ApplyResult:
    blk = p.blocks.get(bid)
    if blk is None:
        raise MoveError("no block %s" % bid)
    n = blk.n
    if n < 1:
        raise MoveError("Z needs arity >= 1")
    raw = p.copy()
    if not inverse:
        raw.blocks[bid] = StandardBlock(blk.g[-1:] + blk.g[:-1],
                                        blk.h[-1:] + blk.h[:-1])
        table = {(bid, i): (bid, i % n + 1) for i in range(1, n + 1)}
    else:
        raw.blocks[bid] = StandardBlock(blk.g[1:] + blk.g[:1],
                                        blk.h[1:] + blk.h[:1])
        table = {(bid, i): (bid, (i - 2) % n + 1) for i in range(1, n + 1)}
    _remap_slots(raw, table)
    pre_b, pre_c = _ident_maps(p)
    kind = "Z" if inverse else "Zinv"
    return _finish(raw, pre_b, pre_c, lambda bm, cm: (kind, bm[bid]))


def apply_B(p: Parameterization, bid: str, i: int, inverse=False) -> ApplyResult:
    blk = p.blocks.get(bid)
    if blk is None:
        raise MoveError("no block %s" % bid)
    G = p.group
    n = blk.n
    if not (1 <= i <= n - 1):
        raise MoveError("B position %d out of range for arity %d" % (i, n))
    g = list(blk.g)
    h = list(blk.h)
    a, b = g[i - 1], g[i]
    c, d = h[i - 1], h[i]
    if not inverse:
        g[i - 1], g[i] = G.prod((a, b, G.inv(a))), a
        h[i - 1], h[i] = G.mul(d, G.inv(a)), c
    else:
        g[i - 1], g[i] = b, G.prod((G.inv(b), a, b))
        h[i - 1], h[i] = d, G.mul(c, b)
    raw = p.copy()
    raw.blocks[bid] = StandardBlock(tuple(g), tuple(h))
    table = {(bid, i): (bid, i + 1), (bid, i + 1): (bid, i)}
    _remap_slots(raw, table)
    pre_b, pre_c = _ident_maps(p)
    kind = "B" if inverse else "Binv"
    return _finish(raw, pre_b, pre_c, lambda bm, cm: (kind, bm[bid], i))


def apply_F(p: Parameterization, cid: str) -> ApplyResult:
    G = p.group
    if cid not in p.cuts:
        raise MoveError("no cut %s" % cid)
    sa, sb = p.cuts[cid]
    orient = None
    for (la, lslot), (rb, rslot) in ((sa, sb), (sb, sa)):
        if (lslot == p.blocks[la].n and rslot == 1
                and f_applicable(G, p.blocks[la], lslot, p.blocks[rb], rslot)):
            orient = (la, rb)
            break
    if orient is None:
        for (la, lslot), (rb, rslot) in ((sa, sb), (sb, sa)):
            if lslot == p.blocks[la].n and rslot == 1:
                ha = p.blocks[la].h[lslot - 1]
                hb = p.blocks[rb].h[rslot - 1]
                if ha != hb:
                    raise MoveError(
                        "cut %s has mismatched lifts: h=%s vs h=%s"
                        % (cid, G.format(ha), G.format(hb)))
        raise MoveError("cut %s is not directly removable" % cid)
    la, rb = orient
    A, B = p.blocks[la], p.blocks[rb]
    k = A.n - 1
    y = A.h[-1]
    merged = StandardBlock(A.g[:-1] + B.g[1:], A.h[:-1] + B.h[1:])
    raw = p.copy()
    del raw.cuts[cid]
    del raw.blocks[rb]
    raw.blocks[la] = merged
    table = {(rb, s): (la, k + s - 1) for s in range(2, B.n + 1)}
    _remap_slots(raw, table)
    for comp, (b, x) in list(raw.lifts.items()):
        if b == rb:
            raise MoveError("cannot merge a lift-carrying block")
    pre_b = {b: b for b in p.blocks if b != rb}
    pre_b[rb] = la   # both sides land on the merged block
    pre_c = {c: c for c in p.cuts if c != cid}
    return _finish(raw, pre_b, pre_c,
                   lambda bm, cm: ("Finv", bm[la], k, y),
                   {"merged": la})


def apply_Finv(p: Parameterization, bid: str, k: int, y: int) -> ApplyResult:
    blk = p.blocks.get(bid)
    if blk is None:
        raise MoveError("no block %s" % bid)
    G = p.group
    n = blk.n
    if not (1 <= k <= n - 1):
        raise MoveError("Finv position %d out of range for arity %d" % (k, n))
    x = G.inv(G.prod(blk.g[:k]))
    left = StandardBlock(blk.g[:k] + (x,), blk.h[:k] + (y,))
    right = StandardBlock((G.inv(x),) + blk.g[k:], (y,) + blk.h[k:])
    new_bid = "_split"
    new_cid = "_new"
    raw = p.copy()
    raw.blocks[bid] = left
    raw.blocks[new_bid] = right
    table = {(bid, k + j): (new_bid, 1 + j) for j in range(1, n - k + 1)}
    _remap_slots(raw, table)
    raw.cuts[new_cid] = ((bid, k + 1), (new_bid, 1))
    pre_b, pre_c = _ident_maps(p)
    return _finish(raw, pre_b, pre_c,
                   lambda bm, cm: ("F", cm[new_cid]),
                   {"left": bid, "right": new_bid, "new_cut": new_cid})


def apply_P(p: Parameterization, bid: str, x: int) -> ApplyResult:
    blk = p.blocks.get(bid)
    if blk is None:
        raise MoveError("no block %s" % bid)
    G = p.group
    raw = p.copy()
    if blk.n == 0:
        for comp, (b, lift) in raw.lifts.items():
            if b == bid:
                raw.lifts[comp] = (bid, G.mul(x, lift))
                break
        else:
            raise MoveError("arity-0 block %s carries no lift" % bid)
    else:
        xi = G.inv(x)
        raw.blocks[bid] = StandardBlock(
            tuple(G.conj(x, g) for g in blk.g),
            tuple(G.mul(h, xi) for h in blk.h))
    pre_b, pre_c = _ident_maps(p)
    xi = G.inv(x)
    return _finish(raw, pre_b, pre_c, lambda bm, cm: ("P", bm[bid], xi))


def apply_T(p: Parameterization, cid: str, z: int) -> ApplyResult:
    if cid not in p.cuts:
        raise MoveError("no cut %s" % cid)
    (ba, sa), (bb, sb) = p.cuts[cid]
    A, B = p.blocks[ba], p.blocks[bb]
    y = A.h[sa - 1]
    if y != B.h[sb - 1]:
        raise MoveError("cut %s h-labels are not matched" % cid)
    raw = p.copy()
    raw.blocks[ba] = StandardBlock(A.g, A.h[:sa - 1] + (z,) + A.h[sa:])
    B2 = raw.blocks[bb]   # ba may equal... blocks are distinct in a forest
    raw.blocks[bb] = StandardBlock(B2.g, B2.h[:sb - 1] + (z,) + B2.h[sb:])
    pre_b, pre_c = _ident_maps(p)
    return _finish(raw, pre_b, pre_c, lambda bm, cm: ("T", cm[cid], y))


_DISPATCH = {
    "Z": lambda p, s: apply_Z(p, s[1]),
    "Zinv": lambda p, s: apply_Z(p, s[1], inverse=True),
    "B": lambda p, s: apply_B(p, s[1], s[2]),
    "Binv": lambda p, s: apply_B(p, s[1], s[2], inverse=True),
    "F": lambda p, s: apply_F(p, s[1]),
    "Finv": lambda p, s: apply_Finv(p, s[1], s[2], s[3]),
    "P": lambda p, s: apply_P(p, s[1], s[2]),
    "T": lambda p, s: apply_T(p, s[1], s[2]),
}


def apply_step(p: Parameterization, step: Step) -> ApplyResult:
    try:
        fn = _DISPATCH[step[0]]
    except KeyError:
        raise MoveError("unknown move kind %r" % (step[0],)) from None
    return fn(p, step)


class PathBuilder:
    """Apply a sequence of steps, keeping the running parameterization and
    the recorded (step, inverse) pairs.  Entity ids must be threaded by
    the caller through each ApplyResult's maps.

    An optional shared `cache` maps (vertex key, step) to (result key,
    ApplyResult); repeated traversals of the same edge then skip both the
    rewrite and the re-canonicalization.  Pass `key` when p is already in
    canonical form to skip the initial canonicalization too."""

    def __init__(self, p: Parameterization, cache: dict | None = None,
                 key: bytes | None = None):
        if key is None:
            q, bm, cm = canonicalize(p)
            self.p = q
            self.start_block_map = bm
            self.start_cut_map = cm
            self.key = None if cache is None else key_of_canonical(q)
        else:
            self.p = p
            self.start_block_map = {b: b for b in p.blocks}
            self.start_cut_map = {c: c for c in p.cuts}
            self.key = key
        self.cache = cache
        self.steps: list[Step] = []
        self.inverses: list[Step] = []

    def do(self, *step) -> ApplyResult:
        step = tuple(step)
        if self.cache is None:
            res = apply_step(self.p, step)
        else:
            hit = self.cache.get((self.key, step))
            if hit is None:
                res = apply_step(self.p, step)
                wk = key_of_canonical(res.param)
                if len(self.cache) < _CACHE_CAP:
                    self.cache[(self.key, step)] = (wk, res)
            else:
                wk, res = hit
            self.key = wk
        self.steps.append(step)
        self.inverses.append(res.inverse)
        self.p = res.param
        return res

    def reversed_inverse_steps(self) -> list[Step]:
        return list(reversed(self.inverses))


# ---------------------------------------------------------------------------
# composite moves

def _retrack(track: dict | None, res: ApplyResult):
    if not track:
        return
    for k in list(track):
        if k.endswith("cut"):
            track[k] = res.cut_map[track[k]]
        else:
            track[k] = res.block_map[track[k]]


def do_GF(pb: PathBuilder, cid: str, left_bid: str,
          track: dict | None = None) -> dict:
    """Remove cut cid with left_bid as the left (slot-rotated-to-last)
    block, via Z rotations followed by F.  Returns {"merged": id}.
    Entity ids named in `track` are threaded through the relabellings."""
    p = pb.p
    if cid not in p.cuts:
        raise MoveError("no cut %s" % cid)
    sa, sb = p.cuts[cid]
    if sa[0] == left_bid:
        (lb, lslot), (rb, rslot) = sa, sb
    elif sb[0] == left_bid:
        (lb, lslot), (rb, rslot) = sb, sa
    else:
        raise MoveError("block %s is not a side of cut %s" % (left_bid, cid))
    n_l = p.blocks[lb].n
    n_r = p.blocks[rb].n
    for _ in range((n_l - lslot) % n_l):
        res = pb.do("Z", lb)
        lb, rb, cid = res.block_map[lb], res.block_map[rb], res.cut_map[cid]
        _retrack(track, res)
    for _ in range((1 - rslot) % n_r):
        res = pb.do("Z", rb)
        lb, rb, cid = res.block_map[lb], res.block_map[rb], res.cut_map[cid]
        _retrack(track, res)
    res = pb.do("F", cid)
    _retrack(track, res)
    return {"merged": res.extras["merged"]}


def _stable_extract(pb: PathBuilder, bid: str, s: int, e: int, y: int,
                    track: dict) -> tuple[str, str, str]:
    """Split slots s..e (1-based, contiguous, proper) of block bid off
    into their own block, leaving the cut in their place in the outer
    block's slot order.  Returns (outer id, inner id, cut id); `track`
    maps names to entity ids and is updated through relabellings."""
    n = pb.p.blocks[bid].n
    if not (1 <= s <= e <= n) or (s == 1 and e == n):
        raise MoveError("cannot extract slots %d..%d of arity %d" % (s, e, n))
    t = n - e

    def retrack(res):
        for k in list(track):
            if k.endswith("cut"):
                track[k] = res.cut_map[track[k]]
            else:
                track[k] = res.block_map[track[k]]

    for _ in range(t):
        res = pb.do("Z", bid)
        bid = res.block_map[bid]
        retrack(res)
    res = pb.do("Finv", bid, t + s - 1, y)
    outer, inner, cut = (res.extras["left"], res.extras["right"],
                         res.extras["new_cut"])
    retrack(res)
    # put the new cut where the extracted slots sat in the outer block
    for _ in range(s % (t + s)):
        res = pb.do("Z", outer)
        outer, inner = res.block_map[outer], res.block_map[inner]
        cut = res.cut_map[cut]
        retrack(res)
    return outer, inner, cut


def do_GB(pb: PathBuilder, bid: str, i2: tuple[int, int],
          i3: tuple[int, int]) -> str:
    """Braid the interval i2 = (s2, e2) over the adjacent interval
    i3 = (s3, e3) = (e2+1, e3) of block bid.  Returns the final block id.

    Net effect on labels: with z the product of the g labels over i2,
    the i3 labels move in front of i2 as (z*g*z^-1, h*z^-1) and the i2
    labels follow unchanged; slots outside both intervals keep their
    positions.
    """
    p = pb.p
    blk = p.blocks.get(bid)
    if blk is None:
        raise MoveError("no block %s" % bid)
    s2, e2 = i2
    s3, e3 = i3
    N = blk.n
    if not (1 <= s2 <= e2 < s3 <= e3 <= N) or s3 != e2 + 1:
        raise MoveError("intervals must be nonempty, adjacent, in order")
    l = e2 - s2 + 1
    n3 = e3 - s3 + 1
    m = N - e3
    y = blk.h[s2 - 1]
    v = blk.h[s3 - 1]
    w = y

    track: dict = {}
    if s2 == 1 and e3 == N:
        mid = bid
        off = 0
    else:
        outer, mid, c1 = _stable_extract(pb, bid, s2, e3, y, track)
        track["outer"] = outer
        track["c1_cut"] = c1
        off = 1

    hub, b3, c2 = _stable_extract(pb, mid, off + l + 1, off + l + n3, v,
                                  track)
    track["b3"] = b3
    track["c2_cut"] = c2
    hub, b2, c3 = _stable_extract(pb, hub, off + 1, off + l, w, track)
    track["b2"] = b2
    track["c3_cut"] = c3
    track["hub"] = hub

    def advance(res):
        for k in list(track):
            if k.endswith("cut"):
                track[k] = res.cut_map[track[k]]
            else:
                track[k] = res.block_map[track[k]]

    advance(pb.do("B", track["hub"], off + 1))
    # the b2 block's cut slot carries z^-1, z = product of g over i2
    G = pb.p.group
    z = G.inv(pb.p.blocks[track["b2"]].g[0])
    advance(pb.do("P", track["b3"], z))

    c2 = track.pop("c2_cut")
    track.pop("b3")
    merged = do_GF(pb, c2, track["hub"], track)
    track["hub"] = merged["merged"]
    c3 = track.pop("c3_cut")
    track.pop("b2")
    merged = do_GF(pb, c3, track["hub"], track)
    track["hub"] = merged["merged"]
    if off:
        c1 = track.pop("c1_cut")
        track.pop("hub")
        merged = do_GF(pb, c1, track["outer"], track)
        final = merged["merged"]
        for _ in range(m):
            res = pb.do("Zinv", final)
            final = res.block_map[final]
        return final
    return track["hub"]


# ---------------------------------------------------------------------------
# enumeration

def enumerate_moves(p: Parameterization, bounds: Bounds) -> list[Step]:
    """Deterministic list of moves applicable at p within bounds.
    Bounds gate enumeration only; apply_step accepts any legal move."""
    G = p.group
    out: list[Step] = []
    bids = sorted(p.blocks, key=lambda b: int(b[1:]))
    cids = sorted(p.cuts, key=lambda c: int(c[1:]))
    for bid in bids:
        if p.blocks[bid].n >= 1:
            out.append(("Z", bid))
    if len(p.cuts) < bounds.max_cuts:
        # a braid edge is budgeted like its defining composite, which
        # transits one extra cut (split, base braid, merge); braids whose
        # slots carry cuts are reached through that composite, so only
        # external boundary pairs are enumerated directly
        cut_slots = {side for pair in p.cuts.values() for side in pair}
        for bid in bids:
            for i in range(1, p.blocks[bid].n):
                if (bid, i) in cut_slots or (bid, i + 1) in cut_slots:
                    continue
                out.append(("B", bid, i))
    for cid in cids:
        sa, sb = p.cuts[cid]
        merged_n = p.blocks[sa[0]].n + p.blocks[sb[0]].n - 2
        if merged_n > bounds.max_block_size:
            continue
        for (la, ls), (rb, rs) in ((sa, sb), (sb, sa)):
            if (ls == p.blocks[la].n and rs == 1
                    and f_applicable(G, p.blocks[la], ls, p.blocks[rb], rs)):
                out.append(("F", cid))
                break
    if len(p.cuts) < bounds.max_cuts:
        for bid in bids:
            n = p.blocks[bid].n
            for k in range(1, n):
                if k + 1 > bounds.max_block_size or n - k + 1 > bounds.max_block_size:
                    continue
                for y in G.elements():
                    out.append(("Finv", bid, k, y))
    for bid in bids:
        for x in G.elements():
            if x == G.identity:
                continue   # identity rewrite, not an edge
            out.append(("P", bid, x))
    for cid in cids:
        (ba, sa), (bb, sb) = p.cuts[cid]
        y = p.blocks[ba].h[sa - 1]
        if y == p.blocks[bb].h[sb - 1]:
            for z in G.elements():
                if z == y:
                    continue   # identity rewrite, not an edge
                out.append(("T", cid, z))
    return out


def inverse_closure_moves(p: Parameterization, bounds: Bounds) -> list[Step]:
    """Braid inverses, applied alongside enumerate_moves when computing
    reachability (B is not its own inverse, and Binv is not otherwise
    enumerated); gated like B."""
    out = []
    if len(p.cuts) < bounds.max_cuts:
        cut_slots = {side for pair in p.cuts.values() for side in pair}
        for bid in sorted(p.blocks, key=lambda b: int(b[1:])):
            for i in range(1, p.blocks[bid].n):
                if (bid, i) in cut_slots or (bid, i + 1) in cut_slots:
                    continue
                out.append(("Binv", bid, i))
    return out
