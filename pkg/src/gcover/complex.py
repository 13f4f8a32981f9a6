"""The bounded move complex: vertices are canonical parameterizations,
edges are primitive moves (identified with their formal inverses), and
2-cells are relation-schema loops.

build_bounded computes the breadth-first closure of the seed under all
moves enumerable within bounds (the *bounded region*), then closes it
under relation-instance replays capped at max_cuts + slack cuts: every
vertex the replays reach gets its own instances attached in turn, so the
*slack region* carries cells too.  The slack region is necessarily
truncated — loops hugging the cut ceiling need not contract inside it —
so the verdict machinery never asserts that the whole built complex is
simply connected.  Instead it certifies the bounded statement: every
loop of the bounded region contracts within the slack extension
(prove_bounded_loops, via generator-image Tietze elimination).

Connectivity is checked against a move-free enumeration of valid
vertices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .groups import GroupTable
from .blocks import StandardBlock, monodromy
from .param import (Target, Parameterization, canonicalize, canonical_key,
                    key_of_canonical, seed, validate, in_seed_class,
                    ParamError)
from .moves import (Bounds, Step, apply_step, enumerate_moves,
                    inverse_closure_moves, MoveError)
from .relations import enumerate_all_instances, RelationInstance
from .presentation import (Presentation, prove_trivial, prove_words_trivial,
                           abelian_invariants)


class ComplexError(RuntimeError):
    pass


@dataclass
class Edge:
    eid: tuple
    src: bytes
    dst: bytes
    step: Step


@dataclass
class Cell:
    schema: str
    params: tuple
    base: bytes
    word: list[tuple[tuple, int]]   # (edge id, ±1)


@dataclass
class TwoComplex:
    target: Target
    bounds: Bounds
    basepoint: bytes
    vertices: dict[bytes, Parameterization]
    edges: dict[tuple, Edge]
    cells: list[Cell]
    bounded_vertices: set[bytes] = field(default_factory=set)
    bounded_edges: set[tuple] = field(default_factory=set)
    stats: dict = field(default_factory=dict)


def _edge_identity(src: bytes, step: Step, dst: bytes, inv_step: Step):
    """Identify a traversal with its reverse; returns (eid, sign)."""
    a = (step, src, dst)
    b = (inv_step, dst, src)
    if a <= b:
        return a, 1
    return b, -1


def _record_edge(cx: TwoComplex, src: bytes, step: Step, dst: bytes,
                 inv_step: Step):
    eid, sign = _edge_identity(src, step, dst, inv_step)
    if eid not in cx.edges:
        if sign == 1:
            cx.edges[eid] = Edge(eid, src, dst, step)
        else:
            cx.edges[eid] = Edge(eid, dst, src, inv_step)
    return eid, sign


def build_bounded(t: Target, bounds: Bounds,
                  start: Parameterization | None = None,
                  with_cells: bool = True,
                  cell_closure: bool = False) -> TwoComplex:
    p0, _, _ = canonicalize(start if start is not None else seed(t))
    base = key_of_canonical(p0)
    cx = TwoComplex(t, bounds, base, {base: p0}, {}, [])
    queue = [base]
    head = 0
    while head < len(queue):
        vk = queue[head]
        head += 1
        v = cx.vertices[vk]
        for step in enumerate_moves(v, bounds) + inverse_closure_moves(v, bounds):
            res = apply_step(v, step)
            wk = key_of_canonical(res.param)
            _record_edge(cx, vk, step, wk, res.inverse)
            if wk not in cx.vertices:
                if len(cx.vertices) >= bounds.vertex_budget:
                    raise ComplexError("vertex budget exhausted")
                cx.vertices[wk] = res.param
                queue.append(wk)
    cx.bounded_vertices = set(cx.vertices)
    cx.bounded_edges = set(cx.edges)
    cx.stats["bounded_vertices"] = len(cx.vertices)
    cx.stats["bounded_edges"] = len(cx.edges)
    if with_cells:
        _attach_cells(cx, queue, cell_closure)
    return cx


def _cell_dedup_key(word):
    """Cells found from different base vertices trace the same loop;
    identify them up to rotation and reversal."""
    w = tuple(word)
    best = None
    for rot in range(len(w)):
        r = w[rot:] + w[:rot]
        rr = tuple((e, -s) for e, s in reversed(r))
        for cand in (r, rr):
            if best is None or cand < best:
                best = cand
    return best


def _attach_cells(cx: TwoComplex, bfs_keys: list[bytes],
                  cell_closure: bool = False):
    """Attach relation-instance cells whose replay stays within
    max_cuts + slack cuts.  Instances are based at the BFS vertices; with
    cell_closure=True every vertex a replay reaches gets its own
    instances attached in turn (denser, far slower)."""
    from dataclasses import replace
    bounds = cx.bounds
    limit = bounds.max_cuts + bounds.slack
    # one extra cut of headroom covers every schema's parameter ranges;
    # the larger slack allowance only matters for replay transients
    ext = replace(bounds, max_cuts=min(bounds.max_cuts + 1, limit))
    skipped = 0
    seen_cells = set()
    # (vertex key, step) -> (result key, ApplyResult), shared between
    # instance enumeration and cell replay
    cache: dict[tuple, tuple] = {}
    queue = list(bfs_keys)
    n_base = len(queue)
    head = 0
    processed = set()
    while head < (len(queue) if cell_closure else n_base):
        vk = queue[head]
        head += 1
        if vk in processed:
            continue
        processed.add(vk)
        v = cx.vertices[vk]
        for inst in enumerate_all_instances(v, ext, cache, vk):
            word = _replay_cell(cx, vk, inst, limit, queue, cache)
            if word is None:
                skipped += 1
                continue
            key = _cell_dedup_key(word)
            if key in seen_cells:
                continue
            seen_cells.add(key)
            cx.cells.append(Cell(inst.schema, inst.params, vk, word))
    # replays that later exceeded the cut limit may have added vertices
    # no committed edge touches; drop them
    touched = {cx.basepoint}
    for e in cx.edges.values():
        touched.add(e.src)
        touched.add(e.dst)
    for vk in list(cx.vertices):
        if vk not in touched:
            del cx.vertices[vk]
    cx.stats["cells"] = len(cx.cells)
    cx.stats["cells_skipped"] = skipped
    cx.stats["vertices"] = len(cx.vertices)
    cx.stats["edges"] = len(cx.edges)


def _replay_cell(cx: TwoComplex, base: bytes, inst: RelationInstance,
                 cut_limit: int, queue: list, cache: dict):
    """Replay an instance loop, recording (possibly new) vertices and
    edges; returns the edge word, or None when the replay leaves the
    slack region (cut limit) or the vertex budget is exhausted."""
    from .moves import _CACHE_CAP
    curk = base
    cur = cx.vertices[base]
    pending = []   # (src key, step, dst key, inverse, dst param)
    for step in inst.steps:
        hit = cache.get((curk, step))
        if hit is None:
            res = apply_step(cur, step)
            wk = key_of_canonical(res.param)
            if len(cache) < _CACHE_CAP:
                cache[(curk, step)] = (wk, res)
        else:
            wk, res = hit
        if len(res.param.cuts) > cut_limit:
            return None
        if wk == curk and step == res.inverse:
            # identity rewrite (e.g. a P move by the identity element):
            # no edge, no word contribution
            continue
        pending.append((curk, step, wk, res.inverse, res.param))
        curk, cur = wk, res.param
    if curk != base:
        raise ComplexError("cell replay did not close: %s %s"
                           % (inst.schema, inst.params))
    for _src, _step, wk, _inv, param in pending:
        if wk not in cx.vertices:
            if len(cx.vertices) >= cx.bounds.vertex_budget:
                return None      # skip the cell, keep the build going
            cx.vertices[wk] = param
            queue.append(wk)
    return [_record_edge(cx, srck, step, wk, inv)
            for srck, step, wk, inv, _param in pending]


# ---------------------------------------------------------------------------
# fundamental group

def pi1_presentation(cx: TwoComplex):
    """Presentation of the fundamental group of the whole built complex
    at the basepoint, with generators numbered deterministically.

    The spanning tree prefers bounded-region edges, so that the loops of
    the bounded region are generated exactly by its non-tree edges.
    Returns (presentation, bounded generator ids).
    """
    adj: dict[bytes, list[tuple]] = {v: [] for v in cx.vertices}
    for eid, e in cx.edges.items():
        adj[e.src].append(eid)
        if e.dst != e.src:
            adj[e.dst].append(eid)
    tree: set[tuple] = set()
    seen = {cx.basepoint}
    # two passes: grow the tree over bounded edges first, then the rest
    for restrict in (True, False):
        queue = sorted(seen)
        head = 0
        while head < len(queue):
            v = queue[head]
            head += 1
            for eid in adj[v]:
                if restrict and eid not in cx.bounded_edges:
                    continue
                e = cx.edges[eid]
                w = e.dst if e.src == v else e.src
                if w not in seen:
                    seen.add(w)
                    tree.add(eid)
                    queue.append(w)
    if len(seen) != len(cx.vertices):
        raise ComplexError("built complex is not connected")
    gens = {}
    bounded_gens = set()
    for eid in sorted(cx.edges):
        if eid not in tree:
            gens[eid] = len(gens) + 1
            if eid in cx.bounded_edges:
                bounded_gens.add(gens[eid])
    relators = []
    for cell in cx.cells:
        word = [gens[eid] * sign for eid, sign in cell.word
                if eid not in tree]
        relators.append(tuple(word))
    return Presentation(len(gens), relators), bounded_gens


def prove_bounded_loops(cx: TwoComplex, coset_budget=None):
    """Certify that every loop of the bounded region contracts within
    the slack extension.

    Returns (verdict, report).  "ProvenTrivial" means each bounded-loop
    generator reduces to the identity in the fundamental group of the
    built complex; "Nontrivial" means some bounded loop provably does
    not contract even in the slack extension; "Unknown" otherwise.

    When the complex has no slack region at all (no replay left the
    bounded region) a ProvenTrivial verdict is equivalently a proof that
    the fundamental group of the whole built complex is trivial.
    """
    pres, bounded = pi1_presentation(cx)
    report = {
        "generators": pres.ngens,
        "bounded_generators": len(bounded),
        "relators": len(pres.relators),
        "pure": len(cx.vertices) == len(cx.bounded_vertices),
    }
    proven, refuted, unknown = prove_words_trivial(pres, sorted(bounded))
    report["proven"] = len(proven)
    report["refuted"] = len(refuted)
    report["unknown"] = len(unknown)
    if refuted:
        return "Nontrivial", report
    if not unknown:
        return "ProvenTrivial", report
    # fall back to the global certificates when nothing is truncated
    if report["pure"]:
        budget = coset_budget or cx.bounds.coset_budget
        verdict = prove_trivial(pres, budget)
        report["fallback"] = "global"
        return verdict, report
    return "Unknown", report


def prove_simply_connected(cx: TwoComplex, coset_budget=None) -> str:
    return prove_bounded_loops(cx, coset_budget)[0]


# ---------------------------------------------------------------------------
# move-free enumeration of valid vertices

def _trees_on(nodes: int):
    """All sets of edges forming a tree on {0..nodes-1}."""
    if nodes == 1:
        yield []
        return
    pairs = list(itertools.combinations(range(nodes), 2))
    for edges in itertools.combinations(pairs, nodes - 1):
        parent = list(range(nodes))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        ok = True
        for a, b in edges:
            ra, rb = find(a), find(b)
            if ra == rb:
                ok = False
                break
            parent[ra] = rb
        if ok:
            yield list(edges)


def _component_shapes(n_bound: int, n_cuts: int):
    """Shapes of one component's block tree: a list of block arities, a
    list of tree edges with chosen slots, and an external assignment.
    Yields (arities, [(blk_a, slot_a, blk_b, slot_b)], {bnd: (blk, slot)}).
    """
    nb = n_cuts + 1
    total = n_bound + 2 * n_cuts
    minar = 2 if nb > 1 else max(n_bound, 0)
    for arities in _compositions(total, nb, minar):
        for edges in _trees_on(nb):
            free = [list(range(1, a + 1)) for a in arities]
            for slot_choice in _slot_choices(arities, edges):
                occupied = set()
                for (a, sa, b, sb) in slot_choice:
                    occupied.add((a, sa))
                    occupied.add((b, sb))
                open_slots = [(i, s) for i in range(nb)
                              for s in range(1, arities[i] + 1)
                              if (i, s) not in occupied]
                if len(open_slots) != n_bound:
                    continue
                for perm in itertools.permutations(range(n_bound)):
                    ext = {perm[j] + 1: open_slots[j]
                           for j in range(n_bound)}
                    yield arities, slot_choice, ext


def _compositions(total: int, parts: int, minimum: int):
    if parts == 1:
        if total >= minimum:
            yield (total,)
        return
    for first in range(minimum, total - minimum * (parts - 1) + 1):
        for rest in _compositions(total - first, parts - 1, minimum):
            yield (first,) + rest


def _slot_choices(arities, edges):
    """Assign a slot on each side of every tree edge, injectively per
    block."""
    if not edges:
        yield []
        return
    per_edge = []
    for (a, b) in edges:
        per_edge.append([(a, sa, b, sb)
                         for sa in range(1, arities[a] + 1)
                         for sb in range(1, arities[b] + 1)])
    for combo in itertools.product(*per_edge):
        used = set()
        ok = True
        for (a, sa, b, sb) in combo:
            if (a, sa) in used or (b, sb) in used:
                ok = False
                break
            used.add((a, sa))
            used.add((b, sb))
        if ok:
            yield list(combo)


def _component_vertices(G: GroupTable, mono: tuple[int, ...], n_cuts: int):
    """All valid single-component fillings with exactly n_cuts cuts, as
    (blocks list of StandardBlock, cut side pairs, ext map)."""
    n = len(mono)
    if n == 0:
        if n_cuts != 0:
            return
        for lift in G.elements():
            yield [StandardBlock((), ())], [], {}, lift
        return
    for arities, cut_slots, ext in _component_shapes(n, n_cuts):
        nb = len(arities)
        total = sum(arities)
        slot_index = {}
        pos = 0
        for i, a in enumerate(arities):
            for s in range(1, a + 1):
                slot_index[(i, s)] = pos
                pos += 1
        ext_of_slot = {v: k for k, v in ext.items()}
        for h in itertools.product(G.elements(), repeat=total):
            g = [None] * total
            for bnd, (i, s) in ext.items():
                hi = h[slot_index[(i, s)]]
                m = mono[bnd - 1]
                g[slot_index[(i, s)]] = G.prod((G.inv(hi), G.inv(m), hi))
            ok = _fill_cut_labels(G, arities, cut_slots, slot_index, g, h)
            if not ok:
                continue
            blocks = []
            bad = False
            for i, a in enumerate(arities):
                gs = tuple(g[slot_index[(i, s)]] for s in range(1, a + 1))
                hs = tuple(h[slot_index[(i, s)]] for s in range(1, a + 1))
                if G.prod(gs) != G.identity:
                    bad = True
                    break
                blocks.append(StandardBlock(gs, hs))
            if bad:
                continue
            yield blocks, cut_slots, ext, None


def _fill_cut_labels(G, arities, cut_slots, slot_index, g, h):
    """Determine cut-slot g labels by peeling tree leaves; returns False
    when no consistent assignment exists."""
    remaining = list(cut_slots)
    while remaining:
        progress = False
        for edge in list(remaining):
            (a, sa, b, sb) = edge
            for (near, ns, far, fs) in ((a, sa, b, sb), (b, sb, a, sa)):
                idxs = [slot_index[(near, s)]
                        for s in range(1, arities[near] + 1)]
                unknown = [i for i in idxs if g[i] is None]
                if unknown != [slot_index[(near, ns)]]:
                    continue
                # product over the block forces the open slot
                before = G.identity
                after = G.identity
                target = slot_index[(near, ns)]
                acc = G.identity
                seen_target = False
                for i in idxs:
                    if i == target:
                        seen_target = True
                        before = acc
                        acc = G.identity
                    else:
                        acc = G.mul(acc, g[i])
                after = acc
                gc = G.mul(G.inv(before), G.inv(after))
                g[target] = gc
                hn = h[target]
                m_near = G.prod((hn, G.inv(gc), G.inv(hn)))
                fidx = slot_index[(far, fs)]
                hf = h[fidx]
                # admissibility forces the far label
                g[fidx] = G.prod((G.inv(hf), m_near, hf))
                remaining.remove(edge)
                progress = True
                break
            if progress:
                break
        if not progress:
            return False
    return True


def enumerate_valid_vertices(t: Target, bounds: Bounds) -> dict[bytes, Parameterization]:
    """Move-free enumeration: every canonical parameterization of t with
    at most max_cuts cuts, in the labelled-cover class of the seed.
    Multi-block trees use blocks of arity >= 2 only; boundaryless
    components are a single arity-0 block."""
    G = t.group
    comps = list(range(t.n_components))
    per_comp: list[dict[int, list]] = []
    for comp in comps:
        by_cuts = {}
        for j in range(bounds.max_cuts + 1):
            opts = list(_component_vertices(G, t.components[comp], j))
            if opts:
                by_cuts[j] = opts
        per_comp.append(by_cuts)
    out: dict[bytes, Parameterization] = {}
    for alloc in itertools.product(*(sorted(bc) for bc in per_comp)):
        if sum(alloc) > bounds.max_cuts:
            continue
        for choice in itertools.product(
                *(per_comp[c][alloc[c]] for c in comps)):
            p = _assemble(t, choice)
            if max(blk.n for blk in p.blocks.values()) > bounds.max_block_size:
                continue
            if not in_seed_class(p, t):
                continue
            problems = validate(p, t)
            if problems:
                raise ComplexError("enumerated vertex invalid: %s" % problems)
            out[canonical_key(p)] = canonicalize(p)[0]
    return out


def _assemble(t: Target, choice) -> Parameterization:
    G = t.group
    blocks = {}
    cuts = {}
    external = {}
    lifts = {}
    nb = 0
    nc = 0
    for comp, (blks, cut_slots, ext, lift) in enumerate(choice):
        ids = []
        for blk in blks:
            nb += 1
            bid = "b%d" % nb
            blocks[bid] = blk
            ids.append(bid)
        for (a, sa, b, sb) in cut_slots:
            nc += 1
            cuts["c%d" % nc] = ((ids[a], sa), (ids[b], sb))
        for bnd, (i, s) in ext.items():
            external[(comp, bnd)] = (ids[i], s)
        if lift is not None:
            lifts[comp] = (ids[0], lift)
    return Parameterization(G, blocks, cuts, external, lifts)


def check_connected(t: Target, bounds: Bounds,
                    cx: TwoComplex | None = None):
    """Verify that every enumerated valid vertex lies in the BFS closure
    of the seed.  Returns (ok, report dict)."""
    if cx is None:
        cx = build_bounded(t, bounds, with_cells=False)
    valid = enumerate_valid_vertices(t, bounds)
    bounded = cx.bounded_vertices or set(cx.vertices)
    missing = [k for k in valid if k not in bounded]
    report = {
        "valid_vertices": len(valid),
        "bfs_vertices": len(bounded),
        "missing": len(missing),
        "missing_keys": missing[:5],
    }
    return not missing, report
