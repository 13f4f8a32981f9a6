"""Finitely presented groups: triviality certificates.

A presentation is a generator count plus relators, each relator a tuple
of nonzero ints (i means generator i-1, -i its inverse; 1-based to keep
signs meaningful).

prove_trivial returns one of three verdicts:

  "Nontrivial"     the abelianization is nonzero (Smith normal form
                   certificate), so the group cannot be trivial;
  "ProvenTrivial"  coset enumeration over the trivial subgroup closed
                   with a single coset;
  "Unknown"        the coset budget ran out before the table closed.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass
class Presentation:
    ngens: int
    relators: list[tuple[int, ...]]


def free_reduce(word):
    out = []
    for x in word:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def cyclic_reduce(word):
    w = list(free_reduce(word))
    while len(w) >= 2 and w[0] == -w[-1]:
        w = w[1:-1]
    return tuple(w)


def simplify(pres: Presentation) -> Presentation:
    """Tietze simplification: free/cyclic reduction, deduplication, and
    elimination of generators defined by short relators."""
    relators = {cyclic_reduce(r) for r in pres.relators}
    relators.discard(())
    sub: dict[int, tuple[int, ...]] = {}   # gen -> replacement word

    def apply_sub(word):
        out = []
        for x in word:
            g = abs(x)
            if g in sub:
                rep = sub[g] if x > 0 else tuple(-y for y in reversed(sub[g]))
                out.extend(rep)
            else:
                out.append(x)
        return free_reduce(out)

    changed = True
    while changed:
        changed = False
        # pick an elimination from the shortest usable relator
        best = None
        for r in sorted(relators, key=len):
            if len(r) > 4:
                break
            for i, x in enumerate(r):
                g = abs(x)
                rest = r[i + 1:] + r[:i]
                if any(abs(y) == g for y in rest):
                    continue
                # x * rest = 1  =>  g equals a word in other generators
                rep = tuple(-y for y in reversed(rest)) if x > 0 else rest
                best = (g, rep)
                break
            if best:
                break
        if best:
            g, rep = best
            sub = {k: apply_sub(v) for k, v in sub.items()}
            sub[g] = apply_sub(rep)
            relators = {cyclic_reduce(apply_sub(r)) for r in relators}
            relators.discard(())
            changed = True

    used = sorted({abs(x) for r in relators for x in r}
                  | (set(range(1, pres.ngens + 1)) - set(sub)))
    renum = {g: i + 1 for i, g in enumerate(used)}
    rels = [tuple(renum[abs(x)] * (1 if x > 0 else -1) for x in r)
            for r in sorted(relators, key=lambda r: (len(r), r))]
    return Presentation(len(used), rels)


# ---------------------------------------------------------------------------
# abelianization via Smith normal form

def abelian_invariants(pres: Presentation) -> list[int]:
    """Invariant factors != 1 of the abelianization (0 meaning a free
    factor).  Empty list iff the abelianization is trivial."""
    n = pres.ngens
    rows = []
    for r in pres.relators:
        vec = {}
        for x in r:
            g = abs(x) - 1
            vec[g] = vec.get(g, 0) + (1 if x > 0 else -1)
        vec = {g: c for g, c in vec.items() if c}
        if vec:
            rows.append(vec)
    # sparse elimination with unit pivots
    live_cols = set(range(n))
    rows = [dict(r) for r in rows]
    eliminated = 0
    progress = True
    while progress:
        progress = False
        for i, row in enumerate(rows):
            unit = next((g for g, c in row.items() if abs(c) == 1), None)
            if unit is None or not row:
                continue
            c0 = row[unit]
            for j, other in enumerate(rows):
                if j == i or unit not in other:
                    continue
                f = other[unit] * (1 if c0 == 1 else -1)
                for g, c in row.items():
                    nv = other.get(g, 0) - f * c
                    if nv:
                        other[g] = nv
                    else:
                        other.pop(g, None)
            live_cols.discard(unit)
            eliminated += 1
            rows[i] = {}
            progress = True
    rows = [r for r in rows if r]
    residual_cols = sorted({g for r in rows for g in r} & live_cols)
    free_rank = len(live_cols) - len(residual_cols)
    factors = [0] * free_rank
    if rows:
        from sympy import Matrix
        from sympy.matrices.normalforms import smith_normal_form
        idx = {g: j for j, g in enumerate(residual_cols)}
        M = Matrix(len(rows), len(residual_cols),
                   lambda i, j: rows[i].get(residual_cols[j], 0))
        S = smith_normal_form(M)
        diag = [int(S[i, i]) for i in range(min(S.shape))]
        nz = [abs(d) for d in diag if d != 0]
        factors = [d for d in nz if d != 1] + \
            [0] * (len(residual_cols) - len(nz)) + [0] * free_rank
    return factors


# ---------------------------------------------------------------------------
# HLT coset enumeration over the trivial subgroup

class _CosetTable:
    def __init__(self, ngens, budget):
        self.ngens = ngens
        self.budget = budget
        self.table = [[None] * (2 * ngens)]   # row per coset
        self.parent = [0]                      # union-find for coincidences
        self.defined = 1
        self.queue = []

    def col(self, x):
        g = abs(x) - 1
        return 2 * g + (0 if x > 0 else 1)

    def rep(self, a):
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def define(self, a, x):
        if self.defined >= self.budget:
            raise _BudgetExceeded
        b = len(self.table)
        self.table.append([None] * (2 * self.ngens))
        self.parent.append(b)
        self.defined += 1
        self.table[a][self.col(x)] = b
        self.table[b][self.col(-x)] = a
        return b

    def set_entry(self, a, x, b):
        ca, cb = self.col(x), self.col(-x)
        ex = self.table[a][ca]
        if ex is None:
            self.table[a][ca] = b
        elif self.rep(ex) != self.rep(b):
            self.queue.append((ex, b))
        ex = self.table[b][cb]
        if ex is None:
            self.table[b][cb] = a
        elif self.rep(ex) != self.rep(a):
            self.queue.append((ex, a))

    def merge_all(self):
        while self.queue:
            a, b = self.queue.pop()
            a, b = self.rep(a), self.rep(b)
            if a == b:
                continue
            if a > b:
                a, b = b, a
            self.parent[b] = a
            rowa, rowb = self.table[a], self.table[b]
            for c in range(2 * self.ngens):
                if rowb[c] is not None:
                    tgt = self.rep(rowb[c])
                    x = c // 2 + 1 if c % 2 == 0 else -(c // 2 + 1)
                    self.set_entry(a, x, tgt)
                    rowb[c] = None

    def scan_and_fill(self, a, word):
        # forward as far as possible, then backward, then fill the gap
        f, i = a, 0
        n = len(word)
        while i < n:
            nxt = self.table[f][self.col(word[i])]
            if nxt is None:
                break
            f = self.rep(nxt)
            i += 1
        if i == n:
            if f != a:
                self.queue.append((f, a))
                self.merge_all()
            return
        b, j = a, n
        while j > i:
            prv = self.table[b][self.col(-word[j - 1])]
            if prv is None:
                break
            b = self.rep(prv)
            j -= 1
        if j == i + 1:
            self.set_entry(f, word[i], b)
            self.merge_all()
        elif j == i:
            if f != b:
                self.queue.append((f, b))
                self.merge_all()
        else:
            nxt = self.define(f, word[i])
            self.set_entry(f, word[i], nxt)
            self.merge_all()


class _BudgetExceeded(Exception):
    pass


def coset_enumerate(pres: Presentation, budget: int = 100_000):
    """HLT enumeration of cosets of the trivial subgroup.  Returns the
    group order if the table closes within budget, else None."""
    relators = [r for r in (free_reduce(r) for r in pres.relators) if r]
    if pres.ngens == 0:
        return 1
    tab = _CosetTable(pres.ngens, budget)
    try:
        a = 0
        while True:
            if tab.rep(a) == a:
                for r in relators:
                    tab.scan_and_fill(a, r)
                    if tab.rep(a) != a:
                        break
                if tab.rep(a) == a:
                    for x in range(1, pres.ngens + 1):
                        for s in (x, -x):
                            if tab.table[a][tab.col(s)] is None:
                                nxt = tab.define(a, s)
                                tab.set_entry(a, s, nxt)
                                tab.merge_all()
            a += 1
            if a >= len(tab.table):
                break
    except _BudgetExceeded:
        return None
    return sum(1 for i in range(len(tab.table)) if tab.rep(i) == i)


def prove_trivial(pres: Presentation, coset_budget: int = 100_000) -> str:
    if abelian_invariants(pres):
        return "Nontrivial"
    simp = simplify(pres)
    if simp.ngens == 0:
        return "ProvenTrivial"
    order = coset_enumerate(simp, coset_budget)
    if order is None:
        return "Unknown"
    return "ProvenTrivial" if order == 1 else "Nontrivial"


# ---------------------------------------------------------------------------
# word triviality by indexed Tietze elimination with image tracking

def prove_words_trivial(pres: Presentation, targets,
                        max_sub_len: int = 512,
                        max_image_len: int = 2_000_000):
    """Certify, per generator in targets, that it equals the identity in
    the presented group.

    Eliminates generators that occur exactly once in some relator (the
    relator then defines them), with the substitution-length cap raised
    in stages.  Each target's image is resolved through the accumulated
    substitutions at the end.

    Returns (proven, refuted, unknown): sets of generator ids.  refuted
    is only populated when the residual presentation is a free group, in
    which case a nonempty reduced image is conclusive.
    """
    relators: dict[int, tuple[int, ...]] = {}
    occ: dict[int, set[int]] = {}
    for r in pres.relators:
        w = cyclic_reduce(r)
        if not w:
            continue
        rid = len(relators)
        relators[rid] = w
        for x in w:
            occ.setdefault(abs(x), set()).add(rid)

    sub: dict[int, tuple[int, ...]] = {}   # eliminated gen -> defining word

    def replace(word, g, rep):
        out = []
        for x in word:
            if abs(x) == g:
                out.extend(rep if x > 0 else
                           tuple(-y for y in reversed(rep)))
            else:
                out.append(x)
        return cyclic_reduce(out)

    def eliminate(rid, i, dirty):
        w = relators.pop(rid)
        x = w[i]
        g = abs(x)
        rest = w[i + 1:] + w[:i]
        rep = tuple(-y for y in reversed(rest)) if x > 0 else rest
        for y in w:
            s = occ.get(abs(y))
            if s is not None:
                s.discard(rid)
        sub[g] = rep
        for other in list(occ.get(g, ())):
            ow = relators.pop(other)
            for y in ow:
                s = occ.get(abs(y))
                if s is not None:
                    s.discard(other)
            nw = replace(ow, g, rep)
            if nw:
                relators[other] = nw
                for y in nw:
                    occ.setdefault(abs(y), set()).add(other)
                dirty.append(other)
        occ.pop(g, None)

    def best_slot(w, cap, cost_cap):
        """Cheapest eliminable generator in w: occurs once in w, and
        substituting it elsewhere grows the total length by at most
        cost_cap."""
        best = None
        for i, x in enumerate(w):
            g = abs(x)
            if sum(1 for y in w if abs(y) == g) != 1:
                continue
            cost = (len(w) - 2) * (len(occ.get(g, ())) - 1)
            if cost > cost_cap:
                continue
            if best is None or cost < best[1]:
                best = (i, cost)
        return best[0] if best else None

    caps = [1, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64, 96, 128, 192,
            256, 384, 512]
    length_budget = 40 * (sum(len(w) for w in relators.values()) + 1000)
    for cap in (c for c in caps if c <= max_sub_len):
        if sum(len(w) for w in relators.values()) > length_budget:
            break
        for cost_cap in (0, 40, 20000):
            dirty = sorted(relators)
            head = 0
            while head < len(dirty):
                rid = dirty[head]
                head += 1
                w = relators.get(rid)
                if w is None or len(w) - 1 > cap:
                    continue
                i = best_slot(w, cap, cost_cap)
                if i is not None:
                    eliminate(rid, i, dirty)

    memo: dict[int, tuple[int, ...]] = {}

    class _TooLong(Exception):
        pass

    def resolve(root):
        stack = [root]
        while stack:
            g = stack[-1]
            if g in memo:
                stack.pop()
                continue
            rep = sub.get(g)
            if rep is None:
                memo[g] = (g,)
                stack.pop()
                continue
            pending = [abs(x) for x in rep if abs(x) not in memo]
            if pending:
                stack.extend(pending)
                continue
            out = []
            for x in rep:
                part = memo[abs(x)]
                out.extend(part if x > 0 else
                           tuple(-y for y in reversed(part)))
                if len(out) > max_image_len:
                    raise _TooLong()
            memo[g] = free_reduce(out)
            stack.pop()
        return memo[root]

    # Dehn-style shortening against the residual relators: any image
    # substring covering more than half of a (cyclically rotated)
    # relator is replaced by the shorter complement.
    fragments = {}
    for w in relators.values():
        for v in (w, tuple(-y for y in reversed(w))):
            n = len(w)
            k = n // 2 + 1
            for rot in range(n):
                r = v[rot:] + v[:rot]
                head = r[:k]
                rest = tuple(-y for y in reversed(r[k:]))
                old = fragments.get(head)
                if old is None or len(rest) < len(old):
                    fragments[head] = rest
    frag_len = max((len(f) for f in fragments), default=0)

    def dehn_reduce(word):
        w = list(word)
        changed = True
        while changed and w:
            changed = False
            for i in range(len(w)):
                for k in range(min(frag_len, len(w) - i), 1, -1):
                    rest = fragments.get(tuple(w[i:i + k]))
                    if rest is not None and len(rest) < k:
                        w[i:i + k] = rest
                        w = list(free_reduce(w))
                        changed = True
                        break
                if changed:
                    break
        return tuple(w)

    residual_free = not relators
    proven, refuted, unknown = set(), set(), set()
    for t in targets:
        try:
            img = resolve(t)
        except (_TooLong, RecursionError):
            unknown.add(t)
            continue
        if img and relators:
            img = dehn_reduce(img)
        if not img:
            proven.add(t)
        elif residual_free:
            refuted.add(t)
        else:
            unknown.add(t)
    return proven, refuted, unknown
