"""Finite groups as explicit multiplication tables.

Group elements are plain ints indexing into the table.  Each group knows
how to parse and print its elements in a family-specific notation:

  cyclic(k)     decimal residues                 "0", "1", ...
  symmetric(k)  one-line permutation notation    "[2,1,3]"
  dihedral(k)   rotation/reflection words        "r^2*s^1"
  from_table    bare element names from the file
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field


class GroupError(ValueError):
    pass


@dataclass(frozen=True)
class GroupTable:
    kind: str
    order: int
    table: tuple[tuple[int, ...], ...]   # table[a][b] = a*b
    names: tuple[str, ...]
    inv_table: tuple[int, ...] = field(init=False)
    identity: int = field(init=False)

    def __post_init__(self):
        n = self.order
        ident = None
        for e in range(n):
            if all(self.table[e][b] == b and self.table[b][e] == b for b in range(n)):
                ident = e
                break
        if ident is None:
            raise GroupError("no identity element")
        inv = [None] * n
        for a in range(n):
            for b in range(n):
                if self.table[a][b] == ident and self.table[b][a] == ident:
                    inv[a] = b
                    break
            if inv[a] is None:
                raise GroupError("element %d has no inverse" % a)
        object.__setattr__(self, "identity", ident)
        object.__setattr__(self, "inv_table", tuple(inv))
        if n <= 48:
            self._check_axioms()

    def _check_axioms(self):
        n = self.order
        if len(self.table) != n or any(len(row) != n for row in self.table):
            raise GroupError("table is not square")
        if any(x < 0 or x >= n for row in self.table for x in row):
            raise GroupError("table entry out of range")
        if len(set(self.names)) != n:
            raise GroupError("element names are not distinct")
        for row in self.table:
            if len(set(row)) != n:
                raise GroupError("row is not a permutation")
        for col in zip(*self.table):
            if len(set(col)) != n:
                raise GroupError("column is not a permutation")
        t = self.table
        for a in range(n):
            for b in range(n):
                ab = t[a][b]
                for c in range(n):
                    if t[ab][c] != t[a][t[b][c]]:
                        raise GroupError(
                            "associativity fails at (%d,%d,%d)" % (a, b, c))

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self.inv_table[a]

    def prod(self, elems) -> int:
        out = self.identity
        for e in elems:
            out = self.table[out][e]
        return out

    def conj(self, x: int, a: int) -> int:
        """x * a * x^-1."""
        return self.table[self.table[x][a]][self.inv_table[x]]

    def elements(self):
        return range(self.order)

    def format(self, a: int) -> str:
        return self.names[a]

    def parse(self, text: str) -> int:
        text = text.strip()
        if self.kind == "symmetric":
            # tolerate whitespace inside the bracket form
            text = text.replace(" ", "")
        try:
            return self.names.index(text)
        except ValueError:
            raise GroupError("unknown element %r of %s group of order %d"
                             % (text, self.kind, self.order)) from None


def cyclic(k: int) -> GroupTable:
    if k < 1:
        raise GroupError("cyclic group needs k >= 1")
    table = tuple(tuple((a + b) % k for b in range(k)) for a in range(k))
    return GroupTable("cyclic", k, table, tuple(str(a) for a in range(k)))


def symmetric(k: int) -> GroupTable:
    """Permutations of {1..k} in one-line notation, lexicographic order.

    Composition is (a*b)(i) = a(b(i)): the right factor acts first.
    """
    if k < 1 or k > 5:
        raise GroupError("symmetric group supported for 1 <= k <= 5")
    perms = list(itertools.permutations(range(1, k + 1)))
    index = {p: i for i, p in enumerate(perms)}
    table = tuple(
        tuple(index[tuple(a[b[i] - 1] for i in range(k))] for b in perms)
        for a in perms)
    names = tuple("[" + ",".join(str(x) for x in p) + "]" for p in perms)
    return GroupTable("symmetric", len(perms), table, names)


def dihedral(k: int) -> GroupTable:
    """Order-2k dihedral group; element (a, b) is r^a * s^b with s*r = r^-1*s."""
    if k < 1:
        raise GroupError("dihedral group needs k >= 1")
    n = 2 * k

    def idx(a, b):
        return a * 2 + b

    def mul(p, q):
        a1, b1 = p
        a2, b2 = q
        if b1 == 0:
            return ((a1 + a2) % k, b2)
        return ((a1 - a2) % k, 1 - b2)

    elems = [(a, b) for a in range(k) for b in range(2)]
    table = tuple(tuple(idx(*mul(p, q)) for q in elems) for p in elems)
    names = tuple("r^%d*s^%d" % (a, b) for a, b in elems)
    return GroupTable("dihedral", n, table, names)


def from_table_text(text: str) -> GroupTable:
    """Parse an explicit multiplication table.

    Line 1: the order n.  Line 2: n whitespace-separated element names.
    Then n lines of n indices; row a column b holds the index of a*b.
    """
    lines = [ln for ln in (l.strip() for l in text.splitlines())
             if ln and not ln.startswith("#")]
    if not lines:
        raise GroupError("empty table file")
    try:
        n = int(lines[0])
    except ValueError:
        raise GroupError("first line must be the group order") from None
    if len(lines) < n + 2:
        raise GroupError("expected %d lines after the order" % (n + 1))
    names = tuple(lines[1].split())
    if len(names) != n:
        raise GroupError("expected %d element names, got %d" % (n, len(names)))
    rows = []
    for ln in lines[2:2 + n]:
        row = tuple(int(x) for x in ln.split())
        if len(row) != n:
            raise GroupError("table row has %d entries, expected %d"
                             % (len(row), n))
        rows.append(row)
    return GroupTable("table", n, tuple(rows), names)


def from_table_file(path: str) -> GroupTable:
    with open(path, "r", encoding="utf-8") as fh:
        return from_table_text(fh.read())


def group_from_config(cfg: dict) -> GroupTable:
    """Build a group from a {"kind": ..., ...} config mapping."""
    kind = cfg.get("kind")
    if kind == "cyclic":
        return cyclic(int(cfg["k"]))
    if kind == "symmetric":
        return symmetric(int(cfg["k"]))
    if kind == "dihedral":
        return dihedral(int(cfg["k"]))
    if kind == "table":
        return from_table_file(cfg["path"])
    raise GroupError("unknown group kind %r" % (kind,))
