"""Standard blocks: spheres with n ordered boundary circles, each boundary
carrying a pair of group labels (g_i, h_i), subject to g_1 * ... * g_n = 1.

The g_i record the gluing data of the cover over the block; the h_i fix a
sheet labelling over each boundary.  The boundary monodromy seen through
that labelling is m_i = h_i * g_i^-1 * h_i^-1.
"""

from __future__ import annotations

from dataclasses import dataclass

from .groups import GroupTable


class BlockError(ValueError):
    pass


@dataclass(frozen=True)
class StandardBlock:
    g: tuple[int, ...]
    h: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.g)


def make_block(G: GroupTable, g, h) -> StandardBlock:
    g = tuple(g)
    h = tuple(h)
    if len(g) != len(h):
        raise BlockError("g and h must have the same length")
    if G.prod(g) != G.identity:
        raise BlockError("product of g labels is not the identity")
    return StandardBlock(g, h)


def monodromy(G: GroupTable, b: StandardBlock, i: int) -> int:
    """Boundary monodromy at slot i (1-based): h_i * g_i^-1 * h_i^-1."""
    gi = b.g[i - 1]
    hi = b.h[i - 1]
    return G.prod((hi, G.inv(gi), G.inv(hi)))


def find_iso(G: GroupTable, a: StandardBlock, b: StandardBlock):
    """Return the unique x with x*g_i*x^-1 = g_i' and h_i*x^-1 = h_i' for
    all i, or None if the blocks are not isomorphic.

    Arity-0 blocks are all isomorphic; the identity witnesses it.
    """
    if a.n != b.n:
        return None
    if a.n == 0:
        return G.identity
    # h_1 * x^-1 = h_1' forces x
    x = G.mul(G.inv(b.h[0]), a.h[0])
    for i in range(a.n):
        if G.conj(x, a.g[i]) != b.g[i]:
            return None
        if G.mul(a.h[i], G.inv(x)) != b.h[i]:
            return None
    return x


def glue_admissible(G: GroupTable, a: StandardBlock, i: int,
                    b: StandardBlock, j: int) -> bool:
    """Whether slot i of a may be glued to slot j of b: the two boundary
    monodromies must be mutually inverse."""
    return G.mul(monodromy(G, a, i), monodromy(G, b, j)) == G.identity


def f_applicable(G: GroupTable, a: StandardBlock, i: int,
                 b: StandardBlock, j: int) -> bool:
    """Whether a cut joining slot i of a to slot j of b can be removed
    directly: g_i * g_j' = 1 and h_i = h_j'."""
    return (G.mul(a.g[i - 1], b.g[j - 1]) == G.identity
            and a.h[i - 1] == b.h[j - 1])


def block_text(G: GroupTable, b: StandardBlock) -> str:
    gs = ",".join(G.format(x) for x in b.g)
    hs = ",".join(G.format(x) for x in b.h)
    return "S%d(%s;%s)" % (b.n, gs, hs)


def parse_block(G: GroupTable, text: str) -> StandardBlock:
    text = text.strip()
    if not text.startswith("S"):
        raise BlockError("block text must start with 'S'")
    lp = text.index("(")
    n = int(text[1:lp])
    if not text.endswith(")"):
        raise BlockError("unbalanced block text")
    body = text[lp + 1:-1]
    if n == 0:
        if body.strip(" ;"):
            raise BlockError("arity-0 block takes no labels")
        return make_block(G, (), ())
    gpart, hpart = body.split(";")
    g = [G.parse(t) for t in _split_elems(gpart)]
    h = [G.parse(t) for t in _split_elems(hpart)]
    if len(g) != n or len(h) != n:
        raise BlockError("expected %d labels on each side" % n)
    return make_block(G, g, h)


def _split_elems(text: str):
    """Split a comma-separated element list, respecting [..] brackets."""
    out, depth, cur = [], 0, []
    for ch in text:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch == "," and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if cur or out:
        out.append("".join(cur))
    return [t for t in (s.strip() for s in out) if t]
