"""Standard blocks: construction, monodromy, isomorphism, text form."""

import itertools

import pytest

from gcover.blocks import (BlockError, StandardBlock, block_text,
                           f_applicable, find_iso, glue_admissible,
                           make_block, monodromy, parse_block)
from gcover.groups import cyclic, symmetric


def all_blocks(G, n):
    """Every valid arity-n block over G (brute force)."""
    out = []
    for g in itertools.product(G.elements(), repeat=n):
        if G.prod(g) != G.identity:
            continue
        for h in itertools.product(G.elements(), repeat=n):
            out.append(StandardBlock(g, h))
    return out


def test_make_block_enforces_product():
    G = cyclic(3)
    make_block(G, (1, 2), (0, 0))
    with pytest.raises(BlockError):
        make_block(G, (1, 1), (0, 0))
    with pytest.raises(BlockError):
        make_block(G, (1, 2), (0,))


def test_monodromy_formula():
    G = symmetric(3)
    for b in all_blocks(G, 2)[:200]:
        for i in (1, 2):
            gi, hi = b.g[i - 1], b.h[i - 1]
            assert monodromy(G, b, i) == G.mul(G.mul(hi, G.inv(gi)), G.inv(hi))


def test_monodromy_product_conjugate_to_identity_for_matching_h():
    # with all h equal, the monodromies multiply to the identity in
    # reverse order of the g product
    G = symmetric(3)
    for b in all_blocks(G, 3):
        if len(set(b.h)) != 1:
            continue
        ms = [monodromy(G, b, i) for i in (3, 2, 1)]
        assert G.prod(ms) == G.identity


def test_find_iso_is_oracle_exact():
    """find_iso agrees with brute-force search for a witness."""
    G = cyclic(4)
    blocks = all_blocks(G, 2)
    for a in blocks[:12]:
        for b in blocks:
            witness = None
            for x in G.elements():
                if (all(G.conj(x, a.g[i]) == b.g[i] for i in range(2))
                        and all(G.mul(a.h[i], G.inv(x)) == b.h[i]
                                for i in range(2))):
                    witness = x
                    break
            assert (find_iso(G, a, b) is None) == (witness is None)
            if witness is not None:
                assert find_iso(G, a, b) == witness


def test_s2_block_classes_over_z2():
    """8 raw arity-2 blocks over Z/2 fall into 4 classes of size 2."""
    G = cyclic(2)
    blocks = all_blocks(G, 2)
    assert len(blocks) == 8
    classes = []
    for b in blocks:
        for cls in classes:
            if find_iso(G, cls[0], b) is not None:
                cls.append(b)
                break
        else:
            classes.append([b])
    assert len(classes) == 4
    assert all(len(cls) == 2 for cls in classes)


def test_glue_admissible_vs_monodromy():
    G = symmetric(3)
    blocks = all_blocks(G, 2)[:30]
    for a in blocks:
        for b in blocks:
            want = G.mul(monodromy(G, a, 1), monodromy(G, b, 2)) == G.identity
            assert glue_admissible(G, a, 1, b, 2) == want


def test_f_applicable():
    G = cyclic(4)
    a = StandardBlock((1, 3), (2, 0))
    b = StandardBlock((1, 3), (0, 2))
    assert f_applicable(G, a, 2, b, 1)        # 3*1=0, h matches
    assert not f_applicable(G, a, 1, b, 1)    # 1*1=2 != 0
    assert not f_applicable(G, a, 2, b, 2)    # h mismatch


@pytest.mark.parametrize("G,text", [
    (cyclic(5), "S3(1,2,2;0,4,3)"),
    (symmetric(3), "S2([2,1,3],[2,1,3];[1,2,3],[3,2,1])"),
    (cyclic(2), "S0(;)"),
])
def test_block_text_roundtrip(G, text):
    b = parse_block(G, text)
    assert block_text(G, b) == text
    assert parse_block(G, block_text(G, b)) == b


def test_parse_block_rejects_malformed():
    G = cyclic(2)
    for bad in ["X2(1,1;0,0)", "S2(1,1;0,0", "S2(1,1;0)", "S0(1;1)"]:
        with pytest.raises(BlockError):
            parse_block(G, bad)
