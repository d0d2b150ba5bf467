import io

import networkx as nx
import numpy as np
import pytest

from dsets.automorphisms import automorphism_group
from dsets.designs import (
    SymmetricDesign,
    block_intersections_constant,
    classify_designs,
    design_witness,
    develop_design,
    genuinely_nonabelian_in_corpus,
    incidence_graph,
    is_symmetric_design,
    read_design_catalog,
    write_design_catalog,
)
from dsets.errors import NotApplicable
from dsets.group_ring import DesignParameters, SubsetOfGroup
from dsets.library import get_group, labels
from dsets.search import enumerate_difference_sets

P16 = DesignParameters(16, 6, 2)
P96 = DesignParameters(96, 20, 4)


def nx_incidence(d):
    g = nx.Graph()
    g.add_nodes_from((("p", x) for x in range(d.v)), side=0)
    g.add_nodes_from((("b", i) for i in range(len(d.blocks))), side=1)
    g.add_edges_from((("p", x), ("b", i)) for i, blk in enumerate(d.blocks) for x in blk)
    return g


def vf2_isomorphic(d, e) -> bool:
    match = nx.algorithms.isomorphism.categorical_node_match("side", None)
    gm = nx.algorithms.isomorphism.GraphMatcher(nx_incidence(d), nx_incidence(e), node_match=match)
    return gm.is_isomorphic()


def gf2_rank(M) -> int:
    M = np.array(M, dtype=np.uint8) % 2
    rank = 0
    for col in range(M.shape[1]):
        rows = np.flatnonzero(M[rank:, col]) + rank
        if not len(rows):
            continue
        M[[rank, rows[0]]] = M[[rows[0], rank]]
        others = np.flatnonzero(M[:, col])
        others = others[others != rank]
        M[others] ^= M[rank]
        rank += 1
        if rank == M.shape[0]:
            break
    return rank


@pytest.fixture(scope="module")
def order16_designs():
    out = []
    for label in labels():
        if label.startswith("16."):
            G = get_group(label)
            out += [develop_design(G, D, str(i)) for i, D in enumerate(enumerate_difference_sets(G, P16))]
    return out


def test_fano_development(z7):
    d = develop_design(z7, SubsetOfGroup.of(z7, [1, 2, 4]), "0")
    assert len(d.blocks) == 7 and d.k == 3
    assert d.blocks[0] == (1, 2, 4)
    for x in range(7):
        for y in range(x + 1, 7):
            assert sum(1 for b in d.blocks if x in b and y in b) == 1
    assert is_symmetric_design(d, DesignParameters(7, 3, 1))
    assert d.provenance == ("Z7", "0")


def test_broken_designs(z7):
    d = develop_design(z7, SubsetOfGroup.of(z7, [1, 2, 4]))
    dup = SymmetricDesign(7, d.blocks[:-1] + d.blocks[:1])
    assert not is_symmetric_design(dup, DesignParameters(7, 3, 1))
    bad = SymmetricDesign(7, tuple(tuple(sorted((g + x) % 7 for x in (0, 1, 2))) for g in range(7)))
    kind, (x, y), count = design_witness(bad, DesignParameters(7, 3, 1))
    assert kind == "pair" and count == sum(1 for b in bad.blocks if x in b and y in b) != 1
    with pytest.raises(NotApplicable, match="not a difference set"):
        develop_design(z7, SubsetOfGroup.of(z7, [0, 1, 2]))


def test_block_sizes_and_dual_regularity(order16_designs):
    for d in order16_designs:
        assert len(d.blocks) == 16 and all(len(b) == 6 for b in d.blocks)
        assert is_symmetric_design(d, P16)
        assert block_intersections_constant(d, 2)


def test_incidence_graph_colours(z7):
    d = develop_design(z7, SubsetOfGroup.of(z7, [1, 2, 4]))
    g = incidence_graph(d)
    assert g.n == 14 and list(g.colors) == [0] * 7 + [1] * 7
    assert g.degrees.tolist() == [3] * 14


def test_order16_classes_against_independent_checks(order16_designs):
    cat = classify_designs(order16_designs)
    by_prov = {d.provenance: d for d in order16_designs}
    ranks = []
    for c in cat.classes:
        members = [by_prov[m] for m in c.members]
        # inside a class: an explicit isomorphism exists
        assert all(vf2_isomorphic(members[0], e) for e in members[1:])
        r = {gf2_rank(d.incidence()) for d in members}
        assert len(r) == 1
        ranks.append(r.pop())
    # across classes: the 2-rank of the incidence matrix tells them apart
    assert len(set(ranks)) == len(ranks)


def test_corpus_relative_nonabelian(order16_designs):
    cat = classify_designs(order16_designs)
    abelian = [lab for lab in labels() if lab.startswith("16.") and get_group(lab).is_abelian]
    flagged = genuinely_nonabelian_in_corpus(cat, abelian)
    for i, c in enumerate(cat.classes):
        assert (i in flagged) == all(label not in abelian for label, _ in c.members)
    host = next(lab for lab in abelian if any(d.provenance[0] == lab for d in order16_designs))
    one = [d for d in order16_designs if d.provenance[0] == host]
    assert genuinely_nonabelian_in_corpus(classify_designs(one), [host]) == []


def test_relabelled_copy_is_isomorphic(order16_designs):
    rng = np.random.default_rng(7)
    d = order16_designs[0]
    for _ in range(5):
        e = d.relabel(rng.permutation(16), rng.permutation(16))
        assert len(classify_designs([d, e])) == 1


def test_equivalent_difference_sets_give_isomorphic_designs():
    rng = np.random.default_rng(11)
    for label in ("16.3", "16.8", "96.230"):
        G = get_group(label)
        A = automorphism_group(G)
        p = P96 if G.order == 96 else P16
        auts = list(A.chain.elements()) if A.order < 5000 else [A.generators[i % len(A.generators)] for i in range(4)]
        for D in enumerate_difference_sets(G, p, A=A)[:3]:
            phi = auts[int(rng.integers(len(auts)))]
            E = D.apply(phi).translate(int(rng.integers(G.order)))
            assert len(classify_designs([develop_design(G, D), develop_design(G, E)])) == 1


@pytest.mark.parametrize("label", ["96.230", "96.231"])
def test_order96_design_rows(label):
    G = get_group(label)
    designs = [develop_design(G, D, str(i)) for i, D in enumerate(enumerate_difference_sets(G, P96))]
    cat = classify_designs(designs)
    assert len(cat) == 2
    assert all(is_symmetric_design(d, P96) for d in designs)


def test_parallel_classification_agrees(order16_designs):
    a = classify_designs(order16_designs)
    b = classify_designs(order16_designs, jobs=2)
    assert [c.members for c in a.classes] == [c.members for c in b.classes]


def test_mixed_parameters_rejected(z7, order16_designs):
    fano = develop_design(z7, SubsetOfGroup.of(z7, [1, 2, 4]))
    with pytest.raises(NotApplicable):
        classify_designs([fano, order16_designs[0]])
    assert len(classify_designs([])) == 0


def test_catalog_round_trip(order16_designs):
    cat = classify_designs(order16_designs)
    buf = io.StringIO()
    write_design_catalog(buf, cat, {d.provenance: d for d in order16_designs})
    recs = read_design_catalog(buf.getvalue().splitlines())
    assert len(recs) == len(cat)
    for rec, cls in zip(recs, cat.classes):
        assert rec.members == cls.members
        assert is_symmetric_design(rec.design, P16)
        assert rec.params == P16
