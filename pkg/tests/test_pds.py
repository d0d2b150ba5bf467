import io
from itertools import combinations

import pytest

import oracles
from conftest import cyclic
from dsets.automorphisms import automorphism_group
from dsets.errors import NotApplicable, ParameterError
from dsets.group_ring import DesignParameters, SubsetOfGroup
from dsets.library import get_group
from dsets.pds import (
    PdsParameters,
    all_pds_from_catalog,
    check_reversibility_invariant,
    dedupe_pds,
    derive_all,
    difference_profile,
    format_pds,
    is_partial_difference_set,
    is_regular,
    is_reversible,
    parse_pds_line,
    peel_identity,
    scan_translates,
    write_pds,
)
from dsets.search import enumerate_difference_sets

P16 = DesignParameters(16, 6, 2)
P96 = DesignParameters(96, 20, 4)


def brute_pds(mul, S, lam, mu):
    """Direct count of x y^-1 over distinct pairs."""
    c = oracles.difference_counts(mul, S)
    e = oracles._identity(mul)
    c[e] -= len(S)
    return all(c.get(g, 0) == (lam if g in S else mu) for g in range(len(mul)) if g != e)


@pytest.fixture(scope="module")
def z2_4():
    G = get_group("16.14")
    A = automorphism_group(G)
    return G, A, enumerate_difference_sets(G, P16, A=A)


def test_pentagon_set(z5):
    T = SubsetOfGroup.of(z5, [1, 4])
    prof = difference_profile(T)
    assert {g: prof.at(g) for g in range(1, 5) if prof.at(g)} == {2: 1, 3: 1}
    assert is_partial_difference_set(T, PdsParameters(5, 2, 0, 1))
    assert not is_partial_difference_set(T, PdsParameters(5, 2, 1, 1))
    assert is_regular(T)


def test_empty_set_is_vacuous(z5):
    assert is_partial_difference_set(SubsetOfGroup.of(z5, []), PdsParameters(5, 0, 0, 0))


def test_size_mismatch(z5):
    with pytest.raises(ParameterError, match="parameter mismatch"):
        is_partial_difference_set(SubsetOfGroup.of(z5, [1]), PdsParameters(5, 2, 0, 1))


def test_profile_sums_to_k_times_k_minus_one():
    G = get_group("12.3")
    for S in list(combinations(range(12), 5))[::37]:
        c = difference_profile(SubsetOfGroup.of(G, S)).counts
        assert c.sum() == 5 * 4 and c[G.identity] == 0


def test_pds_check_against_brute_force():
    for label in ("8.3", "9.2", "12.4"):
        G = get_group(label)
        for k in (2, 3, 4):
            for S in combinations(range(G.order), k):
                T = SubsetOfGroup.of(G, S)
                for lam, mu in ((0, 1), (1, 1), (0, 2), (1, 0)):
                    assert is_partial_difference_set(T, PdsParameters(G.order, k, lam, mu)) == brute_pds(G.mul, S, lam, mu)


def test_difference_sets_are_pds(z2_4):
    G, _, found = z2_4
    for D in found:
        for g in range(G.order):
            T = D.translate(g)
            assert is_partial_difference_set(T, PdsParameters(16, 6, 2, 2))


def test_reversibility(z5, z2_4):
    assert not is_reversible(SubsetOfGroup.of(z5, [1]))
    assert is_reversible(SubsetOfGroup.of(z5, [1, 4]))
    G = z2_4[0]
    for S in list(combinations(range(16), 5))[::101]:
        assert is_reversible(SubsetOfGroup.of(G, S))


def test_peel_and_readjoin(z2_4):
    G, _, found = z2_4
    full = PdsParameters(16, 6, 2, 2)
    e = G.identity
    T = next(D.translate(g) for D in found for g in range(16) if e in D.translate(g))
    S, q = peel_identity(T, full)
    assert q == PdsParameters(16, 5, 0, 2)
    assert e not in S and is_regular(S) and is_partial_difference_set(S, q)
    assert brute_pds(G.mul, S.elements, 0, 2)
    back = S.with_(e)
    assert back == T and is_partial_difference_set(back, full)


def test_peel_rejections(z5, z2_4):
    e = z5.identity
    with pytest.raises(NotApplicable, match="peel not applicable"):
        peel_identity(SubsetOfGroup.of(z5, [e]), PdsParameters(5, 1, 0, 0))
    with pytest.raises(NotApplicable, match="peel not applicable"):
        peel_identity(SubsetOfGroup.of(z5, [1, 4]), PdsParameters(5, 2, 0, 1))
    G, _, found = z2_4
    T = next(D.translate(g) for D in found for g in range(16) if G.identity not in D.translate(g))
    with pytest.raises(NotApplicable):
        peel_identity(T.with_(G.identity).without(T.elements[0]), PdsParameters(16, 6, 2, 2))


def test_scan_translates_in_z2_4(z2_4):
    G, _, found = z2_4
    for D in found:
        first, second = scan_translates(D, P16)
        # every element is an involution, so every translate is reversible
        assert len(first) == 10 and len(second) == 6
        assert all(is_partial_difference_set(T, PdsParameters(16, 6, 2, 2)) and is_regular(T) for T in first)
        assert all(is_partial_difference_set(S, PdsParameters(16, 5, 0, 2)) and is_regular(S) for S in second)


def test_scan_without_reversible_translates():
    G = cyclic(7)
    first, second = scan_translates(SubsetOfGroup.of(G, [1, 2, 4]), DesignParameters(7, 3, 1))
    assert first == [] and second == []
    with pytest.raises(NotApplicable, match="not a difference set"):
        scan_translates(SubsetOfGroup.of(G, [0, 1, 2]), DesignParameters(7, 3, 1))


def test_dedupe_pds(z5):
    A = automorphism_group(z5)
    T = SubsetOfGroup.of(z5, [1, 4])
    phi = next(p for p in A.elements() if p[1] != 1)
    assert len(dedupe_pds([T, T.apply(phi)], A)) == 1
    # translation is not part of the action: {1,4} and 2+{1,4} = {1,3} stay apart
    gT = T.translate(2)
    assert gT.elements == (1, 3)
    assert not is_partial_difference_set(gT, PdsParameters(5, 2, 0, 1))
    assert len(dedupe_pds([T, gT], A)) == 2
    auts = oracles.automorphisms(z5.mul)
    assert set(oracles.orbit(z5.mul, auts, (1, 3), False)).isdisjoint(oracles.orbit(z5.mul, auts, (1, 4), False))
    assert dedupe_pds([], A) == []


def test_all_pds_against_orbit_oracle(z2_4):
    G, A, found = z2_4
    auts = oracles.automorphisms_by_generators(G.mul, list(G.generating_sequence))
    translates = {D.translate(g).elements for D in found for g in range(16)}
    want = oracles.orbit_classes(G.mul, auts, translates, False)
    assert [T.elements for T in all_pds_from_catalog(found, A)] == want
    assert all_pds_from_catalog([], A) == []


def test_counts_invariant_under_equivalent_catalog(z2_4):
    G, A, found = z2_4
    gens = A.generators
    moved = [D.apply(gens[i % len(gens)]).translate(i + 3) for i, D in enumerate(found)]
    assert all_pds_from_catalog(moved, A) == all_pds_from_catalog(found, A)


@pytest.mark.parametrize("label, count", [("96.230", 32), ("96.231", 72)])
def test_order96_pds_counts(label, count):
    G = get_group(label)
    A = automorphism_group(G)
    found = enumerate_difference_sets(G, P96, A=A)
    fam = derive_all(label, found, P96, A)
    assert len(fam.pds) == count
    assert fam.regular == [] and fam.peeled == []
    for T in fam.pds:
        check_reversibility_invariant(T, PdsParameters(96, 20, 4, 4))


def test_reversibility_invariant_catches_bad_sets(z5):
    T = SubsetOfGroup.of(z5, [1, 2])
    check_reversibility_invariant(T, PdsParameters(5, 2, 1, 1))
    with pytest.raises(Exception, match="not reversible"):
        check_reversibility_invariant(T, PdsParameters(5, 2, 0, 1))


def test_lambda_ne_mu_implies_reversible_small_groups():
    for label in ("8.3", "8.4", "12.3", "12.4"):
        G = get_group(label)
        for k in (2, 3, 4, 5):
            for S in combinations(range(G.order), k):
                T = SubsetOfGroup.of(G, S)
                c = difference_profile(T).counts
                inside = {int(c[g]) for g in S if g != G.identity}
                outside = {int(c[g]) for g in range(G.order) if g not in T and g != G.identity}
                if len(inside) == 1 and len(outside) == 1 and inside != outside:
                    assert is_reversible(T)


def test_file_round_trip(z2_4):
    G, A, found = z2_4
    fam = derive_all("16.14", found, P16, A)
    buf = io.StringIO()
    write_pds(buf, fam)
    recs = [parse_pds_line(ln) for ln in buf.getvalue().splitlines()]
    assert len(recs) == len(fam.pds) + len(fam.peeled)
    for r in recs:
        T = SubsetOfGroup.of(G, r.elements)
        assert is_partial_difference_set(T, r.params)
        assert r.regular == is_regular(T)
    line = format_pds("16.14", fam.peeled[0], PdsParameters(16, 5, 0, 2))
    assert line.startswith("PDS 16.14 16 5 0 2 R ")
    with pytest.raises(Exception, match="malformed PDS line"):
        parse_pds_line("PDS 16.14 16 5 0 2 X 1,2")
