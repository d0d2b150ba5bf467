from itertools import combinations

import numpy as np
import pytest

import oracles
from conftest import cyclic
from dsets.automorphisms import automorphism_group
from dsets import search
from dsets.equivalence import are_equivalent, canonical_subset, canonical_vector
from dsets.errors import CheckpointError, ParameterError
from dsets.group_ring import (
    DesignParameters,
    GroupRingElement,
    SubsetOfGroup,
    project_image,
    satisfies_image_equation,
)
from dsets.groups import all_chief_series, chief_series, normal_subgroups, quotient
from dsets.library import get_group
from dsets.search import (
    LiftingStage,
    SearchStats,
    brute_force_difference_sets,
    brute_force_oracle,
    enumerate_difference_sets,
    expand_stage,
    read_checkpoint,
    stage_chain,
)

P96 = DesignParameters(96, 20, 4)
P16 = DesignParameters(16, 6, 2)


def canon(sets, A):
    return sorted(canonical_subset(D, A).elements for D in sets)


def test_fano(z7):
    p = DesignParameters(7, 3, 1)
    found = enumerate_difference_sets(z7, p)
    assert len(found) == 1
    A = automorphism_group(z7)
    assert are_equivalent(found[0], SubsetOfGroup.of(z7, [1, 2, 4]), A)


def test_cyclic_16_has_none():
    G = cyclic(16)
    assert enumerate_difference_sets(G, P16) == []
    assert brute_force_difference_sets(G, P16) == []
    # the oracle scans all 8008 six-subsets directly
    assert not any(oracles.is_difference_set(G.mul, S, 2) for S in combinations(range(16), 6))


def test_oracle_examples(z7):
    assert len(brute_force_oracle(z7, DesignParameters(7, 3, 1))) == 1
    assert len(brute_force_oracle(cyclic(13), DesignParameters(13, 4, 1))) == 1
    assert brute_force_oracle(z7, DesignParameters(7, 3, 2)) == []


def test_brute_force_matches_reference_scan():
    for label in ("16.3", "16.9", "15.1"):
        G = get_group(label)
        for p in (P16,) if G.order == 16 else (DesignParameters(15, 7, 3),):
            got = [D.elements for D in brute_force_difference_sets(G, p)]
            want = [S for S in combinations(range(G.order), p.k) if oracles.is_difference_set(G.mul, S, p.lam)]
            assert got == want


def test_parameter_errors(z7):
    with pytest.raises(ParameterError, match="infeasible parameters"):
        enumerate_difference_sets(z7, DesignParameters(7, 3, 2))
    with pytest.raises(ParameterError, match="parameter mismatch"):
        enumerate_difference_sets(z7, DesignParameters(13, 4, 1))
    with pytest.raises(ParameterError):
        enumerate_difference_sets(z7, DesignParameters(7, 3, 1), mode="quick")


def test_96_230_has_two_classes(g96_230):
    G, A = g96_230
    found = enumerate_difference_sets(G, P96, A=A)
    assert len(found) == 2
    assert not are_equivalent(found[0], found[1], A)


def test_first_stage_over_z2(g96_230):
    G, A = g96_230
    N = next(N for N in normal_subgroups(G) if N.order == 48)
    top = quotient(G, G.whole())
    nxt = quotient(G, N)
    s = LiftingStage(top, [GroupRingElement.scalar(top.target, 20)], 0)
    out = expand_stage(s, nxt, P96, stage_chain(A, nxt))
    # by hand: a^2 + (20-a)^2 = 16 + 4*48 and 2a(20-a) = 4*48
    sols = [a for a in range(49) if a * a + (20 - a) ** 2 == 208 and 2 * a * (20 - a) == 192]
    assert sols == [8, 12]
    assert len(out) == 1
    assert sorted(out.images[0].coeff.tolist()) == [8, 12]


def test_empty_stage_stays_empty(g96_230):
    G, A = g96_230
    top = quotient(G, G.whole())
    N = next(N for N in normal_subgroups(G) if N.order == 48)
    out = expand_stage(LiftingStage(top, [], 0), quotient(G, N), P96, stage_chain(A, quotient(G, N)))
    assert out.images == [] and out.stage_index == 1


@pytest.mark.parametrize("label", ["96.230", "16.3", "16.13"])
def test_stage_invariants(label):
    G = get_group(label)
    A = automorphism_group(G)
    p = P96 if G.order == 96 else P16
    homs = [quotient(G, N) for N in chief_series(G).terms]
    stage = LiftingStage(homs[0], [GroupRingElement.scalar(homs[0].target, p.k)], 0)
    for nxt in homs[1:]:
        stage = expand_stage(stage, nxt, p, stage_chain(A, nxt))
        U = nxt.kernel.order
        for img in stage.images:
            assert img.size == p.k
            assert img.coeff.max() <= U
            assert satisfies_image_equation(img, p, U)
        chain = stage_chain(A, nxt)
        keys = {canonical_vector(chain, img.coeff.astype(np.uint8)).tobytes() for img in stage.images}
        assert len(keys) == len(stage.images)
    assert all(img.coeff.max() <= 1 for img in stage.images)


@pytest.mark.parametrize("label", ["16.3", "16.5", "16.8", "16.9", "16.13", "8.3"])
def test_result_independent_of_chief_series(label):
    G = get_group(label)
    A = automorphism_group(G)
    p = P16 if G.order == 16 else DesignParameters(8, 7, 6)
    ref = [D.elements for D in enumerate_difference_sets(G, p, A=A)]
    for cs in all_chief_series(G):
        assert [D.elements for D in enumerate_difference_sets(G, p, A=A, series=cs)] == ref


@pytest.mark.parametrize("label", ["16.2", "16.3", "16.10", "16.14"])
def test_results_satisfy_image_equation_everywhere(label):
    G = get_group(label)
    for D in enumerate_difference_sets(G, P16):
        for N in normal_subgroups(G):
            img = project_image(quotient(G, N), D.as_element())
            assert satisfies_image_equation(img, P16, N.order)


def test_fast_mode_never_finds_more():
    for label in ("16.3", "16.11", "96.230"):
        G = get_group(label)
        A = automorphism_group(G)
        p = P96 if G.order == 96 else P16
        sound = canon(enumerate_difference_sets(G, p, A=A), A)
        fast = canon(enumerate_difference_sets(G, p, A=A, mode="fast"), A)
        assert set(fast) <= set(sound)


def test_parallel_matches_sequential(g96_230):
    G, A = g96_230
    a = enumerate_difference_sets(G, P96, A=A)
    b = enumerate_difference_sets(G, P96, A=A, jobs=2)
    assert a == b


def test_stats_record_stage_sizes(g96_230):
    G, A = g96_230
    stats = SearchStats()
    enumerate_difference_sets(G, P96, A=A, stats=stats)
    assert len(stats.stage_sizes) == len(chief_series(G).terms) - 1
    assert stats.stage_sizes[-1] == 2


# -- checkpoints --------------------------------------------------------------


def test_checkpoints_written_and_reused(tmp_path, g96_230):
    G, A = g96_230
    ref = enumerate_difference_sets(G, P96, A=A, checkpoint_dir=tmp_path)
    files = sorted(tmp_path.glob("*.txt"))
    assert len(files) == len(chief_series(G).terms) - 1
    last = read_checkpoint(files[-1])
    assert last.complete and len(last.vectors) == 2
    assert files[0].read_text().startswith("STAGE 96.230 1\n")
    # a complete final checkpoint short-circuits the search
    assert enumerate_difference_sets(G, P96, A=A, checkpoint_dir=tmp_path) == ref


class Crash(Exception):
    pass


def test_resume_after_crash_mid_stage(tmp_path, monkeypatch, g96_230):
    G, A = g96_230
    stats = SearchStats()
    ref = enumerate_difference_sets(G, P96, A=A, stats=stats)
    widest = int(np.argmax([1] + stats.stage_sizes[:-1]))  # stage whose parents are most numerous
    target = widest + 1
    real = search.write_checkpoint
    seen = {}

    def dying(path, ck):
        real(path, ck)
        if ck.stage_index == target and 0 < ck.parents_done < ck.parents_total:
            seen["ck"] = ck
            raise Crash

    monkeypatch.setattr(search, "write_checkpoint", dying)
    with pytest.raises(Crash):
        enumerate_difference_sets(G, P96, A=A, checkpoint_dir=tmp_path, checkpoint_every=1)
    monkeypatch.setattr(search, "write_checkpoint", real)
    ck = read_checkpoint(search._ckpt_path(tmp_path, G.label, P96, "sound", target))
    assert not ck.complete and ck.parents_done == seen["ck"].parents_done
    assert enumerate_difference_sets(G, P96, A=A, checkpoint_dir=tmp_path) == ref
    assert read_checkpoint(search._ckpt_path(tmp_path, G.label, P96, "sound", target)).complete


def test_checkpoint_mismatch(tmp_path, g96_230):
    G, A = g96_230
    enumerate_difference_sets(G, P96, A=A, checkpoint_dir=tmp_path)
    f = sorted(tmp_path.glob("*stage01.txt"))[0]
    f.write_text(f.read_text().replace("SERIES ", "SERIES 7,"))
    with pytest.raises(CheckpointError):
        enumerate_difference_sets(G, P96, A=A, checkpoint_dir=tmp_path)
    f.write_text("garbage\n")
    with pytest.raises(CheckpointError):
        enumerate_difference_sets(G, P96, A=A, checkpoint_dir=tmp_path)


def test_checkpoint_dir_from_environment(tmp_path, monkeypatch):
    from dsets import cli

    monkeypatch.setenv("DSETS_CHECKPOINT_DIR", str(tmp_path / "ck"))
    monkeypatch.chdir(tmp_path)
    assert cli.run(["enumerate", "--group", "16.3", "--params", "16,6,2"]) == 0
    assert list((tmp_path / "ck").glob("16.3_*"))
