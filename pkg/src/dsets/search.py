"""Exhaustive difference-set search by lifting images along a chief series.

For ``G = N_1 > N_2 > ... > N_r = 1`` the image of a difference set in
``G/N_i`` satisfies the contracted equation with ``|U| = |N_i|``.  Starting
from ``k*1`` in ``G/G`` each stage distributes every coefficient over the
fibre of the next quotient, keeps the vectors whose square is right, and
reduces them modulo a symmetry group of that quotient.

``mode="sound"`` reduces by quotient translations and by automorphisms of the
quotient induced from automorphisms of ``G`` fixing the kernel; every such
map lifts to ``G``, so no class is lost.  ``mode="fast"`` uses the full
automorphism group of each quotient, which may merge images whose lifts are
inequivalent, and is therefore not exhaustive.
"""

from __future__ import annotations

import itertools
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import comb
from pathlib import Path

import numpy as np

from . import kernels
from .automorphisms import AutomorphismGroup, automorphism_group
from .errors import CheckpointError, ParameterError, SearchError
from .group_ring import DesignParameters, GroupRingElement, SubsetOfGroup, is_difference_set
from .groups import ChiefSeries, FiniteGroup, GroupHomomorphism, chief_series, compose_projection, quotient
from .permgroup import StabChain, minimal_image

log = logging.getLogger(__name__)

MODES = ("sound", "fast")
ORACLE_CAP = 10**7
CHECKPOINT_ENV = "DSETS_CHECKPOINT_DIR"
MERGE_THRESHOLD = 8


@dataclass
class LiftingStage:
    quotient_hom: GroupHomomorphism = field(repr=False)
    images: list[GroupRingElement] = field(repr=False)
    stage_index: int

    @property
    def kernel_order(self) -> int:
        return self.quotient_hom.kernel.order

    def __len__(self) -> int:
        return len(self.images)


@dataclass
class SearchStats:
    stage_sizes: list[int] = field(default_factory=list)
    candidates: list[int] = field(default_factory=list)
    seconds: list[float] = field(default_factory=list)


def check_parameters(G: FiniteGroup, p: DesignParameters) -> None:
    if p.v != G.order:
        raise ParameterError("parameter mismatch", witness={"v": p.v, "|G|": G.order})
    if p.k * (p.k - 1) != p.lam * (p.v - 1):
        raise ParameterError("infeasible parameters", witness=str(p))


# -- symmetry groups of the quotients ----------------------------------------


def stage_chain(A: AutomorphismGroup, hom: GroupHomomorphism, mode: str = "sound") -> StabChain:
    """Group acting on coefficient vectors over ``hom.target``."""
    if mode not in MODES:
        raise ParameterError(f"unknown dedupe mode {mode!r}")
    Q = hom.target
    if hom.kernel.order == 1 and Q.order == A.group.order:
        # identity quotient: the full holomorph of G, relabelled along cosets
        if np.array_equal(hom.image_of, np.arange(Q.order)):
            return A.holomorph_chain
    trans = [tuple(int(x) for x in Q.mul[g]) for g in Q.generating_sequence]
    if mode == "sound":
        auts = A.induced_on_quotient(hom)
    else:
        auts = list(automorphism_group(Q, cap=max(Q.order, 1)).generators)
    return StabChain(Q.order, auts + trans)


# -- one expansion step ------------------------------------------------------

_CTX: dict = {}


def _fibres(upper: GroupHomomorphism, lower: GroupHomomorphism) -> np.ndarray:
    proj = compose_projection(upper, lower)
    fib = [[] for _ in range(upper.target.order)]
    for z, y in enumerate(proj):
        fib[int(y)].append(z)
    sizes = {len(f) for f in fib}
    if len(sizes) != 1:
        raise SearchError("non-uniform fibres between consecutive quotients", witness=sorted(sizes))
    return np.array(fib, dtype=np.int32)


def _lift_one(parent: np.ndarray, ctx: dict) -> list[bytes]:
    """Canonical forms of every admissible lift of ``parent``."""
    ys = [int(y) for y in np.flatnonzero(parent)]
    ys.sort(key=lambda y: (-int(parent[y]), y))
    fib = ctx["fibres"][ys] if ys else np.zeros((0, ctx["fibres"].shape[1]), dtype=np.int32)
    counts = [int(parent[y]) for y in ys]
    Q = ctx["Q"]
    raw = kernels.lift_preimages(Q.mul, Q.inv, Q.identity, fib, counts, ctx["cap"], ctx["t_id"], ctx["t_off"])
    chain = ctx["chain"]
    reps = raw
    if len(raw) > MERGE_THRESHOLD:
        reps = _orbit_representatives(raw, chain, parent[ctx["proj"]])
    out = set()
    for r in reps:
        vec = np.frombuffer(r, dtype=np.uint8)
        out.add(minimal_image(chain, vec).image.tobytes())
    return sorted(out)


def _orbit_representatives(raw: list[bytes], chain: StabChain, pulled: np.ndarray) -> list[bytes]:
    """One lift per orbit of the elements that fix the pulled-back parent.

    Such elements map lifts to equivalent vectors; whenever the image is
    itself a lift the two are merged.  Merging only equivalent vectors keeps
    the reduction sound even if the harvested generators miss part of the
    stabilizer.
    """
    gens = minimal_image(chain, pulled.astype(np.uint8), harvest=True).stabilizer
    index = {r: i for i, r in enumerate(raw)}
    parent = list(range(len(raw)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    vecs = np.frombuffer(b"".join(raw), dtype=np.uint8).reshape(len(raw), -1)
    for g in gens:
        ginv = np.empty(len(g), dtype=np.int64)
        ginv[np.asarray(g, dtype=np.int64)] = np.arange(len(g))
        moved = vecs[:, ginv]  # (g.x)[g[j]] = x[j]
        for i, row in enumerate(moved):
            j = index.get(row.tobytes())
            if j is not None:
                a, b = find(i), find(j)
                if a != b:
                    parent[max(a, b)] = min(a, b)
    return [r for i, r in enumerate(raw) if find(i) == i]


def _init_worker(ctx):
    _CTX.clear()
    _CTX.update(ctx)


def _lift_worker(parent):
    return _lift_one(parent, _CTX)


def expand_stage(
    s: LiftingStage,
    next_hom: GroupHomomorphism,
    p: DesignParameters,
    chain: StabChain,
    jobs: int = 1,
    done: list[bytes] | None = None,
    start: int = 0,
    on_progress=None,
    stats: SearchStats | None = None,
) -> LiftingStage:
    """Lift every image of ``s`` into ``next_hom.target`` and reduce.

    ``done``/``start`` resume a partially processed stage; ``on_progress``
    is called as ``on_progress(parents_done, found)`` after each parent.
    """
    Q = next_hom.target
    U = next_hom.kernel.order
    ctx = {
        "Q": Q,
        "fibres": _fibres(s.quotient_hom, next_hom),
        "proj": compose_projection(s.quotient_hom, next_hom).astype(np.int64),
        "cap": U,
        "t_id": p.k - p.lam + p.lam * U,
        "t_off": p.lam * U,
        "chain": chain,
    }
    found: dict[bytes, None] = dict.fromkeys(done or [])
    parents = [img.coeff.astype(np.uint8) for img in s.images]
    todo = parents[start:]
    t0 = time.perf_counter()
    if jobs > 1 and len(todo) > 1:
        with ProcessPoolExecutor(jobs, initializer=_init_worker, initargs=(ctx,)) as ex:
            results = ex.map(_lift_worker, todo, chunksize=max(1, len(todo) // (8 * jobs)))
            for i, keys in enumerate(results, start + 1):
                found.update(dict.fromkeys(keys))
                if on_progress:
                    on_progress(i, list(found))
    else:
        for i, parent in enumerate(todo, start + 1):
            found.update(dict.fromkeys(_lift_one(parent, ctx)))
            if on_progress:
                on_progress(i, list(found))
    keys = sorted(found)
    if stats is not None:
        stats.stage_sizes.append(len(keys))
        stats.seconds.append(time.perf_counter() - t0)
    images = [GroupRingElement(Q, np.frombuffer(k, dtype=np.uint8)) for k in keys]
    return LiftingStage(next_hom, images, s.stage_index + 1)


# -- checkpoints ------------------------------------------------------------


@dataclass
class Checkpoint:
    label: str
    stage_index: int
    params: str
    mode: str
    series: str
    parents_done: int
    parents_total: int
    vectors: list[bytes]

    @property
    def complete(self) -> bool:
        return self.parents_done >= self.parents_total


def _ckpt_path(directory: Path, label: str, p: DesignParameters, mode: str, idx: int) -> Path:
    safe = label.replace("/", "_") or "unlabelled"
    return directory / f"{safe}_{p.v}-{p.k}-{p.lam}_{mode}_stage{idx:02d}.txt"


def write_checkpoint(path: Path, ck: Checkpoint) -> None:
    tmp = path.with_suffix(".tmp")
    with open(tmp, "w") as fh:
        fh.write(f"STAGE {ck.label} {ck.stage_index}\n")
        fh.write(f"PARAMS {ck.params}\nMODE {ck.mode}\nSERIES {ck.series}\n")
        fh.write(f"DONE {ck.parents_done} {ck.parents_total}\n")
        for v in ck.vectors:
            fh.write(" ".join(str(x) for x in v) + "\n")
    os.replace(tmp, path)


def read_checkpoint(path: Path) -> Checkpoint:
    try:
        lines = Path(path).read_text().splitlines()
        tag, label, idx = lines[0].split()
        if tag != "STAGE":
            raise ValueError("missing STAGE header")
        head = {}
        for ln in lines[1:5]:
            key, _, val = ln.partition(" ")
            head[key] = val
        done, total = (int(x) for x in head["DONE"].split())
        vecs = [bytes(int(x) for x in ln.split()) for ln in lines[5:] if ln.strip()]
    except (ValueError, KeyError, IndexError) as e:
        raise CheckpointError(f"malformed checkpoint {path}: {e}")
    return Checkpoint(label, int(idx), head["PARAMS"], head["MODE"], head["SERIES"], done, total, vecs)


# -- driver -----------------------------------------------------------------


def enumerate_difference_sets(
    G: FiniteGroup,
    p: DesignParameters,
    mode: str = "sound",
    series: ChiefSeries | None = None,
    A: AutomorphismGroup | None = None,
    checkpoint_dir: str | Path | None = None,
    checkpoint_every: int = 200,
    jobs: int = 1,
    stats: SearchStats | None = None,
) -> list[SubsetOfGroup]:
    """One canonical representative per equivalence class of difference
    sets with parameters ``p`` in ``G``, sorted."""
    check_parameters(G, p)
    if mode not in MODES:
        raise ParameterError(f"unknown dedupe mode {mode!r}")
    series = series or chief_series(G)
    A = A or automorphism_group(G)
    homs = [quotient(G, N) for N in series.terms]
    sig = ",".join(str(x) for x in series.factor_orders) or "-"
    ckdir = Path(checkpoint_dir) if checkpoint_dir else None
    if ckdir:
        ckdir.mkdir(parents=True, exist_ok=True)

    stage = LiftingStage(homs[0], [GroupRingElement.scalar(homs[0].target, p.k)], 0)
    resume = _latest_checkpoint(ckdir, G.label, p, mode, sig, len(homs)) if ckdir else None
    if resume is not None:
        ck, idx = resume
        Q = homs[idx].target
        if ck.complete:
            stage = LiftingStage(homs[idx], [GroupRingElement(Q, np.frombuffer(v, np.uint8)) for v in ck.vectors], idx)
            pending = None
        else:
            prev = read_checkpoint(_ckpt_path(ckdir, G.label, p, mode, idx - 1)) if idx > 1 else None
            parents = (
                [GroupRingElement(homs[idx - 1].target, np.frombuffer(v, np.uint8)) for v in prev.vectors]
                if prev
                else stage.images
            )
            stage = LiftingStage(homs[idx - 1], parents, idx - 1)
            pending = ck
        log.info("resuming %s at stage %d", G.label, idx)
    else:
        pending = None

    while stage.stage_index < len(homs) - 1:
        i = stage.stage_index + 1
        nxt = homs[i]
        chain = stage_chain(A, nxt, mode)
        path = _ckpt_path(ckdir, G.label, p, mode, i) if ckdir else None
        total = len(stage.images)

        def progress(n_done, found, _path=path, _i=i, _total=total):
            if _path is not None and (n_done % checkpoint_every == 0 or n_done == _total):
                write_checkpoint(_path, Checkpoint(G.label, _i, str(p), mode, sig, n_done, _total, found))

        done = pending.vectors if pending else None
        start = pending.parents_done if pending else 0
        pending = None
        stage = expand_stage(stage, nxt, p, chain, jobs=jobs, done=done, start=start, on_progress=progress, stats=stats)
        if path is not None and total == 0:
            write_checkpoint(path, Checkpoint(G.label, i, str(p), mode, sig, 0, 0, []))
        log.info("%s stage %d (|Q|=%d): %d images", G.label, i, nxt.target.order, len(stage.images))

    out = []
    for img in stage.images:
        if int(img.coeff.max(initial=0)) > 1:
            raise SearchError("final stage produced a non 0/1 vector", witness=img.coeff.tolist())
        D = SubsetOfGroup.of(G, np.flatnonzero(img.coeff))
        if not is_difference_set(D, p):
            raise SearchError("lifted vector is not a difference set", witness=D.elements)
        out.append(D)
    return sorted(out, key=lambda D: D.elements)


def _latest_checkpoint(ckdir: Path, label, p, mode, sig, nstages):
    best = None
    for idx in range(1, nstages):
        path = _ckpt_path(ckdir, label, p, mode, idx)
        if not path.exists():
            continue
        ck = read_checkpoint(path)
        if ck.label != label or ck.params != str(p) or ck.mode != mode or ck.stage_index != idx:
            raise CheckpointError(f"checkpoint {path} does not match this run", witness=(ck.params, ck.mode))
        if ck.series != sig:
            raise CheckpointError(f"checkpoint {path} was written for another chief series", witness=ck.series)
        best = (ck, idx)
    return best


# -- oracle -----------------------------------------------------------------


def brute_force_difference_sets(G: FiniteGroup, p: DesignParameters, cap: int = ORACLE_CAP) -> list[SubsetOfGroup]:
    """Every k-subset satisfying the difference-set equation (no reduction)."""
    if p.v != G.order or p.k * (p.k - 1) != p.lam * (p.v - 1):
        return []
    n = comb(p.v, p.k)
    if n > cap:
        raise SearchError("brute force cap exceeded", witness=n)
    v, k = p.v, p.k
    mul, inv = G.mul, G.inv
    out = []
    combos = itertools.combinations(range(v), k)
    while True:
        block = np.array(list(itertools.islice(combos, 50000)), dtype=np.int64).reshape(-1, k)
        if not len(block):
            break
        diffs = mul[block[:, :, None], inv[block[:, None, :]]].reshape(len(block), -1)
        counts = np.zeros((len(block), v), dtype=np.int64)
        np.add.at(counts, (np.repeat(np.arange(len(block)), k * k), diffs.ravel()), 1)
        want = np.full(v, p.lam)
        want[G.identity] = k
        for row in block[(counts == want).all(axis=1)]:
            out.append(SubsetOfGroup.of(G, row))
    return out


def brute_force_oracle(G: FiniteGroup, p: DesignParameters, cap: int = ORACLE_CAP, A: AutomorphismGroup | None = None):
    """Brute-force search, reduced by listing orbits explicitly."""
    found = brute_force_difference_sets(G, p, cap)
    if not found:
        return []
    A = A or automorphism_group(G)
    auts = np.array(list(A.elements()), dtype=np.int64)
    seen: set[tuple[int, ...]] = set()
    reps = []
    for D in found:
        if D.elements in seen:
            continue
        orbit = explicit_orbit(G, auts, D.elements)
        seen |= orbit
        reps.append(SubsetOfGroup.of(G, min(orbit)))
    return sorted(reps, key=lambda D: D.elements)


def explicit_orbit(G: FiniteGroup, auts: np.ndarray, elements, translations: bool = True) -> set[tuple[int, ...]]:
    """All ``g * phi(D)`` as sorted tuples, by direct listing."""
    imgs = auts[:, list(elements)]
    if translations:
        imgs = G.mul[:, imgs].reshape(-1, len(elements))
    imgs = np.sort(imgs, axis=1)
    return {tuple(int(x) for x in r) for r in np.unique(imgs, axis=0)}
