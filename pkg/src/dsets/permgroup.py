"""Permutation groups on ``{0..n-1}`` via stabilizer chains.

The chain always uses the natural point order as its base: level ``b`` is
the pointwise stabilizer of ``0..b-1``.  That fixed base is what lets
:func:`minimal_image` compute lexicographically extreme images without any
base change.

A permutation ``p`` maps ``x`` to ``p[x]``; ``compose(p, q)`` applies ``p``
first.  A permutation acts on a vector ``s`` by moving values with points:
``(p.s)[p[x]] = s[x]``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import OrbitTooLarge

Perm = tuple

DEFAULT_IMAGE_BUDGET = 10**8


def compose(p: Sequence[int], q: Sequence[int]) -> Perm:
    """Apply ``p`` then ``q``."""
    return tuple(q[x] for x in p)


def inverse(p: Sequence[int]) -> Perm:
    out = [0] * len(p)
    for i, x in enumerate(p):
        out[x] = i
    return tuple(out)


def identity(n: int) -> Perm:
    return tuple(range(n))


def first_moved(p: Sequence[int]) -> int:
    for i, x in enumerate(p):
        if i != x:
            return i
    return -1


class _Level:
    __slots__ = ("base", "trans", "itrans", "order", "done", "_arrays")

    def __init__(self, base: int, n: int):
        self.base = base
        ident = identity(n)
        self.trans = {base: ident}
        self.itrans = {base: ident}
        self.order = [base]
        self.done: set = set()
        self._arrays = None


class StabChain:
    """Base and strong generating set with base ``0, 1, ..., n-1``.

    ``order`` may be given when the group order is known in advance; the chain
    is then filled by random sifting, which is exact once the basic orbit
    lengths multiply to that order.  Otherwise the deterministic
    Schreier-Sims closure is run.
    """

    def __init__(self, n: int, gens: Iterable[Sequence[int]] = (), order: int | None = None, seed: int = 0):
        self.n = n
        self.strong: list[Perm] = []
        self._fmp: list[int] = []
        self.levels: dict[int, _Level] = {}
        gens = [tuple(int(x) for x in g) for g in gens]
        self.input_gens = [g for g in gens if first_moved(g) >= 0]
        if order is not None:
            self._random_fill(order, seed)
        else:
            for g in self.input_gens:
                self._sift_add(g)
            self._complete()

    # -- basics

    def order(self) -> int:
        out = 1
        for lvl in self.levels.values():
            out *= len(lvl.order)
        return out

    @property
    def base(self) -> list[int]:
        return sorted(b for b, lvl in self.levels.items() if len(lvl.order) > 1)

    def strip(self, g: Perm) -> tuple[Perm, int]:
        """Sift ``g``; returns the residue and the level where it stuck
        (``-1`` when the residue is the identity)."""
        while True:
            j = first_moved(g)
            if j < 0:
                return g, -1
            lvl = self.levels.get(j)
            y = g[j]
            if lvl is None or y not in lvl.itrans:
                return g, j
            g = compose(g, lvl.itrans[y])

    def contains(self, g: Sequence[int]) -> bool:
        return self.strip(tuple(g))[1] < 0

    def level_gens(self, b: int) -> list[Perm]:
        return [s for s, f in zip(self.strong, self._fmp) if f >= b]

    def orbit(self, b: int) -> list[int]:
        lvl = self.levels.get(b)
        return list(lvl.order) if lvl else [b]

    def transversal_arrays(self, b: int):
        """``(points, U, Uinv)`` where row ``i`` of ``U`` maps ``b`` to
        ``points[i]`` and ``Uinv`` holds the inverses."""
        lvl = self.levels.get(b)
        if lvl is None:
            return None
        if lvl._arrays is None or len(lvl._arrays[0]) != len(lvl.order):
            dt = _perm_dtype(self.n)
            pts = np.array(lvl.order, dtype=np.int64)
            U = np.array([lvl.trans[y] for y in lvl.order], dtype=dt)
            Ui = np.array([lvl.itrans[y] for y in lvl.order], dtype=dt)
            lvl._arrays = (pts, U, Ui)
        return lvl._arrays

    def elements(self) -> Iterable[Perm]:
        """Every group element; only sensible for small groups."""
        bases = sorted(self.levels)
        n = self.n

        def rec(i, acc):
            if i < 0:
                yield acc
                return
            lvl = self.levels[bases[i]]
            for y in lvl.order:
                yield from rec(i - 1, compose(acc, lvl.trans[y]))

        yield from rec(len(bases) - 1, identity(n))

    # -- construction

    def _add_strong(self, h: Perm) -> None:
        j = first_moved(h)
        self.strong.append(h)
        self._fmp.append(j)
        if j not in self.levels:
            self.levels[j] = _Level(j, self.n)
        for b, lvl in self.levels.items():
            if b <= j:
                self._extend_orbit(lvl)

    def _extend_orbit(self, lvl: _Level) -> None:
        gens = self.level_gens(lvl.base)
        i = 0
        while i < len(lvl.order):
            y = lvl.order[i]
            u = lvl.trans[y]
            for s in gens:
                z = s[y]
                if z not in lvl.trans:
                    w = compose(u, s)
                    lvl.trans[z] = w
                    lvl.itrans[z] = inverse(w)
                    lvl.order.append(z)
            i += 1

    def _sift_add(self, g: Perm) -> bool:
        h, j = self.strip(g)
        if j < 0:
            return False
        self._add_strong(h)
        return True

    def add_generators(self, gens: Iterable[Sequence[int]]) -> None:
        """Enlarge the group; the chain is completed deterministically."""
        changed = False
        for g in gens:
            g = tuple(int(x) for x in g)
            if self._sift_add(g):
                changed = True
        if changed:
            self._complete()

    def _complete(self) -> None:
        restart = True
        while restart:
            restart = False
            for b in sorted(self.levels, reverse=True):
                lvl = self.levels[b]
                gens = [(i, s) for i, (s, f) in enumerate(zip(self.strong, self._fmp)) if f >= b]
                for y in list(lvl.order):
                    u = lvl.trans[y]
                    for i, s in gens:
                        key = (y, i)
                        if key in lvl.done:
                            continue
                        lvl.done.add(key)
                        sg = compose(compose(u, s), lvl.itrans[s[y]])
                        if self._sift_add(sg):
                            restart = True
                            break
                    if restart:
                        break
                if restart:
                    break

    def _random_fill(self, order: int, seed: int) -> None:
        gens = self.input_gens
        if not gens:
            if order != 1:
                raise ValueError("empty generator list cannot have order > 1")
            return
        rng = random.Random(seed)
        # product replacement state
        state = list(gens) + [identity(self.n)] * max(0, 10 - len(gens))
        acc = identity(self.n)
        for g in gens:
            self._sift_add(g)
        for _ in range(50):
            acc = self._pr_step(state, acc, rng)
        stalls = 0
        while self.order() < order:
            acc = self._pr_step(state, acc, rng)
            if not self._sift_add(acc):
                stalls += 1
                if stalls > 2000:
                    # known order was wrong or generators incomplete; fall back
                    self._complete()
                    break
        if self.order() != order:
            raise ValueError(f"chain order {self.order()} does not match stated order {order}")

    @staticmethod
    def _pr_step(state, acc, rng):
        i, j = rng.sample(range(len(state)), 2)
        if rng.random() < 0.5:
            state[i] = compose(state[i], state[j])
        else:
            state[i] = compose(state[j], state[i])
        return compose(acc, state[i])


def _perm_dtype(n: int):
    return np.uint8 if n <= 256 else np.int32


def orbit_partition(gens: Iterable[Sequence[int]], n: int) -> list[list[int]]:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in gens:
        for x in range(n):
            a, b = find(x), find(g[x])
            if a != b:
                parent[max(a, b)] = min(a, b)
    out: dict[int, list[int]] = {}
    for x in range(n):
        out.setdefault(find(x), []).append(x)
    return sorted(out.values())


@dataclass
class MinImage:
    """Result of :func:`minimal_image`.

    ``image`` is the lexicographically largest vector in the orbit and
    ``element`` a group element carrying the input onto it; ``stabilizer``
    generates the stabilizer of the input when harvesting was requested.
    """

    image: np.ndarray
    element: np.ndarray
    stabilizer: list = field(default_factory=list)
    constructed: int = 0


def _row_keys(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    return a.view(np.dtype((np.void, a.shape[1] * a.dtype.itemsize))).ravel()


def minimal_image(
    chain: StabChain,
    vec,
    harvest: bool = False,
    budget: int = DEFAULT_IMAGE_BUDGET,
) -> MinImage:
    """Lexicographically largest image of ``vec`` under the chain's group.

    For 0/1 vectors this is the image set whose sorted element list is
    lexicographically least.  Search nodes with equal partial images are
    merged; with ``harvest`` the merges yield stabilizer generators.
    """
    n = chain.n
    dt = _perm_dtype(n)
    imgs = np.asarray(vec, dtype=np.uint8).reshape(1, n).copy()
    hs = np.arange(n, dtype=dt).reshape(1, n)
    stab: list[np.ndarray] = []
    constructed = 1
    nontrivial = sorted(b for b, lvl in chain.levels.items() if len(lvl.order) > 1)
    last = nontrivial[-1] if nontrivial else -1
    for j in range(n):
        if j > last:
            break
        arrays = chain.transversal_arrays(j) if j in chain.levels else None
        if arrays is None or len(arrays[0]) == 1:
            if len(imgs) > 1:
                col = imgs[:, j]
                keep = col == col.max()
                imgs, hs = imgs[keep], hs[keep]
            continue
        pts, U, Ui = arrays
        vals = imgs[:, pts]
        best = vals.max()
        node, yi = np.nonzero(vals == best)
        constructed += len(node)
        if constructed > budget:
            raise OrbitTooLarge("orbit too large", witness=constructed)
        new_imgs = np.take_along_axis(imgs[node], U[yi].astype(np.int64), axis=1)
        new_hs = np.take_along_axis(Ui[yi], hs[node].astype(np.int64), axis=1)
        keys = _row_keys(new_imgs)
        _, first, inv = np.unique(keys, return_index=True, return_inverse=True)
        if harvest and len(first) < len(node):
            dup = np.flatnonzero(first[inv] != np.arange(len(node)))
            if len(dup):
                ha = new_hs[dup]
                hb = new_hs[first[inv[dup]]]
                hb_inv = np.empty_like(hb)
                np.put_along_axis(hb_inv, hb.astype(np.int64), np.arange(n, dtype=dt)[None, :].repeat(len(hb), 0), axis=1)
                g = np.take_along_axis(hb_inv, ha.astype(np.int64), axis=1)
                stab.extend(g)
        imgs, hs = new_imgs[first], new_hs[first]
    if len(imgs) > 1:
        order = np.lexsort(imgs.T[::-1])
        top = imgs[order[-1]]
        if harvest:
            eq = np.flatnonzero((imgs == top).all(axis=1))
            hb = hs[eq[0]]
            hb_inv = np.empty_like(hb)
            hb_inv[hb.astype(np.int64)] = np.arange(n, dtype=dt)
            for i in eq[1:]:
                stab.append(hb_inv[hs[i].astype(np.int64)])
        pick = order[-1]
        imgs, hs = imgs[pick : pick + 1], hs[pick : pick + 1]
    return MinImage(imgs[0].copy(), hs[0].copy(), stab, constructed)


def stabilizer_chain(chain: StabChain, vec, seed: int = 0) -> StabChain:
    """Stabilizer of a vector as its own chain (via harvested merges)."""
    res = minimal_image(chain, vec, harvest=True)
    gens = _reduce_gens(res.stabilizer, chain.n)
    return StabChain(chain.n, gens)


def _reduce_gens(gens, n):
    """Drop identity and duplicate permutations."""
    seen = set()
    out = []
    ident = identity(n)
    for g in gens:
        t = tuple(int(x) for x in g)
        if t != ident and t not in seen:
            seen.add(t)
            out.append(t)
    return out
