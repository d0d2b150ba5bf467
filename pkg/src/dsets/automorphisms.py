"""Automorphism groups of small groups by backtracking over generator images."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from math import prod

import numpy as np

from .errors import GroupTooLarge
from .groups import FiniteGroup, GroupHomomorphism
from .permgroup import StabChain, minimal_image

DEFAULT_AUT_CAP = 100


@dataclass(frozen=True, eq=False)
class AutomorphismGroup:
    """Aut(G) as permutations of the element indices of ``group``."""

    group: FiniteGroup = field(repr=False)
    generators: tuple[tuple[int, ...], ...] = field(repr=False)
    order: int

    @cached_property
    def chain(self) -> StabChain:
        return StabChain(self.group.order, self.generators, order=self.order)

    @cached_property
    def holomorph_chain(self) -> StabChain:
        """Chain of ``x -> g * phi(x)``: left translations and automorphisms."""
        G = self.group
        trans = [tuple(int(x) for x in G.mul[g]) for g in G.generating_sequence]
        return StabChain(G.order, list(self.generators) + trans, order=self.order * G.order)

    def elements(self):
        return self.chain.elements()

    def setwise_stabilizer(self, elements) -> StabChain:
        """Automorphisms mapping the given element set onto itself."""
        vec = np.zeros(self.group.order, dtype=np.uint8)
        vec[list(elements)] = 1
        res = minimal_image(self.chain, vec, harvest=True)
        return StabChain(self.group.order, [tuple(int(x) for x in g) for g in res.stabilizer])

    def induced_on_quotient(self, f: GroupHomomorphism) -> list[tuple[int, ...]]:
        """Generators of the automorphisms of ``f.target`` induced by
        automorphisms of the source that fix ``f.kernel`` setwise."""
        stab = self.setwise_stabilizer(f.kernel.elements)
        reps = np.array(f.transversal)
        out = set()
        for phi in stab.strong:
            img = f.image_of[np.array(phi)[reps]]
            t = tuple(int(x) for x in img)
            if t != tuple(range(len(t))):
                out.add(t)
        return sorted(out)


def _fingerprint(G: FiniteGroup, x: int):
    return (int(G.element_orders[x]), int(G.class_sizes[x]))


def _extend(G: FiniteGroup, gens, images, depth):
    """Map on <g_1..g_depth> induced by the first ``depth`` images, or None
    when the assignment is not an injective homomorphism there."""
    v = G.order
    mul = G.mul
    phi = [-1] * v
    used = [False] * v
    e = G.identity
    phi[e] = e
    used[e] = True
    queue = [e]
    gs = gens[:depth]
    ys = images[:depth]
    i = 0
    while i < len(queue):
        x = queue[i]
        i += 1
        px = phi[x]
        for g, y in zip(gs, ys):
            z = int(mul[x, g])
            pz = int(mul[px, y])
            if phi[z] < 0:
                if used[pz]:
                    return None
                phi[z] = pz
                used[pz] = True
                queue.append(z)
            elif phi[z] != pz:
                return None
    return phi


def _search(G, gens, cands, images, depth):
    m = len(gens)
    if depth == m:
        phi = _extend(G, gens, images, m)
        if phi is not None and all(p >= 0 for p in phi):
            return tuple(phi)
        return None
    for y in cands[depth]:
        images[depth] = y
        if _extend(G, gens, images, depth + 1) is not None:
            r = _search(G, gens, cands, images, depth + 1)
            if r is not None:
                return r
    return None


def _orbit(point, perms):
    orb = {point}
    frontier = [point]
    while frontier:
        nxt = []
        for p in frontier:
            for a in perms:
                q = a[p]
                if q not in orb:
                    orb.add(q)
                    nxt.append(q)
        frontier = nxt
    return orb


def automorphism_group(G: FiniteGroup, cap: int = DEFAULT_AUT_CAP) -> AutomorphismGroup:
    """Generators and exact order of Aut(G).

    Automorphisms are determined by the images of the greedy generating
    sequence.  Working from the last generator back, the orbit of each
    generator under automorphisms fixing the earlier ones is completed by
    searching for one automorphism per missing candidate; the order is the
    product of those orbit lengths.
    """
    if G.order > cap:
        raise GroupTooLarge("automorphism search too large", witness=G.order)
    gens = list(G.generating_sequence)
    m = len(gens)
    fps = [_fingerprint(G, x) for x in range(G.order)]
    cands = [[y for y in range(G.order) if fps[y] == fps[g]] for g in gens]
    found: list[tuple[int, ...]] = []
    sizes = []
    for i in reversed(range(m)):
        orbit = _orbit(gens[i], found)
        for y in cands[i]:
            if y in orbit:
                continue
            images = list(gens[:i]) + [y] + [0] * (m - i - 1)
            if _extend(G, gens, images, i + 1) is None:
                continue
            phi = _search(G, gens, cands, images, i + 1)
            if phi is not None:
                found.append(phi)
                orbit = _orbit(gens[i], found)
        sizes.append(len(orbit))
    return AutomorphismGroup(G, tuple(found), prod(sizes))


def is_automorphism(G: FiniteGroup, perm) -> bool:
    p = np.asarray(perm)
    if sorted(p.tolist()) != list(range(G.order)):
        return False
    return bool(np.array_equal(p[G.mul], G.mul[p[:, None], p[None, :]]))


def apply_to_subset(perm, elements) -> tuple[int, ...]:
    return tuple(sorted(int(perm[x]) for x in elements))


__all__ = [
    "AutomorphismGroup",
    "automorphism_group",
    "is_automorphism",
    "apply_to_subset",
]
