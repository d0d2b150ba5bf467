"""Brute-force reference implementations used only by the tests.

Nothing here calls the library's algorithms: groups are handled through
their raw multiplication tables, and every answer comes from plain
enumeration.
"""

from __future__ import annotations

from collections import Counter
from itertools import combinations, permutations, product

import numpy as np


def subgroups(mul: np.ndarray) -> list[frozenset[int]]:
    """All subgroups, as the closures of every subset of at most 4 generators
    (enough for any group of order below 32)."""
    v = len(mul)
    e = next(i for i in range(v) if all(mul[i, x] == x for x in range(v)))
    found = set()
    for r in range(0, 5):
        for gens in combinations(range(v), r):
            S = {e}
            frontier = [e]
            while frontier:
                x = frontier.pop()
                for g in gens:
                    y = int(mul[x, g])
                    if y not in S:
                        S.add(y)
                        frontier.append(y)
            found.add(frozenset(S))
    return sorted(found, key=lambda s: (len(s), sorted(s)))


def normal_subgroups(mul: np.ndarray) -> list[frozenset[int]]:
    v = len(mul)
    e = _identity(mul)
    inv = [int(np.flatnonzero(mul[x] == e)[0]) for x in range(v)]
    out = []
    for S in subgroups(mul):
        if all(int(mul[mul[g, s], inv[g]]) in S for g in range(v) for s in S):
            out.append(S)
    return out


def _identity(mul) -> int:
    v = len(mul)
    return next(i for i in range(v) if all(mul[i, x] == x for x in range(v)))


def automorphisms(mul: np.ndarray) -> list[tuple[int, ...]]:
    """Every bijection preserving the table.  Feasible up to order 8 or so."""
    v = len(mul)
    e = _identity(mul)
    rest = [x for x in range(v) if x != e]
    out = []
    for img in permutations(rest):
        p = [0] * v
        p[e] = e
        for a, b in zip(rest, img):
            p[a] = b
        p = np.array(p)
        if np.array_equal(p[mul], mul[p[:, None], p[None, :]]):
            out.append(tuple(int(x) for x in p))
    return out


def automorphisms_by_generators(mul: np.ndarray, gens: list[int]) -> list[tuple[int, ...]]:
    """Every automorphism, found by trying all images of ``gens`` (which must
    generate the group) and extending along words."""
    v = len(mul)
    e = _identity(mul)
    out = []
    for imgs in product(range(v), repeat=len(gens)):
        p = {e: e}
        frontier = [e]
        ok = True
        while frontier and ok:
            x = frontier.pop()
            for g, h in zip(gens, imgs):
                y = int(mul[x, g])
                z = int(mul[p[x], h])
                if y in p:
                    if p[y] != z:
                        ok = False
                        break
                else:
                    p[y] = z
                    frontier.append(y)
        if not ok or len(p) != v or len(set(p.values())) != v:
            continue
        perm = np.array([p[i] for i in range(v)])
        if np.array_equal(perm[mul], mul[perm[:, None], perm[None, :]]):
            out.append(tuple(int(x) for x in perm))
    return out


def difference_counts(mul: np.ndarray, D) -> Counter:
    """``x y^-1`` over ordered pairs, all pairs including ``x == y``."""
    e = _identity(mul)
    v = len(mul)
    inv = [int(np.flatnonzero(mul[x] == e)[0]) for x in range(v)]
    return Counter(int(mul[x, inv[y]]) for x in D for y in D)


def is_difference_set(mul, D, lam) -> bool:
    e = _identity(mul)
    c = difference_counts(mul, D)
    return c[e] == len(D) and all(c[g] == lam for g in range(len(mul)) if g != e)


def orbit(mul, auts, D, translations=True) -> set[tuple[int, ...]]:
    v = len(mul)
    shifts = range(v) if translations else [_identity(mul)]
    return {tuple(sorted(int(mul[g, a[x]]) for x in D)) for a in auts for g in shifts}


def orbit_classes(mul, auts, subsets, translations=True) -> list[tuple[int, ...]]:
    """Lex-least representative of each orbit met by ``subsets``."""
    seen: dict[tuple, tuple] = {}
    for D in subsets:
        key = tuple(sorted(D))
        if key in seen:
            continue
        orb = orbit(mul, auts, key, translations)
        rep = min(orb)
        for x in orb:
            seen[x] = rep
    return sorted(set(seen.values()))


def cyclic_table(n: int) -> np.ndarray:
    r = np.arange(n)
    return (r[:, None] + r[None, :]) % n


def srg_brute(adj: np.ndarray, k, lam, mu) -> bool:
    n = len(adj)
    for x in range(n):
        if adj[x].sum() != k:
            return False
        for y in range(x + 1, n):
            common = sum(1 for z in range(n) if adj[x, z] and adj[y, z])
            if common != (lam if adj[x, y] else mu):
                return False
    return True


def regular_subsets(mul):
    """Every inverse-closed subset that avoids the identity."""
    e = _identity(mul)
    v = len(mul)
    inv = [int(np.flatnonzero(mul[x] == e)[0]) for x in range(v)]
    classes = sorted({tuple(sorted({x, inv[x]})) for x in range(v) if x != e})
    for mask in range(1 << len(classes)):
        yield tuple(sorted(x for i, c in enumerate(classes) if mask >> i & 1 for x in c))


def pds_params_of(mul, S):
    """``(lam, mu)`` when the subset is a PDS, else None; vacuous values as 0."""
    e = _identity(mul)
    c = difference_counts(mul, S)
    c[e] -= len(S)
    inside = {c[g] for g in S if g != e}
    outside = {c[g] for g in range(len(mul)) if g != e and g not in S}
    if len(inside) > 1 or len(outside) > 1:
        return None
    return (inside.pop() if inside else 0, outside.pop() if outside else 0)
