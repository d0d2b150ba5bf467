"""Finite groups as explicit multiplication tables.

Elements are the integers ``0..v-1``.  ``mul[a, b]`` is the product ``a*b``;
for groups built from permutations this is "apply ``a`` then ``b``".
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import GroupTableError, GroupTooLarge, NotNormal

DEFAULT_GENERATION_CAP = 10000


class FiniteGroup:
    """A group of order ``v`` given by its Cayley table.

    Instances are treated as immutable; the arrays are flagged read-only.
    """

    def __init__(self, mul, label: str = "", identity: int | None = None, _trusted: bool = False):
        mul = np.ascontiguousarray(mul, dtype=np.int32)
        if not _trusted:
            identity = _validate_table(mul)
        elif identity is None:
            identity = 0
        v = mul.shape[0]
        inv = np.empty(v, dtype=np.int32)
        rows, cols = np.nonzero(mul == identity)
        inv[rows] = cols
        mul.setflags(write=False)
        inv.setflags(write=False)
        self.mul = mul
        self.inv = inv
        self.identity = int(identity)
        self.order = v
        self.label = label

    def __repr__(self) -> str:
        return f"FiniteGroup({self.label or '?'}, order={self.order})"

    def __len__(self) -> int:
        return self.order

    def m(self, a: int, b: int) -> int:
        return int(self.mul[a, b])

    def conj(self, g: int, x: int) -> int:
        """Return ``g x g^-1``."""
        return int(self.mul[self.mul[g, x], self.inv[g]])

    @cached_property
    def element_orders(self) -> np.ndarray:
        orders = np.ones(self.order, dtype=np.int32)
        for x in range(self.order):
            y, n = x, 1
            while y != self.identity:
                y = self.mul[y, x]
                n += 1
            orders[x] = n
        orders.setflags(write=False)
        return orders

    @cached_property
    def conjugation_table(self) -> np.ndarray:
        """``conjugation_table[g, x] == g x g^-1``."""
        t = self.mul[self.mul, self.inv[:, None]]
        t = np.ascontiguousarray(t)
        t.setflags(write=False)
        return t

    @cached_property
    def conjugacy_classes(self) -> tuple[tuple[int, ...], ...]:
        seen = np.zeros(self.order, dtype=bool)
        classes = []
        ct = self.conjugation_table
        for x in range(self.order):
            if not seen[x]:
                cls = np.unique(ct[:, x])
                seen[cls] = True
                classes.append(tuple(int(c) for c in cls))
        return tuple(classes)

    @cached_property
    def class_sizes(self) -> np.ndarray:
        sizes = np.zeros(self.order, dtype=np.int32)
        for cls in self.conjugacy_classes:
            sizes[list(cls)] = len(cls)
        sizes.setflags(write=False)
        return sizes

    @cached_property
    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.mul, self.mul.T))

    @cached_property
    def left_translations(self) -> np.ndarray:
        """Row ``g`` is the permutation ``x -> g*x``."""
        return self.mul

    @cached_property
    def generating_sequence(self) -> tuple[int, ...]:
        """Greedy generating sequence: each step adds the element that
        enlarges the generated subgroup most (smallest index on ties)."""
        gens: list[int] = []
        current = frozenset([self.identity])
        while len(current) < self.order:
            best, best_set = None, None
            for x in range(self.order):
                if x in current:
                    continue
                s = closure(self, gens + [x])
                if best_set is None or len(s) > len(best_set):
                    best, best_set = x, s
                    if len(s) == self.order:
                        break
            gens.append(best)
            current = frozenset(best_set)
        return tuple(gens)

    def subgroup(self, elements: Iterable[int]) -> "Subgroup":
        return Subgroup(self, tuple(sorted(int(e) for e in elements)))

    def trivial_subgroup(self) -> "Subgroup":
        return Subgroup(self, (self.identity,))

    def whole(self) -> "Subgroup":
        return Subgroup(self, tuple(range(self.order)))


@dataclass(frozen=True)
class Subgroup:
    parent: FiniteGroup = field(repr=False, compare=False)
    elements: tuple[int, ...]

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, x: int) -> bool:
        return x in self._set

    def __iter__(self):
        return iter(self.elements)

    @cached_property
    def _set(self) -> frozenset[int]:
        return frozenset(self.elements)

    @cached_property
    def mask(self) -> int:
        m = 0
        for e in self.elements:
            m |= 1 << e
        return m

    def is_normal(self) -> bool:
        return _normality_witness(self) is None


@dataclass(frozen=True)
class GroupHomomorphism:
    source: FiniteGroup = field(repr=False)
    target: FiniteGroup = field(repr=False)
    image_of: np.ndarray = field(repr=False)
    kernel: Subgroup
    transversal: tuple[int, ...] = field(repr=False)

    def __call__(self, x: int) -> int:
        return int(self.image_of[x])

    @cached_property
    def fibers(self) -> list[tuple[int, ...]]:
        """``fibers[y]`` lists the source elements mapping to ``y``, ascending."""
        out: list[list[int]] = [[] for _ in range(self.target.order)]
        for x, y in enumerate(self.image_of):
            out[int(y)].append(x)
        return [tuple(f) for f in out]


@dataclass(frozen=True)
class ChiefSeries:
    group: FiniteGroup = field(repr=False)
    terms: tuple[Subgroup, ...]

    @property
    def factor_orders(self) -> tuple[int, ...]:
        return tuple(a.order // b.order for a, b in zip(self.terms, self.terms[1:]))


# -- construction ----------------------------------------------------------


def _compose(p: tuple[int, ...], q: tuple[int, ...]) -> tuple[int, ...]:
    """Apply ``p`` then ``q``."""
    return tuple(q[x] for x in p)


def group_from_generators(
    degree: int,
    perms: Sequence[Sequence[int]],
    label: str = "",
    cap: int = DEFAULT_GENERATION_CAP,
) -> FiniteGroup:
    """Abstract group of the permutation group generated by ``perms``.

    Elements are numbered breadth-first over words in the generators: shorter
    words first, then by generator index, then by predecessor index.
    """
    gens = [tuple(int(x) for x in p) for p in perms]
    for p in gens:
        if len(p) != degree or sorted(p) != list(range(degree)):
            raise GroupTableError(f"not a permutation of degree {degree}", witness=p)
    identity = tuple(range(degree))
    elements = [identity]
    index = {identity: 0}
    pred = [-1]
    via = [-1]
    layer = [0]
    while layer:
        new = []
        for s, g in enumerate(gens):
            for p in layer:
                q = _compose(elements[p], g)
                if q not in index:
                    if len(elements) >= cap:
                        raise GroupTooLarge("group too large", witness=cap)
                    index[q] = len(elements)
                    elements.append(q)
                    pred.append(p)
                    via.append(s)
                    new.append(index[q])
        layer = new
    v = len(elements)
    right = np.empty((v, max(len(gens), 1)), dtype=np.int32)
    for x, e in enumerate(elements):
        for s, g in enumerate(gens):
            right[x, s] = index[_compose(e, g)]
    mul = np.empty((v, v), dtype=np.int32)
    mul[:, 0] = np.arange(v)
    for b in range(1, v):
        mul[:, b] = right[mul[:, pred[b]], via[b]]
    return FiniteGroup(mul, label=label, identity=0, _trusted=True)


def _validate_table(mul: np.ndarray) -> int:
    if mul.ndim != 2 or mul.shape[0] != mul.shape[1] or mul.shape[0] == 0:
        raise GroupTableError("not a group table: table must be square and nonempty")
    v = mul.shape[0]
    if mul.min() < 0 or mul.max() >= v:
        raise GroupTableError("not a group table: entry out of range")
    ref = np.arange(v)
    for x in range(v):
        if len(np.unique(mul[x])) != v:
            raise GroupTableError("not a group table: row not bijective", witness=("row", x))
        if len(np.unique(mul[:, x])) != v:
            raise GroupTableError("not a group table: column not bijective", witness=("column", x))
    ids = [e for e in range(v) if np.array_equal(mul[e], ref) and np.array_equal(mul[:, e], ref)]
    if not ids:
        raise GroupTableError("not a group table: no identity")
    lhs = mul[mul, :]  # (a*b)*c indexed [a, b, c]
    rhs = mul[:, mul]  # a*(b*c) indexed [a, b, c]
    bad = np.argwhere(lhs != rhs)
    if len(bad):
        a, b, c = (int(t) for t in bad[0])
        raise GroupTableError("not a group table: not associative", witness=(a, b, c))
    return ids[0]


def group_from_table(table, label: str = "") -> FiniteGroup:
    return FiniteGroup(np.asarray(table), label=label)


def cyclic_group(n: int, label: str = "") -> FiniteGroup:
    r = np.arange(n)
    return FiniteGroup((r[:, None] + r[None, :]) % n, label=label or f"C{n}", identity=0, _trusted=True)


def direct_product(a: FiniteGroup, b: FiniteGroup, label: str = "") -> FiniteGroup:
    """Element ``(x, y)`` is numbered ``x * |b| + y``."""
    na, nb = a.order, b.order
    x = np.arange(na * nb)
    xa, xb = x // nb, x % nb
    mul = a.mul[xa[:, None], xa[None, :]] * nb + b.mul[xb[:, None], xb[None, :]]
    ident = a.identity * nb + b.identity
    return FiniteGroup(mul, label=label or f"{a.label}x{b.label}", identity=ident, _trusted=True)


# -- subgroups ---------------------------------------------------------------


def closure(G: FiniteGroup, gens: Iterable[int]) -> list[int]:
    """Sorted elements of the subgroup generated by ``gens``."""
    gens = [int(g) for g in gens]
    seen = np.zeros(G.order, dtype=bool)
    seen[G.identity] = True
    frontier = [G.identity]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = int(G.mul[x, g])
                if not seen[y]:
                    seen[y] = True
                    nxt.append(y)
        frontier = nxt
    return [int(x) for x in np.flatnonzero(seen)]


def generate_subgroup(G: FiniteGroup, gens: Iterable[int]) -> Subgroup:
    return Subgroup(G, tuple(closure(G, gens)))


def normal_closure(G: FiniteGroup, elements: Iterable[int]) -> Subgroup:
    elements = list(elements)
    if not elements:
        return G.trivial_subgroup()
    conj = np.unique(G.conjugation_table[:, elements])
    return generate_subgroup(G, conj)


def _product_set(G: FiniteGroup, a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    return tuple(int(x) for x in np.unique(G.mul[np.ix_(list(a), list(b))]))


def _normality_witness(N: Subgroup):
    G = N.parent
    members = np.zeros(G.order, dtype=bool)
    members[list(N.elements)] = True
    ct = G.conjugation_table[:, list(N.elements)]
    bad = np.argwhere(~members[ct])
    if len(bad):
        g, i = bad[0]
        return int(g), N.elements[int(i)]
    return None


def _sort_key(N: Subgroup):
    return (N.order, N.elements)


def _class_closures(G: FiniteGroup) -> list[Subgroup]:
    seen = {}
    for cls in G.conjugacy_classes:
        N = normal_closure(G, cls)
        seen.setdefault(N.elements, N)
    return sorted(seen.values(), key=_sort_key)


def normal_subgroups(G: FiniteGroup) -> list[Subgroup]:
    """Every normal subgroup, sorted by order then element list."""
    closures = _class_closures(G)
    trivial = G.trivial_subgroup()
    found = {trivial.elements: trivial}
    queue = [trivial]
    while queue:
        N = queue.pop()
        nmask = N.mask
        for C in closures:
            if C.mask & ~nmask == 0:
                continue
            M = Subgroup(G, _product_set(G, N.elements, C.elements))
            if M.elements not in found:
                found[M.elements] = M
                queue.append(M)
    return sorted(found.values(), key=_sort_key)


def minimal_normal_over(G: FiniteGroup, current: Subgroup) -> list[Subgroup]:
    """Normal subgroups ``M > current`` with ``M/current`` minimal normal in
    ``G/current``, sorted by order then element list."""
    cands = {}
    cmask = current.mask
    for C in _class_closures(G):
        if C.mask & ~cmask == 0:
            continue
        M = Subgroup(G, _product_set(G, current.elements, C.elements))
        cands[M.elements] = M
    cs = list(cands.values())
    minimal = [M for M in cs if not any(o.order < M.order and o.mask & ~M.mask == 0 for o in cs)]
    return sorted(minimal, key=_sort_key)


def chief_series(G: FiniteGroup) -> ChiefSeries:
    """Chief series built bottom-up, always taking the smallest minimal
    normal subgroup of the current quotient (ties: element list)."""
    current = G.trivial_subgroup()
    chain = [current]
    while current.order < G.order:
        current = minimal_normal_over(G, current)[0]
        chain.append(current)
    return ChiefSeries(G, tuple(reversed(chain)))


def all_chief_series(G: FiniteGroup) -> list[ChiefSeries]:
    """Every chief series of ``G``; exponential, meant for small groups."""
    out = []

    def rec(chain):
        top = chain[-1]
        if top.order == G.order:
            out.append(ChiefSeries(G, tuple(reversed(chain))))
            return
        for M in minimal_normal_over(G, top):
            rec(chain + [M])

    rec([G.trivial_subgroup()])
    return out


def is_chief_series(series: ChiefSeries) -> bool:
    G = series.group
    terms = series.terms
    if terms[0].order != G.order or terms[-1].order != 1:
        return False
    for N in terms:
        if not N.is_normal():
            return False
    for upper, lower in zip(terms, terms[1:]):
        if lower.order >= upper.order or lower.mask & ~upper.mask:
            return False
        if upper.elements not in {M.elements for M in minimal_normal_over(G, lower)}:
            return False
    return True


# -- quotients -------------------------------------------------------------


def quotient(G: FiniteGroup, N: Subgroup) -> GroupHomomorphism:
    """Natural projection ``G -> G/N``.

    Cosets are numbered by their minimal element, which is also the
    transversal representative.
    """
    w = _normality_witness(N)
    if w is not None:
        g, n = w
        raise NotNormal("subgroup not normal", witness={"g": g, "n": n, "gng^-1": G.conj(g, n)})
    coset_of = np.full(G.order, -1, dtype=np.int32)
    reps = []
    nel = np.array(N.elements)
    for x in range(G.order):
        if coset_of[x] < 0:
            coset_of[G.mul[x, nel]] = len(reps)
            reps.append(x)
    r = np.array(reps)
    qmul = coset_of[G.mul[r[:, None], r[None, :]]]
    label = f"{G.label}/{N.order}" if N.order > 1 else G.label
    target = FiniteGroup(qmul, label=label, identity=int(coset_of[G.identity]), _trusted=True)
    coset_of.setflags(write=False)
    return GroupHomomorphism(G, target, coset_of, N, tuple(reps))


def compose_projection(upper: GroupHomomorphism, lower: GroupHomomorphism) -> np.ndarray:
    """Map ``G/lower.kernel -> G/upper.kernel`` induced by the identity of G.

    Requires ``lower.kernel`` to be contained in ``upper.kernel``.
    """
    return np.array([upper.image_of[t] for t in lower.transversal], dtype=np.int32)


def is_homomorphism(source: FiniteGroup, target: FiniteGroup, image_of) -> bool:
    f = np.asarray(image_of)
    return bool(np.array_equal(f[source.mul], target.mul[f[:, None], f[None, :]]))
