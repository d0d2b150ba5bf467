"""Integer group-ring arithmetic over table groups.

A subset ``D`` is identified with the 0/1 element ``sum_{g in D} g``.  The
difference-set condition is ``D D^(-1) = (k - lam) 1 + lam G``; its image
under a projection with kernel ``U`` must satisfy
``f(D) f(D)^(-1) = (k - lam) 1 + lam |U| G'``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

import numpy as np

from . import kernels
from .errors import NotApplicable, ParameterError
from .groups import FiniteGroup, GroupHomomorphism, Subgroup, normal_subgroups, quotient


@dataclass(frozen=True)
class DesignParameters:
    """``(v, k, lam)``.  Construction does not enforce feasibility, so an
    infeasible triple can still be named; searches reject it with
    :class:`ParameterError`."""

    v: int
    k: int
    lam: int

    def __post_init__(self):
        if self.v <= 0 or self.k < 0 or self.lam < 0:
            raise ParameterError("parameters must be nonnegative with v > 0", witness=self)

    @property
    def feasible(self) -> bool:
        return 0 < self.k < self.v and self.lam > 0 and self.k * (self.k - 1) == self.lam * (self.v - 1)

    @property
    def order(self) -> int:
        return self.k - self.lam

    def __str__(self) -> str:
        return f"({self.v},{self.k},{self.lam})"

    @classmethod
    def parse(cls, text: str) -> "DesignParameters":
        try:
            v, k, lam = (int(x) for x in text.replace("(", "").replace(")", "").split(","))
        except ValueError:
            raise ParameterError(f"expected 'v,k,lambda', got {text!r}")
        return cls(v, k, lam)


def feasible_parameters(v: int) -> list[DesignParameters]:
    """Every ``(v, k, lam)`` with ``0 < k < v``, ``lam >= 1`` and
    ``k(k-1) = lam(v-1)``."""
    out = []
    for k in range(1, v):
        if (k * (k - 1)) % (v - 1) == 0 and k * (k - 1) > 0:
            out.append(DesignParameters(v, k, k * (k - 1) // (v - 1)))
    return out


class GroupRingElement:
    """Nonnegative integer combination of group elements."""

    __slots__ = ("group", "coeff")

    def __init__(self, group: FiniteGroup, coeff):
        c = np.asarray(coeff, dtype=np.int64)
        if c.shape != (group.order,):
            raise ParameterError("coefficient vector has wrong length", witness=c.shape)
        if (c < 0).any():
            raise ParameterError("coefficients must be nonnegative")
        self.group = group
        self.coeff = c

    @classmethod
    def scalar(cls, group: FiniteGroup, k: int) -> "GroupRingElement":
        c = np.zeros(group.order, dtype=np.int64)
        c[group.identity] = k
        return cls(group, c)

    @classmethod
    def whole(cls, group: FiniteGroup) -> "GroupRingElement":
        return cls(group, np.ones(group.order, dtype=np.int64))

    @property
    def size(self) -> int:
        return int(self.coeff.sum())

    def inverse(self) -> "GroupRingElement":
        """``X^(-1)``: coefficient of ``g`` is that of ``g^-1`` in ``X``."""
        return GroupRingElement(self.group, self.coeff[self.group.inv])

    def __mul__(self, other: "GroupRingElement") -> "GroupRingElement":
        G = self.group
        a, b = self.coeff, other.coeff
        sa, sb = np.flatnonzero(a), np.flatnonzero(b)
        out = np.zeros(G.order, dtype=np.int64)
        np.add.at(out, G.mul[np.ix_(sa, sb)].ravel(), np.outer(a[sa], b[sb]).ravel())
        return GroupRingElement(G, out)

    def square_with_inverse(self) -> np.ndarray:
        return kernels.ring_square(self.group.mul, self.group.inv, self.coeff)

    def __eq__(self, other) -> bool:
        return isinstance(other, GroupRingElement) and other.group is self.group and np.array_equal(self.coeff, other.coeff)

    def __repr__(self) -> str:
        terms = ", ".join(f"{int(c)}*g{i}" for i, c in enumerate(self.coeff) if c)
        return f"GroupRingElement({terms or '0'})"


@dataclass(frozen=True)
class SubsetOfGroup:
    group: FiniteGroup = field(repr=False, compare=False)
    elements: tuple[int, ...]

    @classmethod
    def of(cls, group: FiniteGroup, elements: Iterable[int]) -> "SubsetOfGroup":
        els = tuple(sorted({int(e) for e in elements}))
        if els and (els[0] < 0 or els[-1] >= group.order):
            raise ParameterError("element index out of range", witness=els)
        return cls(group, els)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x) -> bool:
        return x in self._set

    @cached_property
    def _set(self) -> frozenset[int]:
        return frozenset(self.elements)

    @property
    def indicator(self) -> np.ndarray:
        c = np.zeros(self.group.order, dtype=np.int64)
        c[list(self.elements)] = 1
        return c

    @property
    def mask(self) -> int:
        m = 0
        for e in self.elements:
            m |= 1 << e
        return m

    def as_element(self) -> GroupRingElement:
        return GroupRingElement(self.group, self.indicator)

    def translate(self, g: int) -> "SubsetOfGroup":
        """Left translate ``gD``."""
        return SubsetOfGroup.of(self.group, self.group.mul[g, list(self.elements)] if self.elements else [])

    def right_translate(self, g: int) -> "SubsetOfGroup":
        return SubsetOfGroup.of(self.group, self.group.mul[list(self.elements), g] if self.elements else [])

    def apply(self, perm) -> "SubsetOfGroup":
        return SubsetOfGroup.of(self.group, (perm[x] for x in self.elements))

    def inverse(self) -> "SubsetOfGroup":
        return SubsetOfGroup.of(self.group, (self.group.inv[x] for x in self.elements))

    def without(self, x: int) -> "SubsetOfGroup":
        return SubsetOfGroup.of(self.group, (e for e in self.elements if e != x))

    def with_(self, x: int) -> "SubsetOfGroup":
        return SubsetOfGroup.of(self.group, (*self.elements, x))


def difference_multiset(D: SubsetOfGroup) -> GroupRingElement:
    """``D D^(-1)``: coefficient of ``g`` counts ``(x, y)`` with ``x y^-1 = g``."""
    G = D.group
    return GroupRingElement(G, kernels.ring_square(G.mul, G.inv, D.indicator))


def difference_set_witness(D: SubsetOfGroup, p: DesignParameters):
    """First element whose difference count is wrong, as
    ``(element, count, expected)``; ``None`` if ``D`` is a difference set."""
    G = D.group
    if len(D) != p.k or G.order != p.v:
        raise ParameterError("parameter mismatch", witness={"|D|": len(D), "|G|": G.order, "params": str(p)})
    counts = difference_multiset(D).coeff
    for g in range(G.order):
        want = p.k if g == G.identity else p.lam
        if counts[g] != want:
            return g, int(counts[g]), want
    return None


def is_difference_set(D: SubsetOfGroup, p: DesignParameters) -> bool:
    return difference_set_witness(D, p) is None


def project_image(f: GroupHomomorphism, X: GroupRingElement) -> GroupRingElement:
    out = np.zeros(f.target.order, dtype=np.int64)
    np.add.at(out, f.image_of, X.coeff)
    return GroupRingElement(f.target, out)


@dataclass(frozen=True)
class IntersectionNumbers:
    hom: GroupHomomorphism = field(repr=False)
    values: tuple[int, ...]

    def __iter__(self):
        return iter(self.values)


def intersection_numbers(D: SubsetOfGroup, f: GroupHomomorphism) -> IntersectionNumbers:
    """``|gU ∩ D|`` for each transversal representative ``g``, in coset order."""
    img = project_image(f, D.as_element()).coeff
    return IntersectionNumbers(f, tuple(int(img[f.image_of[t]]) for t in f.transversal))


def image_equation_witness(img: GroupRingElement, p: DesignParameters, kernel_order: int):
    H = img.group
    sq = img.square_with_inverse()
    off = p.lam * kernel_order
    for g in range(H.order):
        want = p.k - p.lam + off if g == H.identity else off
        if sq[g] != want:
            return g, int(sq[g]), want
    return None


def satisfies_image_equation(img: GroupRingElement, p: DesignParameters, kernel_order: int) -> bool:
    return image_equation_witness(img, p, kernel_order) is None


# -- McFarland construction (q = 4, d = 1) ----------------------------------


@dataclass(frozen=True)
class McFarlandSpread:
    ambient: FiniteGroup = field(repr=False)
    H: Subgroup
    parts: tuple[Subgroup, ...]

    def is_valid(self) -> bool:
        e = self.ambient.identity
        seen: set[int] = set()
        for part in self.parts:
            rest = set(part.elements) - {e}
            if seen & rest:
                return False
            seen |= rest
        return seen == set(self.H.elements) - {e}


def _check_spread_host(G: FiniteGroup, H: Subgroup) -> None:
    e = G.identity
    ok = H.order == 16 and all(G.mul[x, x] == e for x in H.elements)
    ok = ok and all(G.mul[a, b] == G.mul[b, a] for a in H.elements for b in H.elements)
    if not ok or not H.is_normal():
        raise NotApplicable("invalid spread host", witness=H.elements)


def spreads(G: FiniteGroup, H: Subgroup) -> list[McFarlandSpread]:
    """All partitions of ``H \\ {1}`` into five subgroups of order 4."""
    _check_spread_host(G, H)
    e = G.identity
    nonid = [x for x in H.elements if x != e]
    lines = sorted({tuple(sorted((e, a, b, int(G.mul[a, b])))) for a, b in itertools.combinations(nonid, 2)})
    out = []

    def rec(covered: frozenset, chosen: list):
        if len(covered) == len(nonid):
            parts = tuple(Subgroup(G, ln) for ln in chosen)
            out.append(McFarlandSpread(G, H, parts))
            return
        first = min(x for x in nonid if x not in covered)
        for ln in lines:
            if first in ln and not (set(ln[1:]) & covered):
                rec(covered | set(ln[1:]), chosen + [ln])

    rec(frozenset(), [])
    return out


def mcfarland_construct(G: FiniteGroup, H: Subgroup) -> list[SubsetOfGroup]:
    """Union of ``H_i g_i`` over a spread of ``H``, with ``g_i`` the minimal
    elements of the first five cosets of ``H``; one candidate per spread,
    keeping those that pass the (96, 20, 4) check."""
    if G.order != 96:
        raise NotApplicable("invalid spread host", witness=G.order)
    found = spreads(G, H)
    reps = quotient(G, H).transversal[:5]
    p = DesignParameters(96, 20, 4)
    out = []
    for sp in found:
        els = [int(G.mul[h, g]) for part, g in zip(sp.parts, reps) for h in part.elements]
        D = SubsetOfGroup.of(G, els)
        if len(D) == 20 and is_difference_set(D, p):
            out.append(D)
    return out


def elementary_abelian_normal_subgroups(G: FiniteGroup, order: int) -> list[Subgroup]:
    e = G.identity
    out = []
    for N in normal_subgroups(G):
        if N.order == order and all(G.mul[x, x] == e for x in N.elements):
            if all(G.mul[a, b] == G.mul[b, a] for a in N.elements for b in N.elements):
                out.append(N)
    return out
