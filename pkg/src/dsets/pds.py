"""Partial difference sets and their derivation from difference sets.

The multiset ``{x y^-1 : x, y in T, x != y}`` of a PDS covers each
nonidentity element of ``T`` exactly ``lam`` times and every other
nonidentity element ``mu`` times.  Translates of a difference set are
``(v, k, lam, lam)`` PDS; a translate that is reversible is regular when it
avoids the identity, and loses the identity to become a
``(v, k-1, lam-2, lam)`` regular PDS otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, TextIO

import numpy as np

from . import kernels
from .automorphisms import AutomorphismGroup
from .equivalence import canonical_subset
from .errors import CatalogError, NotApplicable, ParameterError, SearchError
from .graphs import PdsParameters
from .group_ring import DesignParameters, SubsetOfGroup, is_difference_set

__all__ = [
    "PdsParameters",
    "DifferenceProfile",
    "difference_profile",
    "is_partial_difference_set",
    "is_reversible",
    "is_regular",
    "peel_identity",
    "scan_translates",
    "dedupe_pds",
    "all_pds_from_catalog",
    "check_reversibility_invariant",
    "PdsFamilies",
    "derive_all",
    "PdsRecord",
    "format_pds",
    "write_pds",
    "parse_pds_line",
]


@dataclass(frozen=True)
class DifferenceProfile:
    subset: SubsetOfGroup = field(repr=False)
    counts: np.ndarray = field(repr=False)

    def at(self, g: int) -> int:
        return int(self.counts[g])


def difference_profile(T: SubsetOfGroup) -> DifferenceProfile:
    """Counts of ``x y^-1`` over ordered pairs of distinct elements; the
    identity entry is zero."""
    G = T.group
    c = kernels.ring_square(G.mul, G.inv, T.indicator).copy()
    c[G.identity] -= len(T)
    return DifferenceProfile(T, c)


def pds_witness(T: SubsetOfGroup, p: PdsParameters):
    G = T.group
    if len(T) != p.k or G.order != p.v:
        raise ParameterError("parameter mismatch", witness={"|T|": len(T), "|G|": G.order, "params": str(p)})
    counts = difference_profile(T).counts
    for g in range(G.order):
        if g == G.identity:
            continue
        want = p.lam if g in T else p.mu
        if counts[g] != want:
            return g, int(counts[g]), want
    return None


def is_partial_difference_set(T: SubsetOfGroup, p: PdsParameters) -> bool:
    return pds_witness(T, p) is None


def is_reversible(T: SubsetOfGroup) -> bool:
    inv = T.group.inv
    return all(int(inv[x]) in T for x in T.elements)


def is_regular(T: SubsetOfGroup) -> bool:
    return T.group.identity not in T and is_reversible(T)


def check_reversibility_invariant(T: SubsetOfGroup, p: PdsParameters) -> None:
    """A PDS with ``lam != mu`` must be reversible."""
    if p.lam != p.mu and not is_reversible(T):
        raise SearchError("PDS with lam != mu that is not reversible", witness=T.elements)


def peel_identity(T: SubsetOfGroup, p: PdsParameters) -> tuple[SubsetOfGroup, PdsParameters]:
    e = T.group.identity
    if p.k < 2 or e not in T or not is_reversible(T) or not is_partial_difference_set(T, p):
        raise NotApplicable("peel not applicable", witness=T.elements)
    S = T.without(e)
    q = PdsParameters(p.v, p.k - 1, p.lam - 2, p.mu)
    if not (is_regular(S) and is_partial_difference_set(S, q)):
        raise SearchError("peeled set failed the PDS check", witness=S.elements)
    return S, q


def scan_translates(D: SubsetOfGroup, p: DesignParameters) -> tuple[list[SubsetOfGroup], list[SubsetOfGroup]]:
    """Regular PDS among the translates ``gD``.

    The first list holds the reversible translates missing the identity,
    which are regular ``(v, k, lam, lam)`` PDS; the second holds
    ``gD \\ {1}`` for reversible translates containing it.
    """
    if not is_difference_set(D, p):
        raise NotApplicable("not a difference set", witness=D.elements)
    G = D.group
    full = PdsParameters(p.v, p.k, p.lam, p.lam)
    first, second = [], []
    for g in range(G.order):
        T = D.translate(g)
        if not is_reversible(T):
            continue
        if G.identity not in T:
            if not is_partial_difference_set(T, full):
                raise SearchError("reversible translate failed the PDS check", witness=T.elements)
            first.append(T)
        else:
            S, q = peel_identity(T, full)
            check_reversibility_invariant(S, q)
            second.append(S)
    return first, second


def dedupe_pds(subsets: Iterable[SubsetOfGroup], A: AutomorphismGroup) -> list[SubsetOfGroup]:
    """Sorted representatives under automorphisms alone."""
    reps = {canonical_subset(T, A, translations=False).elements for T in subsets}
    return [SubsetOfGroup.of(A.group, r) for r in sorted(reps)]


def all_pds_from_catalog(dsets: Iterable[SubsetOfGroup], A: AutomorphismGroup) -> list[SubsetOfGroup]:
    """Every ``(v, k, lam, lam)`` PDS of the group, up to automorphism,
    from a complete list of inequivalent difference sets."""
    G = A.group
    translates = [D.translate(g) for D in dsets for g in range(G.order)]
    return dedupe_pds(translates, A)


@dataclass
class PdsFamilies:
    """All PDS obtained from one group's difference-set catalogue."""

    label: str
    params: DesignParameters
    pds: list[SubsetOfGroup]
    regular: list[SubsetOfGroup]
    peeled: list[SubsetOfGroup]


def derive_all(label: str, dsets: list[SubsetOfGroup], p: DesignParameters, A: AutomorphismGroup) -> PdsFamilies:
    regular, peeled = [], []
    for D in dsets:
        a, b = scan_translates(D, p)
        regular += a
        peeled += b
    return PdsFamilies(
        label,
        p,
        all_pds_from_catalog(dsets, A),
        dedupe_pds(regular, A),
        dedupe_pds(peeled, A),
    )


# -- file format ------------------------------------------------------------


@dataclass(frozen=True)
class PdsRecord:
    label: str
    params: PdsParameters
    regular: bool
    elements: tuple[int, ...]


def format_pds(label: str, T: SubsetOfGroup, p: PdsParameters) -> str:
    flag = "R" if is_regular(T) else "N"
    return f"PDS {label} {p.v} {p.k} {p.lam} {p.mu} {flag} " + ",".join(str(x) for x in T.elements)


def write_pds(fh: TextIO, fam: PdsFamilies) -> None:
    p = fam.params
    full = PdsParameters(p.v, p.k, p.lam, p.lam)
    peeled = PdsParameters(p.v, p.k - 1, p.lam - 2, p.lam)
    for T in fam.pds:
        fh.write(format_pds(fam.label, T, full) + "\n")
    for T in fam.peeled:
        fh.write(format_pds(fam.label, T, peeled) + "\n")


def parse_pds_line(line: str) -> PdsRecord:
    parts = line.split()
    try:
        if parts[0] != "PDS" or parts[6] not in ("R", "N"):
            raise ValueError("bad tag")
        v, k, lam, mu = (int(x) for x in parts[2:6])
        els = tuple(int(x) for x in parts[7].split(",")) if len(parts) > 7 else ()
    except (ValueError, IndexError) as e:
        raise CatalogError(f"malformed PDS line {line.strip()!r}: {e}")
    return PdsRecord(parts[1], PdsParameters(v, k, lam, mu), parts[6] == "R", els)
