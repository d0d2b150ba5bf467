"""Equivalence of subsets under ``D -> g * phi(D)``.

The canonical representative of a subset is the member of its orbit whose
sorted element list is lexicographically least.  It is computed as a minimal
image in a stabilizer chain for the holomorph (or for Aut(G) alone when
translations are switched off), so the orbit is never listed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .automorphisms import AutomorphismGroup
from .errors import ParameterError
from .group_ring import SubsetOfGroup
from .permgroup import DEFAULT_IMAGE_BUDGET, StabChain, minimal_image, stabilizer_chain


@dataclass(frozen=True)
class CanonicalSubset:
    subset: SubsetOfGroup
    is_canonical: bool


def acting_chain(A: AutomorphismGroup, translations: bool = True) -> StabChain:
    return A.holomorph_chain if translations else A.chain


def canonical_vector(chain: StabChain, vec, budget: int = DEFAULT_IMAGE_BUDGET) -> np.ndarray:
    """Lexicographically largest vector in the orbit of ``vec``."""
    return minimal_image(chain, vec, budget=budget).image


def canonical_subset(
    D: SubsetOfGroup,
    A: AutomorphismGroup,
    translations: bool = True,
    budget: int = DEFAULT_IMAGE_BUDGET,
) -> SubsetOfGroup:
    if D.group is not A.group:
        raise ParameterError("automorphism group belongs to another group")
    if len(D) in (0, D.group.order):
        return D
    img = canonical_vector(acting_chain(A, translations), D.indicator, budget)
    return SubsetOfGroup.of(D.group, np.flatnonzero(img))


def tag(D: SubsetOfGroup, A: AutomorphismGroup, translations: bool = True) -> CanonicalSubset:
    C = canonical_subset(D, A, translations)
    return CanonicalSubset(C, C.elements == D.elements)


def are_equivalent(D1: SubsetOfGroup, D2: SubsetOfGroup, A: AutomorphismGroup, translations: bool = True) -> bool:
    if D1.group is not D2.group:
        raise ParameterError("cross-group comparison", witness=(D1.group.label, D2.group.label))
    if len(D1) != len(D2):
        return False
    return canonical_subset(D1, A, translations) == canonical_subset(D2, A, translations)


def dedupe(subsets: Iterable[SubsetOfGroup], A: AutomorphismGroup, translations: bool = True) -> list[SubsetOfGroup]:
    """Sorted canonical representatives, one per orbit met."""
    reps = {canonical_subset(D, A, translations).elements for D in subsets}
    return [SubsetOfGroup.of(A.group, r) for r in sorted(reps)]


def orbit_size(D: SubsetOfGroup, A: AutomorphismGroup, translations: bool = True) -> int:
    chain = acting_chain(A, translations)
    return chain.order() // stabilizer_chain(chain, D.indicator).order()
