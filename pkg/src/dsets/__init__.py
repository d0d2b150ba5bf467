"""Difference sets in small groups, with the designs, partial difference
sets and strongly regular graphs they give rise to."""

__version__ = "0.1.0"

from . import kernels
from .errors import DsetsError
from .groups import FiniteGroup, chief_series, normal_subgroups, quotient
from .library import get_group
from .group_ring import DesignParameters, GroupRingElement, SubsetOfGroup, is_difference_set
from .automorphisms import automorphism_group
from .equivalence import are_equivalent, canonical_subset, dedupe
from .search import enumerate_difference_sets, brute_force_oracle
from .designs import develop_design, classify_designs
from .pds import PdsParameters, is_partial_difference_set, derive_all
from .graphs import Graph, cayley_graph, canonical_labeling, is_strongly_regular

__all__ = [
    "__version__",
    "kernels",
    "DsetsError",
    "FiniteGroup",
    "chief_series",
    "normal_subgroups",
    "quotient",
    "get_group",
    "DesignParameters",
    "GroupRingElement",
    "SubsetOfGroup",
    "is_difference_set",
    "automorphism_group",
    "are_equivalent",
    "canonical_subset",
    "dedupe",
    "enumerate_difference_sets",
    "brute_force_oracle",
    "develop_design",
    "classify_designs",
    "PdsParameters",
    "is_partial_difference_set",
    "derive_all",
    "Graph",
    "cayley_graph",
    "canonical_labeling",
    "is_strongly_regular",
]
