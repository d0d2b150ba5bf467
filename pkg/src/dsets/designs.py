"""Symmetric designs developed from difference sets, and their isomorphism classes."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence, TextIO

import numpy as np

from .errors import CatalogError, NotApplicable
from .graphs import CanonicalCertificate, Graph, canonical_labeling
from .group_ring import DesignParameters, SubsetOfGroup, is_difference_set
from .groups import FiniteGroup


@dataclass(frozen=True)
class SymmetricDesign:
    v: int
    blocks: tuple[tuple[int, ...], ...]
    provenance: tuple[str, str] = ("", "")

    @property
    def k(self) -> int:
        return len(self.blocks[0]) if self.blocks else 0

    def incidence(self) -> np.ndarray:
        """``M[b, x] = 1`` iff point ``x`` is on block ``b``."""
        M = np.zeros((len(self.blocks), self.v), dtype=np.int64)
        for b, blk in enumerate(self.blocks):
            M[b, list(blk)] = 1
        return M

    def relabel(self, point_perm, block_order=None) -> "SymmetricDesign":
        blocks = [tuple(sorted(int(point_perm[x]) for x in blk)) for blk in self.blocks]
        if block_order is not None:
            blocks = [blocks[i] for i in block_order]
        return SymmetricDesign(self.v, tuple(blocks), self.provenance)


def develop_design(G: FiniteGroup, D: SubsetOfGroup, ds_id: str = "") -> SymmetricDesign:
    """Blocks ``gD`` for every ``g`` in ``G``, in element order."""
    v, k = G.order, len(D)
    lam, r = divmod(k * (k - 1), v - 1) if v > 1 else (0, 1)
    if r or not is_difference_set(D, DesignParameters(v, k, lam)):
        raise NotApplicable("not a difference set", witness=D.elements)
    els = np.array(D.elements, dtype=np.int64)
    blocks = tuple(tuple(sorted(int(x) for x in G.mul[g, els])) for g in range(v))
    return SymmetricDesign(v, blocks, (G.label, ds_id))


def design_witness(d: SymmetricDesign, p: DesignParameters):
    """First violated axiom as ``(kind, where, value)``, or ``None``."""
    if d.v != p.v or len(d.blocks) != p.v:
        return ("size", None, (d.v, len(d.blocks)))
    for i, blk in enumerate(d.blocks):
        if len(blk) != p.k or len(set(blk)) != p.k or any(not 0 <= x < d.v for x in blk):
            return ("block", i, blk)
    M = d.incidence()
    reps = M.sum(axis=0)
    bad = np.flatnonzero(reps != p.k)
    if len(bad):
        return ("replication", int(bad[0]), int(reps[bad[0]]))
    pairs = M.T @ M
    off = ~np.eye(d.v, dtype=bool)
    bad = np.argwhere((pairs != p.lam) & off)
    if len(bad):
        x, y = (int(t) for t in bad[0])
        return ("pair", (x, y), int(pairs[x, y]))
    return None


def is_symmetric_design(d: SymmetricDesign, p: DesignParameters) -> bool:
    return design_witness(d, p) is None


def block_intersections_constant(d: SymmetricDesign, lam: int) -> bool:
    M = d.incidence()
    meet = M @ M.T
    return bool((meet[~np.eye(len(d.blocks), dtype=bool)] == lam).all())


def incidence_graph(d: SymmetricDesign) -> Graph:
    """Points are vertices ``0..v-1`` (colour 0), blocks follow (colour 1)."""
    v, b = d.v, len(d.blocks)
    M = d.incidence().astype(np.uint8)
    adj = np.zeros((v + b, v + b), dtype=np.uint8)
    adj[:v, v:] = M.T
    adj[v:, :v] = M
    return Graph(adj, [0] * v + [1] * b)


@dataclass
class DesignClass:
    certificate: CanonicalCertificate = field(repr=False)
    members: list[tuple[str, str]]


@dataclass
class DesignClassCatalog:
    params: DesignParameters
    classes: list[DesignClass]

    def __len__(self) -> int:
        return len(self.classes)


def design_certificate(d: SymmetricDesign) -> CanonicalCertificate:
    return canonical_labeling(incidence_graph(d))


def classify_designs(designs: Sequence[SymmetricDesign], jobs: int = 1) -> DesignClassCatalog:
    """Bucket designs by the certificate of their coloured incidence graph.

    With ``jobs > 1`` the certificates are computed in worker processes;
    bucketing stays in input order either way.
    """
    if not designs:
        return DesignClassCatalog(DesignParameters(1, 0, 0), [])
    d0 = designs[0]
    k = d0.k
    lam = k * (k - 1) // (d0.v - 1) if d0.v > 1 else 0
    params = DesignParameters(d0.v, k, lam)
    for d in designs:
        if d.v != params.v or d.k != params.k:
            raise NotApplicable("designs with different parameters", witness=(d.v, d.k))
    if jobs > 1 and len(designs) > 1:
        with ProcessPoolExecutor(jobs) as ex:
            certs = list(ex.map(design_certificate, designs))
    else:
        certs = [design_certificate(d) for d in designs]
    buckets: dict[bytes, DesignClass] = {}
    for d, cert in zip(designs, certs):
        if cert.data in buckets:
            buckets[cert.data].members.append(d.provenance)
        else:
            buckets[cert.data] = DesignClass(cert, [d.provenance])
    return DesignClassCatalog(params, list(buckets.values()))


def genuinely_nonabelian_in_corpus(catalog: DesignClassCatalog, abelian_labels: Iterable[str]) -> list[int]:
    """Indices of classes with no member developed from a listed abelian group."""
    ab = set(abelian_labels)
    return [i for i, c in enumerate(catalog.classes) if not any(label in ab for label, _ in c.members)]


# -- file format ----------------------------------------------------------


def write_design_catalog(fh: TextIO, catalog: DesignClassCatalog, designs: dict | None = None) -> None:
    """One record per class: header, the blocks of a representative, provenance.

    ``designs`` maps provenance to the developed design and supplies the
    representative's blocks.
    """
    p = catalog.params
    for i, cls in enumerate(catalog.classes):
        fh.write(f"DESIGN {i} {p.v} {p.k} {p.lam}\n")
        rep = designs[cls.members[0]] if designs else None
        if rep is None:
            raise CatalogError("design blocks required to write a catalog")
        for blk in rep.blocks:
            fh.write(",".join(str(x) for x in blk) + "\n")
        for label, ds_id in cls.members:
            fh.write(f"FROM {label} {ds_id}\n")


@dataclass
class DesignRecord:
    class_id: str
    params: DesignParameters
    design: SymmetricDesign
    members: list[tuple[str, str]]


def read_design_catalog(lines: Iterable[str]) -> list[DesignRecord]:
    out: list[DesignRecord] = []
    it = iter(lines)
    pending = None
    for ln in it:
        ln = ln.strip()
        if not ln:
            continue
        parts = ln.split()
        if parts[0] == "DESIGN":
            try:
                cid, v, k, lam = parts[1], int(parts[2]), int(parts[3]), int(parts[4])
                blocks = [tuple(int(x) for x in next(it).strip().split(",") if x) for _ in range(v)]
            except (ValueError, IndexError, StopIteration) as e:
                raise CatalogError(f"malformed DESIGN record: {e}")
            pending = DesignRecord(cid, DesignParameters(v, k, lam), SymmetricDesign(v, tuple(blocks)), [])
            out.append(pending)
        elif parts[0] == "FROM" and pending is not None and len(parts) == 3:
            pending.members.append((parts[1], parts[2]))
        else:
            raise CatalogError(f"unexpected line in design catalog: {ln!r}")
    for rec in out:
        if rec.members:
            rec.design = SymmetricDesign(rec.design.v, rec.design.blocks, rec.members[0])
    return out

