"""Cayley graphs, strong regularity, and canonical labelling of coloured graphs.

The canonical form comes from an individualization-refinement search:

* partitions are refined to equitable ones by repeatedly splitting each
  cell by the number of neighbours a vertex has in every cell;
* the first smallest non-singleton cell is the target, and each of its
  vertices is individualized in turn;
* every node records a digest of its refined quotient; a leaf is ranked by
  the sequence of digests on its path and then by its relabelled adjacency
  (plus colours), the least leaf gives the certificate, and any subtree
  whose digest sequence already exceeds the best one is skipped;
* two leaves with equal relabelled graphs give an automorphism, and the
  automorphisms that fix the current prefix prune children lying in one
  orbit.

Changing any of those rules changes certificates, so certificates carry
:data:`ENGINE_VERSION`.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence, TextIO

import numpy as np

from .errors import CatalogError, GroupTooLarge, NotApplicable
from .group_ring import SubsetOfGroup
from .groups import FiniteGroup
from .permgroup import StabChain

ENGINE_VERSION = "ir-2"
DEFAULT_GRAPH_CAP = 256


@dataclass(frozen=True)
class PdsParameters:
    """``(v, k, lam, mu)``."""

    v: int
    k: int
    lam: int
    mu: int

    def __str__(self) -> str:
        return f"({self.v},{self.k},{self.lam},{self.mu})"

    @property
    def counting_identity(self) -> bool:
        return self.k * (self.k - self.lam - 1) == (self.v - self.k - 1) * self.mu


class Graph:
    """Simple undirected graph with vertex colours."""

    __slots__ = ("n", "adj", "colors", "__dict__")

    def __init__(self, adj, colors: Sequence[int] | None = None):
        a = np.array(adj, dtype=np.uint8)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("adjacency must be square")
        if not np.array_equal(a, a.T):
            raise ValueError("adjacency must be symmetric")
        if a.diagonal().any():
            raise ValueError("graph has loops")
        if (a > 1).any():
            raise ValueError("adjacency must be 0/1")
        a.setflags(write=False)
        self.n = a.shape[0]
        self.adj = a
        self.colors = tuple(int(c) for c in colors) if colors is not None else (0,) * self.n
        if len(self.colors) != self.n:
            raise ValueError("one colour per vertex required")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], colors=None) -> "Graph":
        a = np.zeros((n, n), dtype=np.uint8)
        for u, v in edges:
            a[u, v] = a[v, u] = 1
        return cls(a, colors)

    @cached_property
    def degrees(self) -> np.ndarray:
        return self.adj.sum(axis=1, dtype=np.int64)

    def relabel(self, perm) -> "Graph":
        """Graph where vertex ``perm[x]`` plays the role of ``x``."""
        p = np.asarray(perm, dtype=np.int64)
        inv = np.empty_like(p)
        inv[p] = np.arange(self.n)
        cols = [self.colors[i] for i in inv]
        return Graph(self.adj[np.ix_(inv, inv)], cols)

    def is_automorphism(self, perm) -> bool:
        p = np.asarray(perm, dtype=np.int64)
        if sorted(p.tolist()) != list(range(self.n)):
            return False
        if any(self.colors[i] != self.colors[p[i]] for i in range(self.n)):
            return False
        return bool(np.array_equal(self.adj, self.adj[np.ix_(p, p)]))

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self.colors == other.colors and np.array_equal(self.adj, other.adj)

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={int(self.adj.sum()) // 2})"


def cayley_graph(G: FiniteGroup, T: SubsetOfGroup) -> Graph:
    """``x ~ y`` iff ``x y^-1`` lies in ``T``."""
    els = set(T.elements)
    if G.identity in els or any(int(G.inv[t]) not in els for t in els):
        raise NotApplicable("connection set not regular-reversible", witness=T.elements)
    mask = np.zeros(G.order, dtype=bool)
    mask[list(els)] = True
    diff = G.mul[:, G.inv]  # diff[x, y] = x y^-1
    return Graph(mask[diff].astype(np.uint8))


def common_neighbours(g: Graph) -> np.ndarray:
    a = g.adj.astype(np.int64)
    return a @ a


def is_strongly_regular(g: Graph, p: PdsParameters) -> bool:
    if g.n != p.v or (g.degrees != p.k).any():
        return False
    cn = common_neighbours(g)
    adj = g.adj.astype(bool)
    off = ~adj & ~np.eye(g.n, dtype=bool)
    return bool((cn[adj] == p.lam).all() and (cn[off] == p.mu).all())


def srg_feasibility(p: PdsParameters) -> bool:
    return p.counting_identity


# -- canonical labelling -----------------------------------------------


@dataclass(frozen=True)
class CanonicalCertificate:
    data: bytes
    generators: tuple[tuple[int, ...], ...] = field(default=(), compare=False, repr=False)
    aut_order: int = field(default=1, compare=False)
    labeling: tuple[int, ...] = field(default=(), compare=False, repr=False)
    leaves: int = field(default=0, compare=False)
    version: str = ENGINE_VERSION

    def hex(self) -> str:
        return self.data.hex()


def _rank_rows(keys: np.ndarray) -> tuple[np.ndarray, int]:
    """Dense lexicographic ranks of the rows of a non-negative int array."""
    # big-endian rows compared bytewise sort exactly like the integer rows,
    # and a 1-d void array is much cheaper for np.unique than axis=0
    width = ">u2" if keys.max(initial=0) < 1 << 16 else ">u8"
    k = np.ascontiguousarray(keys.astype(width))
    rows = k.view(np.dtype((np.void, k.shape[1] * k.itemsize))).ravel()
    uniq, inv = np.unique(rows, return_inverse=True)
    return inv.reshape(-1).astype(np.int64), len(uniq)


class _Canon:
    def __init__(self, g: Graph):
        self.g = g
        self.n = g.n
        self.Ab = g.adj
        self.src, self.dst = (x.astype(np.int64) for x in np.nonzero(g.adj))
        self.best: bytes | None = None
        self.best_lab = None
        self.best_key = None
        self.best_path = None
        self.seen: dict[bytes, np.ndarray] = {}
        self.gens: list[np.ndarray] = []
        self.leaves = 0

    def initial(self) -> np.ndarray:
        n = self.n
        cols = np.array(self.g.colors, dtype=np.int64)
        deg = self.g.degrees
        keys = [cols, deg]
        if n and (deg == deg[0]).all():
            # regular graphs: seed with triangle and distance-2 counts
            a = self.g.adj.astype(np.int64)
            a2 = a @ a
            keys.append((a2 * a).sum(axis=1))
            keys.append(((a2 > 0) & (a == 0)).sum(axis=1) - (np.diag(a2) > 0))
        c, _ = _rank_rows(np.column_stack(keys))
        return c

    def refine(self, c: np.ndarray) -> tuple[np.ndarray, bytes]:
        """Equitable refinement of ``c`` and a labelling-invariant digest of
        the resulting quotient (cell sizes and cell-to-cell degrees)."""
        n = self.n
        m = int(c.max()) + 1 if n else 0
        while True:
            counts = np.bincount(self.src * m + c[self.dst], minlength=n * m).reshape(n, m)
            if m == n:
                break
            c2, m2 = _rank_rows(np.column_stack([c, counts]))
            if m2 == m:
                break
            c, m = c2, m2
        first = np.full(m, n, dtype=np.int64)
        np.minimum.at(first, c, np.arange(n))
        quo = np.concatenate([np.bincount(c, minlength=m), counts[first].ravel()])
        return c, hashlib.blake2b(quo.astype("<i4").tobytes(), digest_size=16).digest()

    def leaf(self, c: np.ndarray) -> bytes:
        inv = np.empty(self.n, dtype=np.int64)
        inv[c] = np.arange(self.n)
        sub = self.Ab[np.ix_(inv, inv)]
        cols = np.array(self.g.colors, dtype=np.int64)[inv]
        return np.packbits(sub).tobytes() + cols.astype(">i4").tobytes()

    def visit_leaf(self, c: np.ndarray, path: tuple[bytes, ...]) -> None:
        self.leaves += 1
        cert = self.leaf(c)
        prev = self.seen.get(cert)
        if prev is not None:
            # vertex with label l under c goes to the vertex with label l under prev
            inv_prev = np.empty(self.n, dtype=np.int64)
            inv_prev[prev] = np.arange(self.n)
            gamma = inv_prev[c]
            if (gamma != np.arange(self.n)).any():
                self.gens.append(gamma)
            return
        self.seen[cert] = c
        key = (path, cert)
        if self.best_key is None or key < self.best_key:
            self.best_key, self.best, self.best_lab = key, cert, c
        self.best_path = self.best_key[0]

    def orbits_fixing(self, prefix: list[int]) -> np.ndarray:
        parent = np.arange(self.n)
        gens = [g for g in self.gens if all(g[x] == x for x in prefix)]

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for g in gens:
            for x in range(self.n):
                a, b = find(x), find(int(g[x]))
                if a != b:
                    parent[max(a, b)] = min(a, b)
        return np.array([find(x) for x in range(self.n)])

    def search(self, c: np.ndarray, prefix: list[int], path: tuple[bytes, ...]) -> None:
        c, inv = self.refine(c)
        path = path + (inv,)
        d = len(path)
        if self.best_path is not None:
            ref = self.best_path[:d]
            if path > ref:
                return
            if path < ref:
                self.best_path = None
        m = int(c.max()) + 1 if self.n else 0
        if m == self.n:
            self.visit_leaf(c, path)
            return
        sizes = np.bincount(c, minlength=m)
        target = int(np.flatnonzero(sizes == sizes[sizes > 1].min())[0])
        cell = np.flatnonzero(c == target)
        explored: list[int] = []
        ngens = -1
        orb = None
        for v in cell:
            v = int(v)
            if explored:
                if len(self.gens) != ngens:
                    orb = self.orbits_fixing(prefix)
                    ngens = len(self.gens)
                if any(orb[v] == orb[w] for w in explored):
                    continue
            c2, _ = _rank_rows(np.column_stack([c, np.arange(self.n) != v]))
            self.search(c2, prefix + [v], path)
            explored.append(v)


def canonical_labeling(g: Graph, cap: int = DEFAULT_GRAPH_CAP) -> CanonicalCertificate:
    if g.n > cap:
        raise GroupTooLarge("graph too large for canonical labelling", witness=g.n)
    eng = _Canon(g)
    if g.n == 0:
        return CanonicalCertificate(b"", (), 1, (), 0)
    eng.search(eng.initial(), [], ())
    gens = tuple(tuple(int(x) for x in p) for p in eng.gens)
    order = StabChain(g.n, gens).order() if gens else 1
    return CanonicalCertificate(eng.best, gens, order, tuple(int(x) for x in eng.best_lab), eng.leaves)


def canonical_form(g: Graph) -> Graph:
    cert = canonical_labeling(g)
    return g.relabel(cert.labeling)


def are_isomorphic(g1: Graph, g2: Graph) -> bool:
    return g1.n == g2.n and canonical_labeling(g1).data == canonical_labeling(g2).data


def classify_graphs(graphs: Sequence[Graph], ids: Sequence | None = None) -> list[tuple[CanonicalCertificate, list]]:
    """Bucket by certificate; buckets in order of first appearance."""
    ids = list(ids) if ids is not None else list(range(len(graphs)))
    buckets: dict[bytes, tuple[CanonicalCertificate, list]] = {}
    for gid, g in zip(ids, graphs):
        cert = canonical_labeling(g)
        if cert.data in buckets:
            buckets[cert.data][1].append(gid)
        else:
            buckets[cert.data] = (cert, [gid])
    return list(buckets.values())


# -- files -------------------------------------------------------------


def write_graphs(fh: TextIO, graphs: Iterable[tuple[str, Graph]]) -> None:
    for gid, g in graphs:
        fh.write(f"GRAPH {gid} {g.n}\n")
        for row in g.adj:
            fh.write("".join("1" if x else "0" for x in row) + "\n")


def read_graphs(lines: Iterable[str]) -> list[tuple[str, Graph]]:
    out = []
    it = iter(lines)
    for ln in it:
        if not ln.strip() or ln.startswith("#"):
            continue
        parts = ln.split()
        if parts[0] != "GRAPH" or len(parts) != 3:
            raise CatalogError(f"expected GRAPH header, got {ln.strip()!r}")
        n = int(parts[2])
        rows = [next(it).strip() for _ in range(n)]
        try:
            a = np.array([[int(ch) for ch in r] for r in rows], dtype=np.uint8)
            out.append((parts[1], Graph(a)))
        except (ValueError, StopIteration) as e:
            raise CatalogError(f"bad adjacency for graph {parts[1]}: {e}")
    return out


def write_certificates(fh: TextIO, certs: Iterable[tuple[str, CanonicalCertificate]]) -> None:
    fh.write(f"# canonical certificates engine {ENGINE_VERSION}\n")
    for gid, c in certs:
        fh.write(f"{gid} {c.aut_order} {c.hex()}\n")


def read_certificates(lines: Iterable[str]) -> dict[str, bytes]:
    it = iter(lines)
    head = next(it, "")
    if not head.startswith("# canonical certificates engine "):
        raise CatalogError("missing certificate header")
    version = head.split()[-1]
    if version != ENGINE_VERSION:
        raise CatalogError(f"certificates from engine {version}, this is {ENGINE_VERSION}")
    out = {}
    for ln in it:
        if ln.strip():
            gid, _, hx = ln.split()
            out[gid] = bytes.fromhex(hx)
    return out
