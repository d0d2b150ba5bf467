"""Line-oriented catalogue files.

Difference sets are stored one per line as ``DS <group-label> <k> e1,...,ek``,
optionally under a ``# params v,k,lam`` header; designs, PDS and graphs use the formats of their own modules.  Lines starting
with ``#`` are comments.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, TextIO

from .errors import CatalogError

KINDS = ("DS", "DESIGN", "PDS", "GRAPH")


@dataclass(frozen=True)
class DsRecord:
    label: str
    k: int
    elements: tuple[int, ...]


def format_ds(label: str, elements: Iterable[int]) -> str:
    els = list(elements)
    return f"DS {label} {len(els)} " + ",".join(str(x) for x in els)


def parse_ds_line(line: str, strict: bool = True) -> DsRecord:
    parts = line.split()
    try:
        if parts[0] != "DS":
            raise ValueError("expected DS tag")
        k = int(parts[2])
        els = tuple(int(x) for x in parts[3].split(",")) if len(parts) > 3 else ()
    except (ValueError, IndexError) as e:
        raise CatalogError(f"malformed DS line {line.strip()!r}: {e}")
    if strict and len(els) != k:
        raise CatalogError(f"DS line declares k={k} but lists {len(els)} elements", witness=line.strip())
    return DsRecord(parts[1], k, els)


def write_ds(fh: TextIO, label: str, subsets, params=None) -> None:
    if params is not None:
        fh.write(f"# params {params.v},{params.k},{params.lam}\n")
    for D in subsets:
        fh.write(format_ds(label, D.elements) + "\n")


def content_lines(path: str | Path) -> list[str]:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise CatalogError(f"cannot read {path}: {e}")
    return [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]


def read_ds(path: str | Path, strict: bool = True) -> list[DsRecord]:
    return [parse_ds_line(ln, strict) for ln in content_lines(path)]


def ds_header_params(path: str | Path) -> tuple[int, int, int] | None:
    """``(v, k, lam)`` from a ``# params`` header, if the file has one."""
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as e:
        raise CatalogError(f"cannot read {path}: {e}")
    for ln in lines:
        if ln.startswith("# params "):
            try:
                v, k, lam = (int(x) for x in ln.split()[2].split(","))
            except ValueError:
                raise CatalogError(f"bad params header {ln.strip()!r}")
            return v, k, lam
    return None


def sniff(path: str | Path) -> str:
    """Kind of catalogue stored in ``path``."""
    for ln in content_lines(path):
        tag = ln.split()[0]
        if tag in KINDS:
            return tag
        raise CatalogError(f"{path}: unknown record tag {tag!r}")
    return "EMPTY"
