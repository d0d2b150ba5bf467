"""Reading and writing the text group library.

Record layout::

    GROUP <label> <degree> <ngens>
    <image list of generator 1>
    ...
    <blank line>
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, TextIO

from .errors import CatalogError, UnknownGroup
from .groups import FiniteGroup, group_from_generators


@dataclass(frozen=True)
class GroupRecord:
    label: str
    degree: int
    generators: tuple[tuple[int, ...], ...]

    def build(self) -> FiniteGroup:
        return group_from_generators(self.degree, self.generators, label=self.label)


def parse_library(lines: Iterable[str], source: str = "<library>") -> list[GroupRecord]:
    records = []
    lines = list(lines)
    i = 0
    while i < len(lines):
        line = lines[i].strip()
        i += 1
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] != "GROUP" or len(parts) != 4:
            raise CatalogError(f"{source}:{i}: expected 'GROUP <label> <degree> <ngens>'", witness=line)
        label = parts[1]
        try:
            degree, ngens = int(parts[2]), int(parts[3])
        except ValueError:
            raise CatalogError(f"{source}:{i}: degree and generator count must be integers", witness=line)
        gens = []
        for _ in range(ngens):
            if i >= len(lines):
                raise CatalogError(f"{source}: record {label} truncated")
            row = lines[i].split()
            i += 1
            try:
                perm = tuple(int(x) for x in row)
            except ValueError:
                raise CatalogError(f"{source}:{i}: non-integer image list", witness=row)
            if len(perm) != degree or sorted(perm) != list(range(degree)):
                raise CatalogError(f"{source}:{i}: generator is not a permutation of degree {degree}", witness=row)
            gens.append(perm)
        if i < len(lines) and lines[i].strip():
            raise CatalogError(f"{source}:{i + 1}: record {label} not terminated by a blank line")
        records.append(GroupRecord(label, degree, tuple(gens)))
    return records


def write_library(records: Iterable[GroupRecord], fh: TextIO) -> None:
    for r in records:
        fh.write(f"GROUP {r.label} {r.degree} {len(r.generators)}\n")
        for g in r.generators:
            fh.write(" ".join(str(x) for x in g) + "\n")
        fh.write("\n")


def read_library(path: str | Path) -> list[GroupRecord]:
    path = Path(path)
    with path.open() as fh:
        return parse_library(fh, source=str(path))


@lru_cache(maxsize=None)
def bundled_records() -> dict[str, GroupRecord]:
    text = resources.files("dsets").joinpath("data/groups.txt").read_text()
    return {r.label: r for r in parse_library(text.splitlines(), source="groups.txt")}


_extra: dict[str, GroupRecord] = {}


def register(records: Iterable[GroupRecord]) -> None:
    """Make records from an external library file available by label."""
    for r in records:
        _extra[r.label] = r
    get_group.cache_clear()


def labels() -> list[str]:
    return sorted({*bundled_records(), *_extra}, key=_label_key)


def _label_key(label: str):
    try:
        n, i = label.split(".")
        return (int(n), int(i), label)
    except ValueError:
        return (10**9, 0, label)


@lru_cache(maxsize=None)
def get_group(label: str) -> FiniteGroup:
    rec = _extra.get(label) or bundled_records().get(label)
    if rec is None:
        raise UnknownGroup(f"unknown group label {label!r}")
    return rec.build()
