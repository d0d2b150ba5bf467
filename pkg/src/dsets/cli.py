"""Command line front end.

Exit codes::

    0   success
    1   other library error
    2   unknown group label
    3   malformed catalogue or library file
    4   verification failed
    5   checkpoint does not match the run
    64  bad command line
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__, kernels
from .automorphisms import automorphism_group
from .catalog import content_lines, ds_header_params, read_ds, sniff, write_ds
from .designs import (
    classify_designs,
    design_witness,
    develop_design,
    read_design_catalog,
    write_design_catalog,
)
from .errors import DsetsError
from .graphs import (
    ENGINE_VERSION,
    PdsParameters,
    cayley_graph,
    classify_graphs,
    is_strongly_regular,
    read_graphs,
    write_certificates,
    write_graphs,
)
from .group_ring import (
    DesignParameters,
    SubsetOfGroup,
    difference_multiset,
    image_equation_witness,
    project_image,
)
from .groups import normal_subgroups, quotient
from .library import get_group, read_library, register
from .pds import derive_all, is_regular, is_reversible, parse_pds_line, pds_witness, write_pds
from .search import CHECKPOINT_ENV, MODES, enumerate_difference_sets

log = logging.getLogger("dsets")

EXIT_VERIFY = 4
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class VerificationFailed(DsetsError):
    exit_code = EXIT_VERIFY


@dataclass
class RunManifest:
    command: str
    argv: list[str]
    groups: list[str] = field(default_factory=list)
    params: str = ""
    mode: str = ""
    jobs: int = 1
    checkpoint_dir: str = ""
    outputs: list[str] = field(default_factory=list)
    versions: dict = field(default_factory=dict)
    wall_time: float = 0.0

    def write(self, path: Path) -> None:
        path.write_text(json.dumps(asdict(self), indent=2, sort_keys=True) + "\n")


def _versions() -> dict:
    return {"dsets": __version__, "kernels": kernels.BACKEND, "canonical": ENGINE_VERSION}


def _manifest_path(out: Path) -> Path:
    return out.with_name(out.name + ".manifest.json")


def _load_library(args) -> None:
    for path in getattr(args, "library", None) or []:
        register(read_library(path))


# -- subcommands ------------------------------------------------------------


def cmd_ingest(args) -> int:
    records = read_library(args.groupfile)
    index = {}
    for rec in records:
        G = rec.build()
        index[rec.label] = {"order": G.order, "degree": rec.degree, "generators": len(rec.generators)}
        print(f"{rec.label}\torder {G.order}")
    if args.index:
        Path(args.index).write_text(json.dumps(index, indent=2, sort_keys=True) + "\n")
    print(f"{len(records)} group records validated")
    return 0


def cmd_enumerate(args) -> int:
    t0 = time.perf_counter()
    G = get_group(args.group)
    p = DesignParameters.parse(args.params)
    ckdir = args.checkpoint_dir or os.environ.get(CHECKPOINT_ENV) or None
    found = enumerate_difference_sets(G, p, mode=args.mode, checkpoint_dir=ckdir, jobs=args.jobs)
    out = Path(args.out or f"ds_{G.label}_{p.v}-{p.k}-{p.lam}.txt")
    with open(out, "w") as fh:
        write_ds(fh, G.label, found, p)
    man = RunManifest(
        "enumerate",
        list(args.argv),
        [G.label],
        str(p),
        args.mode,
        args.jobs,
        str(ckdir or ""),
        [str(out)],
        _versions(),
        round(time.perf_counter() - t0, 3),
    )
    man.write(_manifest_path(out))
    flag = "" if args.mode == "sound" else " (fast mode: possibly incomplete)"
    print(f"{G.label} {p}: {len(found)} difference sets{flag} -> {out}")
    return 0


def _read_ds_sets(paths):
    """``{label: [SubsetOfGroup, ...]}`` preserving file order."""
    by_label: dict[str, list] = defaultdict(list)
    for path in paths:
        for rec in read_ds(path):
            G = get_group(rec.label)
            by_label[rec.label].append(SubsetOfGroup.of(G, rec.elements))
    return by_label


def cmd_classify_designs(args) -> int:
    t0 = time.perf_counter()
    by_label = _read_ds_sets(args.inputs)
    designs = {}
    for label, sets in by_label.items():
        G = get_group(label)
        for i, D in enumerate(sets):
            d = develop_design(G, D, str(i))
            designs[d.provenance] = d
    catalog = classify_designs(list(designs.values()), jobs=args.jobs)
    out = Path(args.out or "designs.txt")
    with open(out, "w") as fh:
        write_design_catalog(fh, catalog, designs)
    RunManifest(
        "classify-designs", list(args.argv), sorted(by_label), str(catalog.params), outputs=[str(out)],
        versions=_versions(), wall_time=round(time.perf_counter() - t0, 3),
    ).write(_manifest_path(out))
    print(f"{len(designs)} designs in {len(catalog)} isomorphism classes -> {out}")
    return 0


def cmd_derive_pds(args) -> int:
    t0 = time.perf_counter()
    by_label = _read_ds_sets(args.inputs)
    out = Path(args.out or "pds.txt")
    with open(out, "w") as fh:
        for label, sets in by_label.items():
            G = get_group(label)
            if not sets:
                continue
            k = len(sets[0])
            p = DesignParameters(G.order, k, k * (k - 1) // (G.order - 1))
            fam = derive_all(label, sets, p, automorphism_group(G))
            write_pds(fh, fam)
            print(f"{label}: {len(fam.pds)} PDS, {len(fam.regular)} regular, {len(fam.peeled)} regular with k-1")
    RunManifest(
        "derive-pds", list(args.argv), sorted(by_label), outputs=[str(out)],
        versions=_versions(), wall_time=round(time.perf_counter() - t0, 3),
    ).write(_manifest_path(out))
    return 0


def cmd_srg(args) -> int:
    t0 = time.perf_counter()
    groups: dict[tuple, list] = defaultdict(list)
    for ln in content_lines(args.input):
        rec = parse_pds_line(ln)
        if rec.regular:
            groups[(rec.params.v, rec.params.k, rec.params.lam, rec.params.mu)].append(rec)
    out = Path(args.out or "graphs.txt")
    certs = []
    summary = {}
    with open(out, "w") as fh:
        for key in sorted(groups, key=lambda t: (-t[1], t)):
            recs = groups[key]
            p = PdsParameters(*key)
            graphs, ids = [], []
            for i, rec in enumerate(recs):
                G = get_group(rec.label)
                g = cayley_graph(G, SubsetOfGroup.of(G, rec.elements))
                if not is_strongly_regular(g, p):
                    raise VerificationFailed(f"Cayley graph of {rec.label} PDS is not strongly regular", witness=rec.elements)
                gid = f"{rec.label}:{p.k}:{i}"
                graphs.append(g)
                ids.append(gid)
            write_graphs(fh, zip(ids, graphs))
            classes = classify_graphs(graphs, ids)
            for cert, members in classes:
                certs.append((members[0], cert))
            summary[str(p)] = {"graphs": len(graphs), "classes": len(classes)}
            print(f"{p}: {len(graphs)} graphs, {len(classes)} isomorphism classes")
    cert_path = out.with_name(out.stem + ".certs" + out.suffix)
    with open(cert_path, "w") as fh:
        write_certificates(fh, certs)
    RunManifest(
        "srg", list(args.argv), outputs=[str(out), str(cert_path)], versions=_versions(),
        wall_time=round(time.perf_counter() - t0, 3),
    ).write(_manifest_path(out))
    summary_path = out.with_name(out.stem + ".summary.json")
    summary_path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return 0


def _verify_ds(path) -> list[str]:
    errors = []
    header = ds_header_params(path)
    for n, rec in enumerate(read_ds(path, strict=False)):
        G = get_group(rec.label)
        D = SubsetOfGroup.of(G, rec.elements)
        if header is not None:
            p = DesignParameters(*header)
        else:
            lam, r = divmod(rec.k * (rec.k - 1), G.order - 1)
            if r:
                errors.append(f"DS #{n} {rec.label}: k={rec.k} admits no integer lambda")
                continue
            p = DesignParameters(G.order, rec.k, lam)
        if p.v != G.order:
            errors.append(f"DS #{n} {rec.label}: group order {G.order} but v={p.v}")
            continue
        counts = difference_multiset(D).coeff
        bad = next((g for g in range(G.order) if g != G.identity and counts[g] != p.lam), None)
        if bad is not None:
            errors.append(f"DS #{n} {rec.label}: element {bad} occurs {counts[bad]} times as a difference, expected {p.lam}")
            continue
        if len(D) != p.k:
            errors.append(f"DS #{n} {rec.label}: {len(D)} elements, expected k={p.k}")
            continue
        for N in normal_subgroups(G):
            f = quotient(G, N)
            w = image_equation_witness(project_image(f, D.as_element()), p, N.order)
            if w is not None:
                errors.append(f"DS #{n} {rec.label}: image mod |N|={N.order} fails at {w[0]} ({w[1]} != {w[2]})")
                break
    return errors


def _verify_design(path) -> list[str]:
    errors = []
    for rec in read_design_catalog(content_lines(path)):
        w = design_witness(rec.design, rec.params)
        if w is not None:
            errors.append(f"DESIGN {rec.class_id}: {w[0]} axiom fails at {w[1]} (value {w[2]})")
    return errors


def _verify_pds(path) -> list[str]:
    errors = []
    for n, ln in enumerate(content_lines(path)):
        rec = parse_pds_line(ln)
        G = get_group(rec.label)
        T = SubsetOfGroup.of(G, rec.elements)
        w = pds_witness(T, rec.params)
        if w is not None:
            errors.append(f"PDS #{n} {rec.label}: element {w[0]} occurs {w[1]} times, expected {w[2]}")
        elif rec.regular != is_regular(T):
            errors.append(f"PDS #{n} {rec.label}: regularity flag is wrong")
        elif rec.params.lam != rec.params.mu and not is_reversible(T):
            errors.append(f"PDS #{n} {rec.label}: lam != mu but the set is not reversible")
    return errors


def _verify_graphs(path) -> list[str]:
    errors = []
    for gid, g in read_graphs(content_lines(path)):
        # recover (v, k, lam, mu) from the graph itself
        deg = g.degrees
        k = int(deg[0]) if g.n else 0
        cn = g.adj.astype(int) @ g.adj.astype(int)
        adj = g.adj.astype(bool)
        off = ~adj
        off[range(g.n), range(g.n)] = False
        lam = int(cn[adj][0]) if adj.any() else 0
        mu = int(cn[off][0]) if off.any() else 0
        if not is_strongly_regular(g, PdsParameters(g.n, k, lam, mu)):
            errors.append(f"GRAPH {gid}: not strongly regular")
    return errors


def cmd_verify(args) -> int:
    kind = sniff(args.input)
    check = {"DS": _verify_ds, "DESIGN": _verify_design, "PDS": _verify_pds, "GRAPH": _verify_graphs}
    errors = check[kind](args.input) if kind in check else []
    for e in errors:
        print("FAIL", e)
    if errors:
        raise VerificationFailed(f"{len(errors)} record(s) failed verification in {args.input}")
    print(f"verified {args.input} ({kind})")
    return 0


def _report_rows(paths) -> dict[str, dict]:
    rows: dict[str, dict] = defaultdict(dict)
    for path in paths:
        kind = sniff(path)
        if kind == "DS":
            for rec in read_ds(path):
                r = rows[rec.label]
                r["difference_sets"] = r.get("difference_sets", 0) + 1
        elif kind == "DESIGN":
            classes: dict[str, set] = defaultdict(set)
            for rec in read_design_catalog(content_lines(path)):
                for label, _ in rec.members:
                    classes[label].add(rec.class_id)
            for label, ids in classes.items():
                rows[label]["design_classes"] = len(ids)
        elif kind == "PDS":
            for ln in content_lines(path):
                rec = parse_pds_line(ln)
                p = rec.params
                r = rows[rec.label]
                key = f"pds_{p.k}_{p.lam}_{p.mu}"
                r[key] = r.get(key, 0) + 1
                if rec.regular:
                    key = f"regular_pds_{p.k}_{p.lam}_{p.mu}"
                    r[key] = r.get(key, 0) + 1
    return rows


def _label_key(label: str):
    return tuple(int(x) if x.isdigit() else x for x in label.split("."))


def cmd_report(args) -> int:
    rows = _report_rows(args.inputs)
    cols = sorted({c for r in rows.values() for c in r}, key=lambda c: (not c.startswith("difference"), c))
    lines = ["group & " + " & ".join(cols)]
    totals = {c: 0 for c in cols}
    for label in sorted(rows, key=_label_key):
        r = rows[label]
        cells = [str(r.get(c, 0)) for c in cols]
        for c in cols:
            totals[c] += r.get(c, 0)
        head = "[" + ", ".join(label.split(".")) + "]"
        lines.append(f"{head} & " + " & ".join(cells))
    lines.append("total & " + " & ".join(str(totals[c]) for c in cols))
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    print(text, end="")
    json_path = args.json or (args.out and str(Path(args.out).with_suffix(".json")))
    if json_path:
        data = {"columns": cols, "rows": {k: rows[k] for k in sorted(rows, key=_label_key)}, "totals": totals}
        Path(json_path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    return 0


# -- entry point ------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="dsets", description="Difference sets, designs, PDS and SRGs in small groups.")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress")
    ap.add_argument("--library", action="append", help="extra group library file (repeatable)")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ingest", help="validate a group library file")
    p.add_argument("groupfile")
    p.add_argument("--index", help="write a JSON index of the records")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("enumerate", help="enumerate difference sets in one group")
    p.add_argument("--group", required=True, help="group label, e.g. 96.230")
    p.add_argument("--params", required=True, help="v,k,lambda")
    p.add_argument("--mode", choices=MODES, default="sound")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--checkpoint-dir", help=f"checkpoint directory (default ${CHECKPOINT_ENV})")
    p.add_argument("--out")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("classify-designs", help="develop and classify designs")
    p.add_argument("--in", dest="inputs", nargs="+", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_classify_designs)

    p = sub.add_parser("derive-pds", help="partial difference sets from a DS catalogue")
    p.add_argument("--in", dest="inputs", nargs="+", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_derive_pds)

    p = sub.add_parser("srg", help="Cayley graphs of regular PDS and their classes")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_srg)

    p = sub.add_parser("verify", help="re-check every record of a catalogue")
    p.add_argument("--in", dest="input", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("report", help="per-group count table")
    p.add_argument("--in", dest="inputs", nargs="+", required=True)
    p.add_argument("--out")
    p.add_argument("--json")
    p.set_defaults(func=cmd_report)
    return ap


def run(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    args.argv = argv
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        _load_library(args)
        return args.func(args)
    except DsetsError as e:
        msg = f"error: {e}"
        if e.witness is not None:
            msg += f" (witness: {e.witness})"
        print(msg, file=sys.stderr)
        return e.exit_code


def main() -> None:
    sys.exit(run())
