"""Full order-96 reproduction: every bundled group of order 96, all (96,20,4)
difference sets, their designs, partial difference sets and SRGs.

This is long-running.  Each group's results are written to
``<out>/groups/<label>.json`` as soon as they are known, and the search
itself checkpoints under ``<out>/checkpoints``, so an interrupted run picks
up where it stopped.  At the end the per-group rows and the totals are
compared against ``expected_order96.csv`` and
``expected_regular_order96.csv``.

    python scripts/reproduce_order96.py --out runs/order96
    python scripts/reproduce_order96.py --out runs/order96 --groups 96.195 96.230
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

from dsets.automorphisms import automorphism_group
from dsets.designs import design_certificate, develop_design
from dsets.graphs import PdsParameters, canonical_labeling, cayley_graph, is_strongly_regular
from dsets.group_ring import DesignParameters
from dsets.library import get_group
from dsets.pds import derive_all
from dsets.search import enumerate_difference_sets

HERE = Path(__file__).resolve().parent
P = DesignParameters(96, 20, 4)
TOTALS = {
    "difference_sets": 2627,
    "design_classes": 583,
    "genuinely_nonabelian": 563,
    "abelian_provenance": 20,
    "pds_20_4_4": 145300,
    "regular_pds_20_4_4": 150,
    "regular_pds_19_2_4": 33,
    "srg_20_4_4": 58,
    "srg_19_2_4": 12,
}


def read_expected(path: Path) -> tuple[list[str], dict[str, list[int]]]:
    with open(path) as fh:
        head = fh.readline().lstrip("# ").strip().split(",")
        rows = {r[0]: [int(x) for x in r[1:]] for r in csv.reader(fh) if r}
    return head[1:], rows


def srg_certificates(G, sets, p: PdsParameters) -> list[str]:
    out = []
    for T in sets:
        g = cayley_graph(G, T)
        if not is_strongly_regular(g, p):
            raise SystemExit(f"{G.label}: Cayley graph of a regular PDS is not strongly regular")
        out.append(canonical_labeling(g).hex())
    return out


def run_group(label: str, out: Path) -> dict:
    path = out / "groups" / f"{label}.json"
    if path.exists():
        return json.loads(path.read_text())
    t0 = time.perf_counter()
    G = get_group(label)
    A = automorphism_group(G)
    found = enumerate_difference_sets(G, P, A=A, checkpoint_dir=out / "checkpoints")
    t1 = time.perf_counter()
    certs = [design_certificate(develop_design(G, D, str(i))).hex() for i, D in enumerate(found)]
    t2 = time.perf_counter()
    fam = derive_all(label, found, P, A)
    row = {
        "label": label,
        "abelian": G.is_abelian,
        "difference_sets": [list(D.elements) for D in found],
        "design_certificates": certs,
        "pds_20_4_4": len(fam.pds),
        "regular_20_4_4": [list(T.elements) for T in fam.regular],
        "regular_19_2_4": [list(T.elements) for T in fam.peeled],
        "srg_20_4_4": srg_certificates(G, fam.regular, PdsParameters(96, 20, 4, 4)),
        "srg_19_2_4": srg_certificates(G, fam.peeled, PdsParameters(96, 19, 2, 4)),
        "seconds": {
            "search": round(t1 - t0, 2),
            "designs": round(t2 - t1, 2),
            "pds": round(time.perf_counter() - t2, 2),
        },
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(row) + "\n")
    tmp.replace(path)
    return row


def summarize(rows: dict[str, dict]) -> tuple[dict[str, list[int]], dict[str, list[int]], dict[str, int]]:
    main, regular = {}, {}
    for label, r in rows.items():
        main[label] = [len(r["difference_sets"]), len(set(r["design_certificates"])), r["pds_20_4_4"]]
        if r["regular_20_4_4"] or r["regular_19_2_4"]:
            regular[label] = [
                len(r["regular_20_4_4"]),
                len(r["regular_19_2_4"]),
                len(set(r["srg_20_4_4"])),
                len(set(r["srg_19_2_4"])),
            ]
    all_certs = {c for r in rows.values() for c in r["design_certificates"]}
    abelian = {c for r in rows.values() if r["abelian"] for c in r["design_certificates"]}
    totals = {
        "difference_sets": sum(m[0] for m in main.values()),
        "design_classes": len(all_certs),
        "genuinely_nonabelian": len(all_certs - abelian),
        "abelian_provenance": len(abelian),
        "pds_20_4_4": sum(m[2] for m in main.values()),
        "regular_pds_20_4_4": sum(len(r["regular_20_4_4"]) for r in rows.values()),
        "regular_pds_19_2_4": sum(len(r["regular_19_2_4"]) for r in rows.values()),
        "srg_20_4_4": len({c for r in rows.values() for c in r["srg_20_4_4"]}),
        "srg_19_2_4": len({c for r in rows.values() for c in r["srg_19_2_4"]}),
    }
    return main, regular, totals


def compare(name, got: dict[str, list[int]], want: dict[str, list[int]], labels) -> int:
    bad = 0
    for label in labels:
        g, w = got.get(label), want.get(label)
        if g is None and w is None:
            continue
        if g != w:
            bad += 1
            print(f"  MISMATCH {name} {label}: got {g}, expected {w}")
    return bad


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--out", default="runs/order96", help="output directory")
    ap.add_argument("--groups", nargs="*", help="restrict to these labels (totals are then skipped)")
    args = ap.parse_args(argv)
    out = Path(args.out)
    cols, expected = read_expected(HERE / "expected_order96.csv")
    rcols, expected_reg = read_expected(HERE / "expected_regular_order96.csv")
    labels = args.groups or list(expected)
    rows = {}
    for n, label in enumerate(labels, 1):
        t0 = time.perf_counter()
        rows[label] = r = run_group(label, out)
        print(
            f"[{n}/{len(labels)}] {label}: {len(r['difference_sets'])} DS, "
            f"{len(set(r['design_certificates']))} design classes, {r['pds_20_4_4']} PDS "
            f"({time.perf_counter() - t0:.1f}s)",
            flush=True,
        )
    main_rows, reg_rows, totals = summarize(rows)
    bad = compare("main", main_rows, expected, labels)
    bad += compare("regular", reg_rows, {k: v for k, v in expected_reg.items() if k in labels}, labels)
    print(f"per-group rows: {bad} mismatches over {len(labels)} groups")
    report = {
        "columns": cols,
        "regular_columns": rcols,
        "rows": main_rows,
        "regular_rows": reg_rows,
        "totals": totals,
        "row_mismatches": bad,
    }
    if not args.groups:
        for key, want in TOTALS.items():
            ok = totals[key] == want
            bad += not ok
            print(f"{'PASS' if ok else 'FAIL'} total {key}: {totals[key]} (expected {want})")
    (out / "summary.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
