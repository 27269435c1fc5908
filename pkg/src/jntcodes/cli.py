"""Command-line interface: ``python -m jntcodes {validate,classify,verify-table,export}``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import warnings
from contextlib import nullcontext
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import analysis, engine
from .catalog import CatalogEntry, CatalogError, find_entries, load_catalog, validate_entry

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INCOMPLETE = 0, 1, 2, 3
AUTO_THRESHOLD = engine.EXHAUSTIVE_MAX_DEGREE

log = logging.getLogger("jntcodes")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    catalog: str | None = None
    groups: list[str] = field(default_factory=list)
    k_min: int = 2
    k_max: int | None = None
    mode: str = "auto"
    orbit_cap: int = engine.TRIPLE_ORBIT_CAP
    neighbour_cap: int = analysis.NEIGHBOUR_CAP
    out: str | None = None
    detail: str | None = None
    workers: int = 1
    perturb: int | None = None
    line: int | None = None
    verbose: int = 0


@dataclass
class GroupResult:
    label: str
    records: list[analysis.CodeRecord]
    incomplete: list[str]


def _parse_k(text: str) -> tuple[int, int | None]:
    lo, sep, hi = text.partition(":")
    try:
        k_min = int(lo) if lo else 2
        k_max = int(hi) if hi else (None if sep else k_min)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad k range {text!r}") from None
    return k_min, k_max


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--catalog", help="catalog JSON (default: $JNT_CATALOG or the bundled file)")
    common.add_argument("--group", help="comma-separated NAME or NAME/DEGREE selectors")
    common.add_argument("--k", type=_parse_k, help="MIN[:MAX] codeword size range")
    common.add_argument("--mode", choices=("chain", "exhaustive", "auto"), default="auto")
    common.add_argument("--orbit-cap", type=int, default=engine.TRIPLE_ORBIT_CAP)
    common.add_argument("--neighbour-cap", type=int, default=analysis.NEIGHBOUR_CAP)
    common.add_argument("--out", help="output file (directory for export)")
    common.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    common.add_argument("-v", "--verbose", action="count", default=0)

    p = argparse.ArgumentParser(prog="jntcodes", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="self-check the group catalog")
    c = sub.add_parser("classify", parents=[common], help="find SIT codes and report them as TSV")
    c.add_argument("--detail", help="write per-code JSON detail here")
    t = sub.add_parser("verify-table", parents=[common], help="compare against the reference table")
    t.add_argument("--perturb", type=int, metavar="LINE",
                   help="negative control: shift the expected distance of LINE by one")
    e = sub.add_parser("export", parents=[common], help="write codes as binary constant-weight words")
    e.add_argument("--line", type=int, help="export the code matching this reference line")
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    k_min, k_max = ns.k if ns.k else (2, None)
    return RunConfig(
        command=ns.command, catalog=ns.catalog,
        groups=[g for g in (ns.group or "").split(",") if g],
        k_min=k_min, k_max=k_max, mode=ns.mode, orbit_cap=ns.orbit_cap,
        neighbour_cap=ns.neighbour_cap, out=ns.out, detail=getattr(ns, "detail", None),
        workers=max(1, ns.workers), perturb=getattr(ns, "perturb", None),
        line=getattr(ns, "line", None), verbose=ns.verbose)


def _select(cfg: RunConfig, catalog: list[CatalogEntry]) -> list[CatalogEntry]:
    if not cfg.groups:
        return list(catalog)
    out = []
    for sel in cfg.groups:
        hits = find_entries(catalog, sel)
        if not hits:
            raise UsageError(f"no catalog entry matches {sel!r}")
        out.extend(h for h in hits if h not in out)
    return out


def _mode_for(cfg: RunConfig, entry: CatalogEntry) -> str:
    if cfg.mode == "auto":
        return "exhaustive" if entry.degree <= AUTO_THRESHOLD else "chain"
    return cfg.mode


def classify_group(entry: CatalogEntry, catalog: list[CatalogEntry], cfg: RunConfig,
                   expected: analysis.ExpectedTable = analysis.EXPECTED) -> GroupResult:
    mode = _mode_for(cfg, entry)
    v = entry.degree
    k_max = v // 2 if cfg.k_max is None else min(cfg.k_max, v // 2)
    k_min = max(2, cfg.k_min)
    log.info("%s: %s search, k in %d..%d", entry.label, mode, k_min, k_max)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", engine.IncompleteSearchWarning)
        if mode == "chain":
            cands = engine.chain_search(entry, k_min, k_max)
        else:
            cands = []
            for k in range(k_min, k_max + 1):
                cands.extend(engine.exhaustive_search(entry, k, cfg.orbit_cap))
    incomplete = [str(w.message) for w in caught if issubclass(w.category, engine.IncompleteSearchWarning)]
    cands = engine.merge_equivalent(cands, engine.normalising_generators(entry, catalog))
    records = [analysis.analyse(c, expected, cfg.neighbour_cap) for c in cands]
    for r in records:
        log.info("%s: k=%d |code|=%d delta=%d", entry.label, r.k, r.size, r.delta)
    return GroupResult(entry.label, records, incomplete)


def _classify_task(args):
    label, catalog_path, cfg = args
    catalog = load_catalog(catalog_path)
    entry = next(e for e in catalog if e.label == label)
    return classify_group(entry, catalog, cfg)


def classify_all(cfg: RunConfig, catalog: list[CatalogEntry], entries: list[CatalogEntry],
                 expected: analysis.ExpectedTable = analysis.EXPECTED) -> list[GroupResult]:
    for e in entries:
        if cfg.mode == "exhaustive" and e.degree > engine.EXHAUSTIVE_MAX_DEGREE:
            raise UsageError(f"{e.label}: exhaustive mode needs degree <= {engine.EXHAUSTIVE_MAX_DEGREE}")
    if cfg.workers > 1 and len(entries) > 1:
        # each worker reloads the catalog; results come back in submission order
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            return list(pool.map(_classify_task, [(e.label, cfg.catalog, cfg) for e in entries]))
    return [classify_group(e, catalog, cfg, expected) for e in entries]


def _report_incomplete(results: list[GroupResult]) -> bool:
    msgs = [f"{r.label}: {m}" for r in results for m in r.incomplete]
    for m in msgs:
        print(f"warning: incomplete search: {m}", file=sys.stderr)
    return bool(msgs)


def _open_out(path: str | None):
    if path is None:
        return nullcontext(sys.stdout)
    return open(path, "w", encoding="utf-8", newline="\n")


def cmd_validate(cfg: RunConfig, catalog: list[CatalogEntry]) -> int:
    entries = _select(cfg, catalog)
    ok = True
    with _open_out(cfg.out) as out:
        for e in entries:
            rep = validate_entry(e)
            ok &= rep.ok
            for line in rep.lines():
                if cfg.verbose or line.startswith("FAIL"):
                    out.write(line + "\n")
            out.write(f"{'ok' if rep.ok else 'FAILED'}\t{e.label}\t{len(rep.checks)} checks\n")
        out.flush()
    return EXIT_OK if ok else EXIT_FAIL


def _record_detail(r: analysis.CodeRecord) -> dict:
    return {
        "group": r.group, "v": r.v, "k": r.k, "size": r.size, "delta": r.delta,
        "representative": str(r.candidate.gamma),
        "stabilizer_order": r.candidate.stabilizer_order,
        "stabilizer": r.candidate.stabilizer.name if r.candidate.stabilizer else None,
        "source": r.candidate.source,
        "neighbour_transitive": r.neighbour_transitive,
        "self_complementary": r.self_complementary,
        "designs": [{"t": t, "lambda": lam} for t, lam in r.design],
        "hamming": {"length": r.hamming[0], "weight": r.hamming[1],
                    "min_distance": r.hamming[2], "words": r.hamming[3]},
    }


def cmd_classify(cfg: RunConfig, catalog: list[CatalogEntry]) -> int:
    entries = _select(cfg, catalog)
    results = classify_all(cfg, catalog, entries)
    records = [r for g in results for r in g.records]
    report = analysis.reproduce_table(records, groups=[(e.name, e.degree) for e in entries])
    with _open_out(cfg.out) as out:
        out.write(analysis.HEADER + "\n")
        for row in report.rows:
            if row.record is not None:
                out.write(row.tsv() + "\n")
        out.flush()
    if cfg.detail:
        Path(cfg.detail).write_text(json.dumps([_record_detail(r) for r in
                                                sorted(records, key=lambda r: r.sort_key)], indent=1) + "\n")
    return EXIT_INCOMPLETE if _report_incomplete(results) else EXIT_OK


def cmd_verify_table(cfg: RunConfig, catalog: list[CatalogEntry]) -> int:
    expected = analysis.EXPECTED
    if cfg.perturb is not None:
        if not 1 <= cfg.perturb <= len(expected.rows):
            raise UsageError(f"--perturb must name a line 1..{len(expected.rows)}")
        expected = expected.perturbed(cfg.perturb)
    entries = _select(cfg, catalog)
    results = classify_all(cfg, catalog, entries, expected)
    records = [r for g in results for r in g.records]
    report = analysis.reproduce_table(records, expected, [(e.name, e.degree) for e in entries])
    with _open_out(cfg.out) as out:
        out.write(report.tsv())
        out.flush()
    print(f"delta>=3 lines: {report.distance3_lines}", file=sys.stderr)
    print(f"delta=2 lines: {report.distance2_lines}", file=sys.stderr)
    for row in report.mismatches:
        print(f"mismatch: {row.tsv()}", file=sys.stderr)
    if _report_incomplete(results):
        return EXIT_INCOMPLETE
    return EXIT_OK if report.ok else EXIT_FAIL


def export_filename(r: analysis.CodeRecord) -> str:
    safe = "".join(ch if ch.isalnum() or ch in "._-" else "_" for ch in r.group)
    return f"{safe}_v{r.v}_k{r.k}_n{r.size}.txt"


def cmd_export(cfg: RunConfig, catalog: list[CatalogEntry]) -> int:
    if cfg.out is None:
        raise UsageError("export needs --out DIRECTORY")
    if cfg.line is not None:
        ref = next((r for r in analysis.EXPECTED.rows if r.line == cfg.line), None)
        if ref is None:
            raise UsageError(f"no reference line {cfg.line}")
        cfg.groups = cfg.groups or [f"{ref.group}/{ref.v}"]
        cfg.k_min = cfg.k_max = min(ref.k, ref.v - ref.k)
    entries = _select(cfg, catalog)
    results = classify_all(cfg, catalog, entries)
    records = [r for g in results for r in g.records]
    if cfg.line is not None:
        records = [r for r in records if (r.group, r.v, r.k, r.size) == (ref.group, ref.v, ref.k, ref.size)]
    if not records:
        print("warning: selection contains no codes; nothing written", file=sys.stderr)
        return EXIT_INCOMPLETE if _report_incomplete(results) else EXIT_OK
    outdir = Path(cfg.out)
    outdir.mkdir(parents=True, exist_ok=True)
    for r in sorted(records, key=lambda r: r.sort_key):
        path = outdir / export_filename(r)
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            analysis.export_hamming(analysis.Code.from_candidate(r.candidate), fh, r.delta)
        print(path)
    return EXIT_INCOMPLETE if _report_incomplete(results) else EXIT_OK


COMMANDS = {"validate": cmd_validate, "classify": cmd_classify,
            "verify-table": cmd_verify_table, "export": cmd_export}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    cfg = config_from_args(ns)
    logging.basicConfig(level=logging.WARNING - 10 * min(cfg.verbose, 2),
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        catalog = load_catalog(cfg.catalog)
    except OSError as exc:
        print(f"error: cannot read catalog: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CatalogError as exc:
        print(f"error: invalid catalog: {exc}", file=sys.stderr)
        return EXIT_FAIL
    try:
        return COMMANDS[cfg.command](cfg, catalog)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
