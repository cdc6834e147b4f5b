"""Command-line driver.

Exit codes: 0 success, 1 runtime error (bad input file, unsupported
request), 2 bad flags. The result payload goes to ``--output`` (default
stdout). The elapsed mining time, which excludes loading, goes to stderr
so that payloads can be diffed.

Payloads:
  tc   ``triangles: <n>``
  cf   ``<k>-cliques: <n>`` followed, with ``--list``, by one clique per line
  mc   TSV ``pattern<TAB>support``, sorted by descending support then pattern
  fsm  same TSV; support is the MNI value

With ``--json`` the payload is instead one JSON object on a single line with
keys ``app``, ``elapsed``, ``k``, ``minsup`` (fsm), ``count`` (tc/cf) and
``patterns`` (mc/fsm, pattern text -> support).
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

from . import apps
from .graph import GraphFormatError, load_edge_list, load_labeled_graph

FORMATS = {".el": "edgelist", ".txt": "edgelist", ".lg": "labeled"}


@dataclass(frozen=True)
class CliConfig:
    app: str
    input: Path
    format: str
    k: int | None
    minsup: int | None
    threads: int
    chunk_size: int
    orient: bool
    output: Path | None
    list_embeddings: bool
    json: bool
    mni: str


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gpminer", description="Graph pattern mining (TC, CF, MC, FSM).")
    p.add_argument("--app", required=True, choices=["tc", "cf", "mc", "fsm"])
    p.add_argument("--input", required=True, type=Path)
    p.add_argument("--format", choices=["edgelist", "labeled"],
                   help="input format; inferred from .el/.lg when omitted")
    p.add_argument("--k", type=int, help="clique/motif size in vertices; for fsm, patterns have k-1 edges")
    p.add_argument("--minsup", type=int, help="minimum MNI support (fsm)")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--chunk-size", type=int, default=1024, help="edge-blocking chunk size, 0 disables")
    p.add_argument("--no-orient", dest="orient", action="store_false",
                   help="keep tc/cf on the undirected graph")
    p.add_argument("--output", type=Path)
    p.add_argument("--list", dest="list_embeddings", action="store_true", help="list cliques (cf)")
    p.add_argument("--json", action="store_true", help="single-line JSON record instead of text")
    p.add_argument("--mni", choices=["canonical", "orbit"], default="canonical",
                   help="fsm domain mapping: one canonical position map per embedding, or pooled "
                        "over automorphism orbits (default: canonical)")
    return p


def parse_config(argv, parser: argparse.ArgumentParser | None = None) -> CliConfig:
    parser = parser or build_parser()
    ns = parser.parse_args(argv)
    fmt = ns.format or FORMATS.get(ns.input.suffix.lower())
    if fmt is None:
        fmt = "labeled" if ns.app == "fsm" else "edgelist"
    if ns.threads < 1:
        parser.error("--threads must be >= 1")
    if ns.chunk_size < 0:
        parser.error("--chunk-size must be >= 0")
    k = ns.k
    if ns.app == "tc":
        if k not in (None, 3):
            parser.error("tc counts 3-vertex patterns; drop --k or use --k 3")
        k = 3
    elif k is None:
        parser.error(f"--k is required for {ns.app}")
    if ns.app == "cf" and not 3 <= k <= apps.MAX_CLIQUE_K:
        parser.error(f"cf needs 3 <= k <= {apps.MAX_CLIQUE_K}")
    if ns.app == "mc" and k not in apps.MOTIF_KS:
        parser.error(f"mc needs k in {apps.MOTIF_KS}")
    if ns.app == "fsm":
        if fmt != "labeled":
            parser.error("fsm needs the labeled format")
        if ns.minsup is None:
            parser.error("fsm needs --minsup")
        if k < 2:
            parser.error("fsm needs k >= 2")
    if ns.list_embeddings and ns.app != "cf":
        parser.error("--list applies to cf only")
    return CliConfig(ns.app, ns.input, fmt, k, ns.minsup, ns.threads, ns.chunk_size, ns.orient,
                     ns.output, ns.list_embeddings, ns.json, ns.mni)


def execute(cfg: CliConfig) -> apps.AppResult:
    loader = load_labeled_graph if cfg.format == "labeled" else load_edge_list
    g = loader(cfg.input)
    chunk = cfg.chunk_size or None
    if cfg.app == "tc":
        return apps.triangle_count(g, cfg.threads, chunk, orient=cfg.orient)
    if cfg.app == "cf":
        return apps.clique_find(g, cfg.k, cfg.threads, chunk, orient=cfg.orient, listing=cfg.list_embeddings)
    if cfg.app == "mc":
        return apps.motif_count(g, cfg.k, cfg.threads, chunk)
    return apps.fsm(g, cfg.k, cfg.minsup, cfg.threads, mapping=cfg.mni)


def run(argv=None) -> int:
    parser = build_parser()
    try:
        cfg = parse_config(argv, parser)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        result = execute(cfg)
    except (GraphFormatError, ValueError, OSError) as exc:
        print(f"gpminer: error: {exc}", file=sys.stderr)
        return 1
    text = result.to_json() + "\n" if cfg.json else result.payload()
    if cfg.output is not None:
        cfg.output.write_text(text)
    else:
        sys.stdout.write(text)
    print(f"elapsed: {result.elapsed:.6f} s", file=sys.stderr)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
