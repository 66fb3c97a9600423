"""Command-line entry point: ``e8cliques <command> [options]``.

Exit status is 0 on success, 1 when a computed count disagrees with its
reference value or a census does not close, 2 on invalid options and 3 when a
tier budget or orbit cap aborts the run.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from collections import Counter
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .cliques import (
    TIER_BUDGETS,
    BudgetExceeded,
    SearchTask,
    default_tier,
    enumerate_k_cliques,
    enumerate_maximal,
    face_counts,
)
from .graph import build_subgraph, colors_label, parse_colors
from .orbits import census_verify, orbit_partition
from .roots import N_ROOTS, ROOTS, neighbor_histogram
from .weyl import (
    CapExceeded,
    are_conjugate,
    are_conjugate_sets,
    automorphism_group,
    extend_isometry,
    pointwise_stabilizer_order,
    setwise_stabilizer,
)

FACE_COUNTS = {
    "1-simplex": 6720,
    "2-simplex": 60480,
    "3-simplex": 241920,
    "4-simplex": 483840,
    "5-simplex": 483840,
    "6-simplex": 207360,
    "7-simplex": 17280,
    "7-crosspolytope": 2160,
}
ROOT_HISTOGRAM = {1: 56, 0: 126, -1: 56, -2: 1}


class CheckFailed(RuntimeError):
    """A computed value disagrees with its reference value."""


@dataclass
class RunConfig:
    command: str
    colors: Optional[frozenset[int]]
    seed: tuple[int, ...]
    tier: str
    workers: int
    checkpoint: Optional[str]
    fmt: str
    out: Optional[str]


# --- parsing helpers ----------------------------------------------------------------


def _indices(text: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(x) for x in text.replace(";", ",").split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated root indices, got {text!r}") from None
    for v in vals:
        if not 1 <= v <= N_ROOTS:
            raise argparse.ArgumentTypeError(f"root index {v} outside 1..{N_ROOTS}")
    return vals


def _colors(text: str) -> frozenset[int]:
    try:
        return parse_colors(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _sizes(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated sizes, got {text!r}") from None


def _pairs(text: str) -> list[tuple[int, int]]:
    pairs = []
    for item in text.split(","):
        if not item.strip():
            continue
        a, sep, b = item.partition(":")
        if not sep:
            raise argparse.ArgumentTypeError(f"map entries look like src:dst, got {item!r}")
        pairs.append((_indices(a)[0], _indices(b)[0]))
    return pairs


def _joined(vertices: Sequence[int]) -> str:
    return ";".join(str(int(v)) for v in vertices)


# --- output -------------------------------------------------------------------------


def _render(columns: list[str], rows: list[list], fmt: str, extra: Optional[dict] = None) -> str:
    if fmt == "json":
        payload = dict(extra or {})
        payload["rows"] = [dict(zip(columns, r)) for r in rows]
        return json.dumps(payload, indent=2, default=_json_default) + "\n"
    cells = [[_joined(c) if isinstance(c, (tuple, list)) else str(c) for c in r] for r in rows]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        w.writerows(cells)
        return buf.getvalue()
    widths = [max([len(h)] + [len(r[i]) for r in cells]) for i, h in enumerate(columns)]
    lines = ["  ".join(h.rjust(wd) for h, wd in zip(columns, widths))]
    lines += ["  ".join(c.rjust(wd) for c, wd in zip(r, widths)) for r in cells]
    if extra:
        lines += [f"{k}: {_scalar(v)}" for k, v in extra.items()]
    return "\n".join(lines) + "\n"


def _scalar(v) -> str:
    if isinstance(v, (list, tuple)):
        return ",".join(str(x) for x in v)
    return str(v)


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (frozenset, set)):
        return sorted(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _emit(text: str, cfg: RunConfig) -> None:
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --- commands -----------------------------------------------------------------------


def cmd_roots(args, cfg: RunConfig) -> int:
    rows = [[i] + [int(x) for x in ROOTS[i]] for i in range(1, N_ROOTS + 1)]
    _emit(_render(["index"] + [f"x{j}" for j in range(1, 9)], rows, cfg.fmt, {"coordinates": "doubled"}), cfg)
    return 0


def cmd_stats(args, cfg: RunConfig) -> int:
    hists = Counter()
    for e in range(1, N_ROOTS + 1):
        h = neighbor_histogram(e)
        if h != ROOT_HISTOGRAM:
            raise CheckFailed(f"root {e} has neighbor histogram {h}")
        hists.update(h)
    rows = [[c, ROOT_HISTOGRAM[c]] for c in sorted(ROOT_HISTOGRAM, reverse=True)]
    extra = {"roots": N_ROOTS, "all_roots_agree": True}
    if cfg.colors is not None:
        g = build_subgraph(cfg.colors)
        degrees = Counter(g.degree(v) for v in range(1, N_ROOTS + 1))
        extra["graph"] = colors_label(cfg.colors)
        extra["degrees"] = {int(d): n for d, n in sorted(degrees.items())}
    _emit(_render(["color", "neighbors"], rows, cfg.fmt, extra), cfg)
    return 0


def cmd_faces(args, cfg: RunConfig) -> int:
    counts = face_counts()
    rows = [[name, n, FACE_COUNTS[name]] for name, n in counts.items()]
    _emit(_render(["face", "count", "expected"], rows, cfg.fmt), cfg)
    bad = [name for name, n, want in rows if n != want]
    if bad:
        raise CheckFailed(f"face counts differ from reference for {', '.join(bad)}")
    return 0


def _search(args, cfg: RunConfig, sizes: Optional[Sequence[int]], collect: bool):
    if cfg.colors is None:
        raise SystemExit(_usage_error("--colors is required"))
    min_size = min(sizes) if sizes else args.min_size
    task = SearchTask.make(cfg.colors, cfg.seed, min_size=min_size, emit_sizes=sizes or None)
    found: list[tuple[int, ...]] = []
    res = enumerate_maximal(
        task,
        found.append if collect else None,
        workers=cfg.workers,
        tier=cfg.tier,
        checkpoint=None if collect else cfg.checkpoint,
    )
    return task, res, found


def cmd_enum(args, cfg: RunConfig) -> int:
    sizes = args.size
    if not args.maximal:
        if not sizes:
            raise SystemExit(_usage_error("enum without --maximal needs --size"))
        rows = []
        for k in sizes:
            if args.stream:
                arr = enumerate_k_cliques(cfg.colors, k, cfg.seed, collect=True)
                _write_stream(args.stream, arr.tolist(), append=k != sizes[0])
                rows.append([k, len(arr)])
            else:
                rows.append([k, enumerate_k_cliques(cfg.colors, k, cfg.seed)])
        extra = {"graph": colors_label(cfg.colors), "seed": list(cfg.seed), "maximal": False}
        _emit(_render(["size", "count"], rows, cfg.fmt, extra), cfg)
        return 0
    if args.stream and cfg.checkpoint:
        raise SystemExit(_usage_error("--stream cannot be combined with --checkpoint"))
    task, res, found = _search(args, cfg, sizes, collect=bool(args.stream))
    if args.stream:
        _write_stream(args.stream, found)
    if res.resumed:
        print(f"e8cliques: resumed {res.resumed} of {res.branches} branches from {cfg.checkpoint}", file=sys.stderr)
    hist = res.histogram if not sizes else {s: res.histogram.get(s, 0) for s in sizes}
    if args.histogram or cfg.fmt == "json":
        payload = {str(k): v for k, v in sorted(hist.items())}
        text = json.dumps(payload) + "\n" if cfg.fmt == "json" else _render(
            ["size", "count"], [[k, v] for k, v in sorted(hist.items())], cfg.fmt
        )
    else:
        text = _render(
            ["size", "count"],
            [[k, v] for k, v in sorted(hist.items())],
            cfg.fmt,
            {"graph": colors_label(cfg.colors), "seed": list(cfg.seed), "nodes": res.nodes},
        )
    _emit(text, cfg)
    return 0


def _write_stream(path: str, cliques, append: bool = False) -> None:
    with open(path, "a" if append else "w") as fh:
        for c in cliques:
            fh.write(" ".join(str(int(v)) for v in c) + "\n")


def _orbit_rows(records) -> tuple[list[str], list[list]]:
    per_size = Counter(r.size for r in records)
    columns = ["K", "|K|", "|W_K|", "|Aut(K)|", "#O", "members", "orth_pairs", "inverse_pair", "chi", "sum_in_2L"]
    rows = [
        [
            list(r.representative),
            r.size,
            r.stabilizer,
            r.aut_order,
            per_size[r.size],
            r.members,
            r.orthogonal_pairs,
            int(r.inverse_pair),
            list(r.chi),
            int(r.sum_in_2lambda),
        ]
        for r in sorted(records, key=lambda r: (r.size, -r.stabilizer, r.representative))
    ]
    return columns, rows


def cmd_orbits(args, cfg: RunConfig) -> int:
    if cfg.colors is None:
        raise SystemExit(_usage_error("--colors is required"))
    if args.maximal:
        _, _, cliques = _search(args, cfg, args.size, collect=True)
    else:
        if not args.size:
            raise SystemExit(_usage_error("orbits without --maximal needs --size"))
        cliques = []
        for k in args.size:
            cliques += [tuple(c) for c in enumerate_k_cliques(cfg.colors, k, cfg.seed, collect=True).tolist()]
    closed = not cfg.seed
    part = orbit_partition(cliques, dedupe=args.dedupe, closed=closed)
    columns, rows = _orbit_rows(part.records)
    extra = {
        "graph": colors_label(cfg.colors),
        "seed": list(cfg.seed),
        "cliques": len(cliques),
        "all_certified": all(r.certified for r in part.records),
    }
    _emit(_render(columns, rows, cfg.fmt, extra), cfg)
    return 0


def cmd_conjugate(args, cfg: RunConfig) -> int:
    if len(args.seq) != 2:
        raise SystemExit(_usage_error("conjugate takes exactly two --seq options"))
    s, t = args.seq
    if len(s) != len(t):
        raise SystemExit(_usage_error("sequences must have equal length"))
    if args.sets:
        ok = are_conjugate_sets(s, t)
        mode = "sets"
    else:
        ok = are_conjugate(s, t)
        mode = "sequences"
    _emit(_render(["mode", "first", "second", "conjugate"], [[mode, list(s), list(t), int(ok)]], cfg.fmt), cfg)
    return 0


def cmd_extend(args, cfg: RunConfig) -> int:
    if not args.map:
        raise SystemExit(_usage_error("extend needs --map"))
    w = extend_isometry(args.map)
    extra = {"pairs": [list(p) for p in args.map], "extends": w is not None}
    if w is not None:
        extra["identity"] = w.is_identity()
        extra["matrix4"] = w.matrix4.tolist()
        extra["permutation"] = w.to_json()
    if cfg.fmt == "json":
        text = json.dumps(extra, default=_json_default) + "\n"
    else:
        pairs = ",".join(f"{a}:{b}" for a, b in args.map)
        row = [[pairs, int(w is not None), int(w is not None and w.is_identity())]]
        text = _render(["map", "extends", "identity"], row, cfg.fmt)
        if w is not None and cfg.fmt == "text":
            text += "matrix (x4):\n" + "\n".join(" ".join(f"{x:3d}" for x in r) for r in w.matrix4.tolist()) + "\n"
    _emit(text, cfg)
    return 0


def cmd_stabilizer(args, cfg: RunConfig) -> int:
    ks = cfg.seed
    if not ks:
        raise SystemExit(_usage_error("stabilizer needs --seed"))
    st = setwise_stabilizer(ks)
    aut = automorphism_group(ks).order if len(ks) <= 64 else None
    row = [[list(sorted(ks)), len(ks), st.order, pointwise_stabilizer_order(ks), aut, 696729600 // st.order]]
    _emit(_render(["K", "|K|", "|W_K|", "pointwise", "|Aut(K)|", "orbit"], row, cfg.fmt), cfg)
    return 0


def cmd_census(args, cfg: RunConfig) -> int:
    if cfg.colors is None or not cfg.seed:
        raise SystemExit(_usage_error("census-verify needs --colors and --seed"))
    if not args.size:
        raise SystemExit(_usage_error("census-verify needs --size"))
    _, res, cliques = _search(args, cfg, args.size, collect=True)
    part = orbit_partition(cliques, dedupe=args.dedupe)
    rep = census_verify(cfg.colors, cfg.seed, part.records, histogram=res.histogram, sizes=args.size)
    columns = ["K", "|K|", "|W_K|", "m", "contribution"]
    rows = [
        [list(r["representative"]), len(r["representative"]), r["stabilizer"], r["m"], r["contribution"]]
        for r in rep.rows
    ]
    extra = {
        "graph": colors_label(cfg.colors),
        "seed": list(cfg.seed),
        "seed_stabilizer": rep.seed_stabilizer,
        "by_size": {str(k): v for k, v in rep.by_size.items()} if cfg.fmt == "json" else _by_size_text(rep.by_size),
        "ok": rep.ok,
    }
    _emit(_render(columns, rows, cfg.fmt, extra), cfg)
    if not rep.ok:
        bad = [s for s, v in rep.by_size.items() if not v["ok"]]
        raise CheckFailed(f"census does not close for sizes {bad}")
    return 0


def _by_size_text(by_size: dict) -> str:
    return " ".join(f"{s}:{v['predicted']}/{v['observed']}" for s, v in by_size.items())


# --- entry point --------------------------------------------------------------------


def _usage_error(msg: str) -> int:
    print(f"e8cliques: error: {msg}", file=sys.stderr)
    return 2


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--colors", type=_colors, help="color set, e.g. -1,0")
    common.add_argument("--seed", type=_indices, default=(), help="root indices of the seed clique")
    common.add_argument("--tier", choices=sorted(TIER_BUDGETS), help="search node budget (default from E8CLIQUES_TIER)")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--checkpoint", help="append-only branch log for resumable counting")
    common.add_argument("--format", dest="fmt", choices=("text", "csv", "json"), default="text")
    common.add_argument("--out", help="write the report here instead of stdout")

    parser = argparse.ArgumentParser(prog="e8cliques", description="Cliques of the E8 root graph and their W-orbits.")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("roots", parents=[common], help="table of the 240 roots (doubled coordinates)")
    sub.add_parser("stats", parents=[common], help="neighbor histograms and degrees")
    sub.add_parser("faces", parents=[common], help="face counts of the root polytope")

    p = sub.add_parser("enum", parents=[common], help="clique enumeration")
    p.add_argument("--size", type=_sizes, default=(), help="clique sizes to report")
    p.add_argument("--min-size", type=int, default=0)
    p.add_argument("--maximal", action="store_true", help="maximal cliques instead of all k-cliques")
    p.add_argument("--histogram", action="store_true", help="print the size histogram only")
    p.add_argument("--stream", help="write cliques to this file, one per line")

    for name, helptext in (("orbits", "orbit table of a clique family"), ("census-verify", "census completeness check")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--size", type=_sizes, default=())
        p.add_argument("--min-size", type=int, default=0)
        p.add_argument("--maximal", action="store_true", default=name == "census-verify")
        p.add_argument("--dedupe", choices=("pairwise", "sample"), default="pairwise")

    p = sub.add_parser("conjugate", parents=[common], help="W-conjugacy of two root sequences")
    p.add_argument("--seq", type=_indices, action="append", default=[])
    p.add_argument("--sets", action="store_true", help="compare as unordered sets")

    p = sub.add_parser("extend", parents=[common], help="extend a partial isometry to W")
    p.add_argument("--map", type=_pairs, help="pairs src:dst, comma separated")

    sub.add_parser("stabilizer", parents=[common], help="stabilizer orders of the --seed set")
    return parser


COMMANDS = {
    "roots": cmd_roots,
    "stats": cmd_stats,
    "faces": cmd_faces,
    "enum": cmd_enum,
    "orbits": cmd_orbits,
    "conjugate": cmd_conjugate,
    "extend": cmd_extend,
    "stabilizer": cmd_stabilizer,
    "census-verify": cmd_census,
}


def _glue_negative_values(argv: Sequence[str]) -> list[str]:
    # argparse takes "-2,0" for an option; glue such values onto their flag
    out: list[str] = []
    it = iter(argv)
    for tok in it:
        if tok in ("--colors", "--seq", "--map", "--seed"):
            nxt = next(it, None)
            if nxt is not None:
                out.append(f"{tok}={nxt}")
                continue
        out.append(tok)
    return out


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(_glue_negative_values(sys.argv[1:] if argv is None else argv))
    try:
        tier = args.tier or default_tier()
    except ValueError as exc:
        return _usage_error(str(exc))
    if args.workers < 1:
        return _usage_error("--workers must be positive")
    cfg = RunConfig(args.command, args.colors, tuple(args.seed), tier, args.workers, args.checkpoint, args.fmt, args.out)
    try:
        return COMMANDS[args.command](args, cfg)
    except SystemExit as exc:
        return int(exc.code or 0)
    except CheckFailed as exc:
        print(f"e8cliques: check failed: {exc}", file=sys.stderr)
        return 1
    except (BudgetExceeded, CapExceeded) as exc:
        print(f"e8cliques: aborted: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        return _usage_error(str(exc))


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
