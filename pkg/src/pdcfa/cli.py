"""Command-line driver: ``pdcfa analyze`` and ``pdcfa run``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import concrete
from .abstract import KCFA, OneCFA, PolyCFA, ZeroCFA, ainject, read_annotations
from .clients import analyze_unwidened, analyze_widened, report, stats_report
from .dot import dsg_dot, ecg_dot
from .dsg import Limits
from .errors import LimitExceeded, PdcfaError, SExprError
from .syntax import parse, unique_binders

EMIT_KINDS = ("flows-json", "dsg-dot", "ecg-dot", "trace", "stats")
SUFFIX = {
    "flows-json": ".flows.json",
    "dsg-dot": ".dsg.dot",
    "ecg-dot": ".ecg.dot",
    "trace": ".trace.txt",
    "stats": ".stats.json",
}


class UsageError(Exception):
    pass


def parse_policy(text: str):
    if text == "0cfa":
        return ZeroCFA()
    if text == "1cfa":
        return OneCFA()
    if text.startswith("kcfa:"):
        k = text[5:]
        if not k.isdigit() or int(k) < 1:
            raise UsageError(f"kcfa needs an integer k >= 1, got {text!r}")
        return KCFA(int(k))
    if text.startswith("polycfa:"):
        path = Path(text[8:])
        if not text[8:]:
            raise UsageError("polycfa needs an annotation file: polycfa:FILE")
        try:
            return PolyCFA(read_annotations(path.read_text(encoding="utf-8")))
        except (OSError, ValueError) as err:
            raise UsageError(f"{path}: {err}") from None
    raise UsageError(f"unknown policy {text!r}")


def parse_emit(values) -> list:
    kinds = []
    for v in values or ():
        for k in v.split(","):
            k = k.strip()
            if k not in EMIT_KINDS:
                raise UsageError(f"unknown --emit kind {k!r} (choose from {', '.join(EMIT_KINDS)})")
            if k not in kinds:
                kinds.append(k)
    return kinds


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _write(artifacts: dict, out: str, stem: str) -> None:
    if out == "-":
        for kind, text in artifacts.items():
            sys.stdout.write(text)
        return
    outdir = Path(out)
    outdir.mkdir(parents=True, exist_ok=True)
    for kind, text in artifacts.items():
        (outdir / (stem + SUFFIX[kind])).write_text(text, encoding="utf-8")


def _load(path: str):
    text = Path(path).read_text(encoding="utf-8")
    e = unique_binders(parse(text))
    ainject(e)  # rejects open programs
    return e


def _concrete(e, max_steps: int, emit: list) -> dict:
    trace = concrete.run(e, max_steps)
    out = {}
    if "trace" in emit:
        out["trace"] = concrete.format_trace(trace)
    if "stats" in emit:
        result = trace.result
        out["stats"] = _dump({
            "status": trace.status.value,
            "steps": trace.steps,
            "result": None if result is None else result.lam.label,
        })
    return out


def _analysis(e, args, emit: list) -> dict:
    policy = parse_policy(args.policy)
    if args.analysis == "pushdown-widened":
        r = analyze_widened(policy, e)
        root = r.system.root
    else:
        limits = Limits(args.max_nodes, args.max_edges)
        r = analyze_unwidened(policy, e, args.algorithm, limits)
        root = r.dsg.root
    out = {}
    if "flows-json" in emit:
        out["flows-json"] = _dump(report(r))
    if "dsg-dot" in emit:
        name = "dscfg" if r.widened else "dsg"
        out["dsg-dot"] = dsg_dot(r.nodes, r.edges, root, args.verbose, name)
    if "ecg-dot" in emit:
        out["ecg-dot"] = ecg_dot(r.nodes, r.h_edges, root, args.verbose)
    if "stats" in emit:
        out["stats"] = _dump(stats_report(r))
    if "trace" in emit:
        out.update({"trace": _concrete(e, args.max_steps, ["trace"])["trace"]})
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pdcfa", description="Pushdown control-flow analysis for ANF programs.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("input", help="program file (.anf)")
        sp.add_argument("--max-steps", type=int, default=1000)
        sp.add_argument("--emit", action="append", metavar="KINDS",
                        help="comma-separated: " + ", ".join(EMIT_KINDS))
        sp.add_argument("--out", default=".", help="output directory, or - for stdout")

    a = sub.add_parser("analyze", help="run an analysis and write reports")
    common(a)
    a.add_argument("--analysis", default="pushdown-unwidened",
                   choices=["concrete", "pushdown-unwidened", "pushdown-widened"])
    a.add_argument("--policy", default="0cfa", help="0cfa | 1cfa | kcfa:K | polycfa:FILE")
    a.add_argument("--algorithm", default="worklist", choices=["worklist", "naive"])
    a.add_argument("--max-nodes", type=int, default=Limits.max_nodes)
    a.add_argument("--max-edges", type=int, default=Limits.max_edges)
    a.add_argument("--verbose", action="store_true", help="env/store digests in DOT labels")

    r = sub.add_parser("run", help="run the concrete machine")
    common(r)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            emit = parse_emit(args.emit) or ["stats"]
        else:
            emit = parse_emit(args.emit) or ["flows-json", "stats"]
        e = _load(args.input)
        if args.command == "run" or args.analysis == "concrete":
            artifacts = _concrete(e, args.max_steps, emit)
        else:
            artifacts = _analysis(e, args, emit)
        _write(artifacts, args.out, Path(args.input).stem)
    except SExprError as err:
        where = f"{args.input}:{err.line}:{err.col}" if err.line is not None else args.input
        msg = str(err).split(": ", 1)[-1] if err.line is not None else str(err)
        print(f"{where}: error: {msg}", file=sys.stderr)
        return 1
    except LimitExceeded as err:
        print(f"{args.input}: limit exceeded: {err}", file=sys.stderr)
        return 2
    except (PdcfaError, UsageError, OSError) as err:
        print(f"{args.input}: error: {err}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
