"""Command-line interface: validate, cluster, baseline, compare."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from typing import Sequence

from .baseline import compare
from .errors import EngineError
from .pipeline import run_baseline, run_pipeline, validate_inputs

logger = logging.getLogger("actor_concepts.cli")

LOG_ENV_VAR = "ACTOR_CONCEPTS_LOG"


def _configure_logging() -> None:
    level_name = os.environ.get(LOG_ENV_VAR, "WARNING").upper()
    level = getattr(logging, level_name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(name)s %(levelname)s %(message)s")


def _add_input_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--mentions", required=True,
                        help="mentions JSONL file")
    parser.add_argument("--embeddings", required=True,
                        help="embeddings TSV file (token TAB floats)")
    parser.add_argument("--relations", required=True,
                        help="NE relations JSONL file")
    parser.add_argument("--config", default=None,
                        help="flat JSON config file (defaults apply if omitted)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="actor-concepts",
        description="Cluster person-group mentions into concepts.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser(
        "validate", help="check inputs without clustering")
    _add_input_flags(p_validate)

    p_cluster = sub.add_parser(
        "cluster", help="run the full staged pipeline")
    _add_input_flags(p_cluster)
    p_cluster.add_argument("--out", required=True, help="output directory")
    p_cluster.add_argument("--format", choices=("text", "json"),
                           default="text")
    p_cluster.add_argument("--threads", type=int, default=1,
                           help="worker threads for matrix construction")
    p_cluster.add_argument("--dump-matrices", default=None, metavar="DIR",
                           help="also write similarity matrices as TSV")

    p_baseline = sub.add_parser(
        "baseline", help="hierarchical-clustering baseline")
    _add_input_flags(p_baseline)
    p_baseline.add_argument("--out", required=True, help="output directory")
    p_baseline.add_argument("--format", choices=("text", "json"),
                            default="text")
    p_baseline.add_argument("--distance-thr", type=float, default=None,
                            help="average-linkage cut (default from config)")

    p_compare = sub.add_parser(
        "compare", help="staged pipeline vs baseline side by side")
    _add_input_flags(p_compare)
    p_compare.add_argument("--out", required=True, help="output directory")
    p_compare.add_argument("--format", choices=("text", "json"),
                           default="text")
    p_compare.add_argument("--threads", type=int, default=1)
    p_compare.add_argument("--distance-thr", type=float, default=None)
    return parser


def _cmd_validate(args: argparse.Namespace) -> int:
    report = validate_inputs(args.mentions, args.embeddings,
                             args.relations, args.config)
    for err in report.errors:
        print(f"error: {err}", file=sys.stderr)
    print(f"errors: {len(report.errors)}")
    if not report.errors:
        print(f"mentions: {report.mentions}")
        print(f"rps: {report.rps}")
        print(f"relations: {report.relations}")
        print(f"embedding rows: {report.embeddings}")
        print(f"oov rps: {len(report.oov_rps)} (rate {report.oov_rate:.4f})")
        for rp_text in report.oov_rps:
            print(f"  oov: {rp_text}")
        print(f"nes outside chains: {len(report.unchained_nes)}")
        for ne in report.unchained_nes:
            print(f"  unchained: {ne}")
    return 0 if not report.errors else 1


def _cmd_cluster(args: argparse.Namespace) -> int:
    result = run_pipeline(
        args.mentions, args.embeddings, args.relations, args.config,
        out_dir=args.out, fmt=args.format, threads=args.threads,
        dump_matrices=args.dump_matrices)
    stats = result.manifest["stages"]
    print(f"clusters: {stats['final_clusters']} "
          f"(unclustered rps: {stats['unclustered_rps']})")
    print(f"report written to {args.out}")
    return 0


def _hc_lines(result, rps) -> list[str]:
    rp_text = {rp.rp_id: rp.rp_text for rp in rps}
    lines = []
    for idx, members in enumerate(result.clusters):
        texts = [rp_text[rp_id] for rp_id in sorted(members)]
        lines.append(f"[{idx}] " + ", ".join(texts))
    lines.append("NOT: " + ", ".join(
        rp_text[rp_id] for rp_id in sorted(result.unclustered)))
    return lines


def _cmd_baseline(args: argparse.Namespace) -> int:
    result, rps, _mentions, _cfg = run_baseline(
        args.mentions, args.embeddings, args.relations, args.config,
        distance_thr=args.distance_thr)
    os.makedirs(args.out, exist_ok=True)
    if args.format == "json":
        rp_text = {rp.rp_id: rp.rp_text for rp in rps}
        payload = {
            "clusters": [
                {"members": sorted(m),
                 "rp_texts": [rp_text[i] for i in sorted(m)]}
                for m in result.clusters],
            "unclustered": sorted(result.unclustered),
            "unclustered_rp_texts": [
                rp_text[i] for i in sorted(result.unclustered)],
        }
        doc = json.dumps(payload, indent=2, ensure_ascii=False) + "\n"
        name = "baseline.json"
    else:
        doc = "\n".join(_hc_lines(result, rps)) + "\n"
        name = "baseline.txt"
    with open(os.path.join(args.out, name), "w", encoding="utf-8") as fh:
        fh.write(doc)
    print(f"baseline clusters: {len(result.clusters)} "
          f"(unclustered rps: {len(result.unclustered)})")
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    pipeline_result = run_pipeline(
        args.mentions, args.embeddings, args.relations, args.config,
        out_dir=args.out, fmt=args.format, threads=args.threads)
    hc_result, rps, _mentions, _cfg = run_baseline(
        args.mentions, args.embeddings, args.relations, args.config,
        distance_thr=args.distance_thr)
    universe = [rp.rp_id for rp in rps]
    report = compare(pipeline_result.final_clusters, hc_result, universe)
    if args.format == "json":
        doc = json.dumps(report.to_dict(), indent=2) + "\n"
        name = "comparison.json"
    else:
        d = report.to_dict()
        doc = "".join(f"{k}: {v}\n" for k, v in d.items())
        name = "comparison.txt"
    with open(os.path.join(args.out, name), "w", encoding="utf-8") as fh:
        fh.write(doc)
    print(f"pair agreement: {report.pair_agreement:.4f}")
    print(f"unclustered fraction ours/baseline: "
          f"{report.ours_unclustered_fraction:.4f}/"
          f"{report.baseline_unclustered_fraction:.4f}")
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "validate": _cmd_validate,
        "cluster": _cmd_cluster,
        "baseline": _cmd_baseline,
        "compare": _cmd_compare,
    }
    try:
        return handlers[args.command](args)
    except EngineError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
