"""Command line interface.

Subcommands: index, search, evaluate, sweep, compare. Machine-readable
results go to stdout and are byte-stable across reruns; timing and
diagnostics go to stderr on dedicated "time." lines. Exit codes: 0 success,
1 metric anomaly (nothing could be evaluated), 2 input or configuration
error.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import replace

from . import baseline, evaluation, trec
from .errors import ConfigError, FormatError, HgoeError, InputError
from .hypergraph import Hypergraph, Variant
from .indexer import index_corpus, load_corpus, load_embeddings, load_synonyms
from .ranking import RankingParams, run_timed, rws

VARIANT_CHOICES = [v.value for v in Variant]
ENGINE_CHOICES = ["rws", "tfidf", "bm25"]

_CONFIG_KEYS = {
    "corpus", "variant", "variants", "lexicon", "embeddings", "topics", "qrels",
    "out", "length", "repeats", "rng_seed", "k", "tag",
    "node_fatigue", "edge_fatigue", "node_fatigue_grid", "edge_fatigue_grid",
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (HgoeError, FileNotFoundError, IsADirectoryError, NotADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hgoe",
        description="Hypergraph-of-entity retrieval: index, search, evaluate, sweep, compare.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("index", help="build a hypergraph index from a .jsonl corpus")
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--corpus", help="corpus .jsonl path")
    p.add_argument("--variant", choices=VARIANT_CHOICES)
    p.add_argument("--lexicon", help="synonym lexicon .tsv (one synset per line)")
    p.add_argument("--embeddings", help="word2vec text embeddings")
    p.add_argument("--out", help="output index path")
    p.set_defaults(handler=cmd_index)

    p = sub.add_parser("search", help="rank documents for one query or a topics file")
    p.add_argument("--index", help="hypergraph index path (rws engine)")
    p.add_argument("--corpus", help="corpus .jsonl (baseline engines, or rws without an index)")
    p.add_argument("--variant", choices=VARIANT_CHOICES)
    p.add_argument("--lexicon")
    p.add_argument("--embeddings")
    p.add_argument("--engine", choices=ENGINE_CHOICES, default="rws")
    p.add_argument("--query", help="ad hoc query text")
    p.add_argument("--topic-id", default="q1", help="topic id used with --query")
    p.add_argument("--topics", help="topics .tsv (topicId<TAB>query)")
    _add_walk_flags(p)
    p.add_argument("--k", type=int, default=1000, help="entries kept per topic")
    p.add_argument("--tag", default="hgoe", help="run tag written to the run lines")
    p.add_argument("--out", help="run file path (default: stdout)")
    p.set_defaults(handler=cmd_search)

    p = sub.add_parser("evaluate", help="score a run file against qrels")
    p.add_argument("--run", required=True)
    p.add_argument("--qrels", required=True)
    p.add_argument("--k", type=int, default=10, help="cutoff for precision at k")
    p.add_argument("--json", dest="json_out", help="also write a JSON report here")
    p.set_defaults(handler=cmd_evaluate)

    p = sub.add_parser("sweep", help="grid of fatigue settings over variants, with MAP and timing")
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--corpus")
    p.add_argument("--variants", nargs="+", choices=VARIANT_CHOICES)
    p.add_argument("--lexicon")
    p.add_argument("--embeddings")
    p.add_argument("--topics")
    p.add_argument("--qrels")
    p.add_argument("--length", type=int)
    p.add_argument("--repeats", type=int)
    p.add_argument("--rng-seed", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--node-fatigue-grid", help="comma list, default 0,10")
    p.add_argument("--edge-fatigue-grid", help="comma list, default 0,10")
    p.add_argument("--out", help="directory for sweep.csv and sweep_timing.csv")
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("compare", help="per-topic rank agreement between two runs or systems")
    p.add_argument("--run-a", help="first run file")
    p.add_argument("--run-b", help="second run file")
    p.add_argument("--index", help="hypergraph index (rws sides)")
    p.add_argument("--corpus", help="corpus .jsonl (baseline sides, or rws without an index)")
    p.add_argument("--variant", choices=VARIANT_CHOICES)
    p.add_argument("--lexicon")
    p.add_argument("--embeddings")
    p.add_argument("--topics", help="topics .tsv (system mode)")
    p.add_argument("--engine-a", choices=ENGINE_CHOICES)
    p.add_argument("--engine-b", choices=ENGINE_CHOICES)
    p.add_argument("-m", "--repetitions", type=int, default=1)
    _add_walk_flags(p)
    p.add_argument("--node-fatigue-a", type=int)
    p.add_argument("--edge-fatigue-a", type=int)
    p.add_argument("--node-fatigue-b", type=int)
    p.add_argument("--edge-fatigue-b", type=int)
    p.add_argument("--k", type=int, default=1000)
    p.add_argument("--json", dest="json_out")
    p.set_defaults(handler=cmd_compare)
    return parser


def _add_walk_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--length", type=int, default=2, help="walk length")
    p.add_argument("--repeats", type=int, default=1000, help="walks per seed")
    p.add_argument("--node-fatigue", type=int, default=0)
    p.add_argument("--edge-fatigue", type=int, default=0)
    p.add_argument("--rng-seed", type=int, default=0)


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    with open(path, "r", encoding="utf-8") as fh:
        try:
            config = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(config, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    unknown = set(config) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"{path}: unknown config keys: {sorted(unknown)}")
    return config


def _setting(args: argparse.Namespace, config: dict, key: str, default=None):
    value = getattr(args, key, None)
    if value is not None:
        return value
    if key in config:
        return config[key]
    return default


def _build_graph(corpus_path: str, variant: Variant, lexicon_path, embeddings_path) -> Hypergraph:
    documents = load_corpus(corpus_path)
    lexicon = load_synonyms(lexicon_path) if lexicon_path else None
    embeddings = load_embeddings(embeddings_path) if embeddings_path else None
    return index_corpus(documents, variant, lexicon, embeddings)


# -- index ------------------------------------------------------------------

def cmd_index(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    corpus_path = _setting(args, config, "corpus")
    out_path = _setting(args, config, "out")
    variant = Variant(_setting(args, config, "variant", Variant.BASE.value))
    if not corpus_path:
        raise ConfigError("index needs --corpus")
    if not out_path:
        raise ConfigError("index needs --out")
    started = time.perf_counter_ns()
    graph = _build_graph(
        corpus_path, variant,
        _setting(args, config, "lexicon"), _setting(args, config, "embeddings"),
    )
    graph.save(out_path)
    elapsed_ms = (time.perf_counter_ns() - started) / 1e6
    print(f"index.out={out_path}")
    print(f"index.variant={variant.value}")
    print(f"index.documents={graph.doc_count}")
    print(f"index.nodes={len(graph.nodes)}")
    print(f"index.edges={len(graph.edges)}")
    print(f"time.index.total_ms={elapsed_ms:.3f}", file=sys.stderr)
    per_doc = elapsed_ms / graph.doc_count if graph.doc_count else 0.0
    print(f"time.index.per_doc_ms={per_doc:.3f}", file=sys.stderr)
    return 0


# -- search -------------------------------------------------------------------

def _search_graph(args: argparse.Namespace) -> Hypergraph:
    if args.index:
        return Hypergraph.load(args.index)
    if args.corpus:
        variant = Variant(args.variant or Variant.BASE.value)
        return _build_graph(args.corpus, variant, args.lexicon, args.embeddings)
    raise ConfigError("the rws engine needs --index or --corpus")


def _search_topics(args: argparse.Namespace) -> list[tuple[str, str]]:
    if args.topics and args.query:
        raise ConfigError("use --query or --topics, not both")
    if args.topics:
        return trec.read_topics(args.topics)
    if args.query:
        return [(args.topic_id, args.query)]
    raise ConfigError("search needs --query or --topics")


def cmd_search(args: argparse.Namespace) -> int:
    topics = _search_topics(args)
    k = args.k
    if k < 1:
        raise InputError("k must be at least 1")
    if args.engine == "rws":
        graph = _search_graph(args)
        params = RankingParams(
            walk_length=args.length,
            repeats=args.repeats,
            node_fatigue=args.node_fatigue,
            edge_fatigue=args.edge_fatigue,
            rng_seed=args.rng_seed,
        )
        total_ns = 0
        run: dict[str, list[tuple[str, float]]] = {}
        for topic_id, query in topics:
            ranking, elapsed = run_timed(graph, query, params)
            total_ns += elapsed
            run[topic_id] = ranking.entries[:k]
    else:
        if not args.corpus:
            raise ConfigError(f"the {args.engine} engine needs --corpus")
        index = baseline.build_inverted(load_corpus(args.corpus))
        search = baseline.search_tfidf if args.engine == "tfidf" else baseline.search_bm25
        total_ns = 0
        run = {}
        for topic_id, query in topics:
            started = time.perf_counter_ns()
            ranking = search(index, query, k)
            total_ns += time.perf_counter_ns() - started
            run[topic_id] = ranking.entries
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            trec.write_run(fh, run, args.tag)
    else:
        trec.write_run(sys.stdout, run, args.tag)
    print(f"time.search.total_ms={total_ns / 1e6:.3f}", file=sys.stderr)
    print(f"time.search.avg_ms={total_ns / len(topics) / 1e6:.3f}", file=sys.stderr)
    return 0


# -- evaluate -----------------------------------------------------------------

def cmd_evaluate(args: argparse.Namespace) -> int:
    if args.k < 1:
        raise InputError("k must be at least 1")
    run = trec.read_run(args.run)
    qrels = trec.read_qrels(args.qrels)
    doc_run = {topic: [doc for doc, _ in entries] for topic, entries in run.items()}
    result = evaluation.mean_average_precision(doc_run, qrels)
    p_label = f"p_at_{args.k}"
    per_topic_p: dict[str, float] = {}
    for topic_id in sorted(result.per_topic):
        relevant = {d for d, g in qrels[topic_id].items() if g > 0}
        per_topic_p[topic_id] = evaluation.precision_at_k(doc_run[topic_id], relevant, args.k)
        print(f"topic.{topic_id}.ap={result.per_topic[topic_id]:.6f}")
        print(f"topic.{topic_id}.{p_label}={per_topic_p[topic_id]:.6f}")
    for topic_id in result.skipped_unknown:
        print(f"warning: topic {topic_id!r} has no judgements, skipped", file=sys.stderr)
    mean_p = sum(per_topic_p.values()) / len(per_topic_p) if per_topic_p else 0.0
    print(f"map={result.mean:.6f}")
    print(f"{p_label}={mean_p:.6f}")
    print(f"topics.evaluated={len(result.per_topic)}")
    print(f"topics.excluded_no_relevant={len(result.excluded_no_relevant)}")
    print(f"topics.skipped_unknown={len(result.skipped_unknown)}")
    if args.json_out:
        report = {
            "map": result.mean,
            p_label: mean_p,
            "k": args.k,
            "per_topic": {
                t: {"ap": result.per_topic[t], p_label: per_topic_p[t]}
                for t in sorted(result.per_topic)
            },
            "excluded_no_relevant": result.excluded_no_relevant,
            "skipped_unknown": result.skipped_unknown,
        }
        with open(args.json_out, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
    if not result.per_topic:
        print("error: no topic could be evaluated", file=sys.stderr)
        return 1
    return 0


# -- sweep --------------------------------------------------------------------

def _parse_grid(value, name: str) -> list[int]:
    if value is None:
        return [0, 10]
    if isinstance(value, str):
        parts = value.split(",")
    elif isinstance(value, list):
        parts = value
    else:
        raise ConfigError(f"{name} must be a comma list or a JSON array")
    try:
        grid = [int(x) for x in parts]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name} must contain integers") from exc
    if not grid or any(x < 0 for x in grid):
        raise ConfigError(f"{name} must be non-empty and non-negative")
    return grid


def cmd_sweep(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    corpus_path = _setting(args, config, "corpus")
    topics_path = _setting(args, config, "topics")
    qrels_path = _setting(args, config, "qrels")
    if not corpus_path or not topics_path or not qrels_path:
        raise ConfigError("sweep needs --corpus, --topics and --qrels")
    variants = [Variant(v) for v in _setting(args, config, "variants", [Variant.BASE.value])]
    lexicon_path = _setting(args, config, "lexicon")
    embeddings_path = _setting(args, config, "embeddings")
    length = int(_setting(args, config, "length", 2))
    repeats = int(_setting(args, config, "repeats", 1000))
    rng_seed = int(_setting(args, config, "rng_seed", 0))
    k = int(_setting(args, config, "k", 10))
    nf_grid = _parse_grid(_setting(args, config, "node_fatigue_grid"), "node fatigue grid")
    ef_grid = _parse_grid(_setting(args, config, "edge_fatigue_grid"), "edge fatigue grid")
    out_dir = _setting(args, config, "out")

    topics = trec.read_topics(topics_path)
    qrels = trec.read_qrels(qrels_path)
    documents = load_corpus(corpus_path)
    lexicon = load_synonyms(lexicon_path) if lexicon_path else None
    embeddings = load_embeddings(embeddings_path) if embeddings_path else None

    rows = []
    timing_rows = []
    p_label = f"p_at_{k}"
    for variant in variants:
        graph = index_corpus(documents, variant, lexicon, embeddings)
        for node_fatigue in nf_grid:
            for edge_fatigue in ef_grid:
                params = RankingParams(
                    walk_length=length,
                    repeats=repeats,
                    node_fatigue=node_fatigue,
                    edge_fatigue=edge_fatigue,
                    rng_seed=rng_seed,
                )
                doc_run: dict[str, list[str]] = {}
                total_steps = 0
                total_ns = 0
                for topic_id, query in topics:
                    ranking, elapsed = run_timed(graph, query, params)
                    doc_run[topic_id] = ranking.doc_ids()
                    total_steps += ranking.total_steps
                    total_ns += elapsed
                result = evaluation.mean_average_precision(doc_run, qrels)
                p_values = []
                for topic_id in result.per_topic:
                    relevant = {d for d, g in qrels[topic_id].items() if g > 0}
                    p_values.append(evaluation.precision_at_k(doc_run[topic_id], relevant, k))
                mean_p = sum(p_values) / len(p_values) if p_values else 0.0
                rows.append({
                    "variant": variant.value,
                    "node_fatigue": node_fatigue,
                    "edge_fatigue": edge_fatigue,
                    "map": result.mean,
                    p_label: mean_p,
                    "total_steps": total_steps,
                })
                timing_rows.append({
                    "variant": variant.value,
                    "node_fatigue": node_fatigue,
                    "edge_fatigue": edge_fatigue,
                    "avg_topic_ms": total_ns / len(topics) / 1e6,
                    "total_ms": total_ns / 1e6,
                })
    for row in rows:
        print(
            f"sweep variant={row['variant']} node_fatigue={row['node_fatigue']}"
            f" edge_fatigue={row['edge_fatigue']} map={row['map']:.6f}"
            f" {p_label}={row[p_label]:.6f} total_steps={row['total_steps']}"
        )
    for row in timing_rows:
        print(
            f"time.sweep variant={row['variant']} node_fatigue={row['node_fatigue']}"
            f" edge_fatigue={row['edge_fatigue']} avg_topic_ms={row['avg_topic_ms']:.3f}"
            f" total_ms={row['total_ms']:.3f}",
            file=sys.stderr,
        )
    if out_dir:
        _write_csv(f"{out_dir}/sweep.csv", rows,
                   ["variant", "node_fatigue", "edge_fatigue", "map", p_label, "total_steps"])
        _write_csv(f"{out_dir}/sweep_timing.csv", timing_rows,
                   ["variant", "node_fatigue", "edge_fatigue", "avg_topic_ms", "total_ms"])
    return 0


def _write_csv(path: str, rows: list[dict], fieldnames: list[str]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        for row in rows:
            writer.writerow({key: _csv_cell(row[key]) for key in fieldnames})


def _csv_cell(value):
    if isinstance(value, float):
        return f"{value:.6f}"
    return value


# -- compare ------------------------------------------------------------------

def _make_system(engine: str, graph, inverted, args, node_fatigue: int, edge_fatigue: int):
    k = args.k
    if engine == "rws":
        if graph is None:
            raise ConfigError("an rws side needs --index or --corpus")
        base_params = RankingParams(
            walk_length=args.length,
            repeats=args.repeats,
            node_fatigue=node_fatigue,
            edge_fatigue=edge_fatigue,
            rng_seed=0,
        )

        def run_rws(query: str, seed: int) -> list[str]:
            ranking = rws(graph, query, replace(base_params, rng_seed=seed))
            return [doc_id for doc_id, _ in ranking.entries[:k]]

        return run_rws
    if inverted is None:
        raise ConfigError(f"a {engine} side needs --corpus")
    search = baseline.search_tfidf if engine == "tfidf" else baseline.search_bm25

    def run_baseline(query: str, seed: int) -> list[str]:
        return [doc_id for doc_id, _ in search(inverted, query, k).entries]

    return run_baseline


def cmd_compare(args: argparse.Namespace) -> int:
    run_mode = bool(args.run_a or args.run_b)
    system_mode = bool(args.engine_a or args.engine_b)
    if run_mode == system_mode:
        raise ConfigError("compare needs either --run-a/--run-b or --engine-a/--engine-b")
    if run_mode:
        if not (args.run_a and args.run_b):
            raise ConfigError("compare needs both --run-a and --run-b")
        run_a = trec.read_run(args.run_a)
        run_b = trec.read_run(args.run_b)
        shared = sorted(set(run_a) & set(run_b))
        if not shared:
            raise InputError("the two runs share no topics")
        topics = [(topic_id, topic_id) for topic_id in shared]
        lists_a = {t: [d for d, _ in run_a[t]] for t in shared}
        lists_b = {t: [d for d, _ in run_b[t]] for t in shared}
        system_a = lambda query, seed: lists_a[query]  # noqa: E731
        system_b = lambda query, seed: lists_b[query]  # noqa: E731
        repetitions = 1
    else:
        if not (args.engine_a and args.engine_b):
            raise ConfigError("compare needs both --engine-a and --engine-b")
        if not args.topics:
            raise ConfigError("system-mode compare needs --topics")
        if args.repetitions < 1:
            raise InputError("repetitions must be at least 1")
        topics = trec.read_topics(args.topics)
        graph = None
        if "rws" in (args.engine_a, args.engine_b):
            graph = _search_graph(args)
        inverted = None
        if "tfidf" in (args.engine_a, args.engine_b) or "bm25" in (args.engine_a, args.engine_b):
            if not args.corpus:
                raise ConfigError("baseline sides need --corpus")
            inverted = baseline.build_inverted(load_corpus(args.corpus))
        nf = args.node_fatigue
        ef = args.edge_fatigue
        system_a = _make_system(
            args.engine_a, graph, inverted, args,
            nf if args.node_fatigue_a is None else args.node_fatigue_a,
            ef if args.edge_fatigue_a is None else args.edge_fatigue_a,
        )
        system_b = _make_system(
            args.engine_b, graph, inverted, args,
            nf if args.node_fatigue_b is None else args.node_fatigue_b,
            ef if args.edge_fatigue_b is None else args.edge_fatigue_b,
        )
        repetitions = args.repetitions
    report = evaluation.repeated_comparison(
        system_a, system_b, topics, repetitions, base_seed=args.rng_seed
    )
    for topic_id, _ in topics:
        rho = report.per_topic_rho[topic_id]
        rho_text = f"{rho:.6f}" if rho is not None else "missing"
        print(f"topic.{topic_id}.rho={rho_text}")
        print(f"topic.{topic_id}.jaccard={report.per_topic_jaccard[topic_id]:.6f}")
    print(f"rho.mean={report.rho_mean:.6f}" if report.rho_mean is not None else "rho.mean=missing")
    print(f"rho.std={report.rho_std:.6f}" if report.rho_std is not None else "rho.std=missing")
    print(f"jaccard.mean={report.jaccard_mean:.6f}")
    print(f"jaccard.std={report.jaccard_std:.6f}")
    print(f"repetitions={report.repetitions}")
    if args.json_out:
        payload = {
            "repetitions": report.repetitions,
            "per_topic": {
                t: {"rho": report.per_topic_rho[t], "jaccard": report.per_topic_jaccard[t]}
                for t, _ in topics
            },
            "rho_mean": report.rho_mean,
            "rho_std": report.rho_std,
            "jaccard_mean": report.jaccard_mean,
            "jaccard_std": report.jaccard_std,
        }
        with open(args.json_out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    if report.rho_mean is None:
        print("error: no topic produced a comparable ranking pair", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
