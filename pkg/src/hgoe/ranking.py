"""Random walk scoring over the hypergraph, with optional fatigue.

A query is mapped to seed nodes (entities its terms expand to through
ContainedIn edges, or the term nodes themselves when no expansion exists).
Each seed is walked `repeats` times for up to `walk_length` steps, and every
traversal of a Document edge counts as one visit for that document. The
final score of a document is its visit share; the ranking sorts by score
descending with ties broken by document id ascending.

Fatigue: one shared table covers every walk of an invocation. After a step
traverses edge e to target node v, e is fatigued for `edge_fatigue` steps
and v for `node_fatigue` steps. Fatigued edges cannot be traversed and
fatigued nodes cannot be stepped onto; an element fatigued at clock t is
blocked for exactly the next `delta` sampling decisions, i.e. clocks
t+1 .. t+delta. The clock advances only when some walker executes a step,
so a walk that finds no eligible transition ends early without a tick.

Randomness: every invocation derives one PCG64 stream from
SeedSequence([rng_seed, query_key]) where query_key is the first 8 bytes
(big-endian) of sha256(query utf-8). Each step consumes exactly one draw to
pick an edge and one draw to pick a target, even when only one candidate
exists: unweighted graphs use integers(k) for both stages, the weighted
variant uses random() against the cumulative weights. Identical inputs give
identical rankings on every platform.
"""
from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import InputError
from .hypergraph import EdgeKind, Hypergraph, NodeKind, Role, Variant
from .indexer import tokenize

StepListener = Callable[[int, int, int], None]


@dataclass(frozen=True)
class RankingParams:
    walk_length: int = 2
    repeats: int = 1000
    node_fatigue: int = 0
    edge_fatigue: int = 0
    rng_seed: int = 0

    def __post_init__(self):
        if self.walk_length < 1:
            raise InputError("walk_length must be at least 1")
        if self.repeats < 1:
            raise InputError("repeats must be at least 1")
        if self.node_fatigue < 0 or self.edge_fatigue < 0:
            raise InputError("fatigue values must be non-negative")
        if self.rng_seed < 0:
            raise InputError("rng_seed must be non-negative")


@dataclass
class SeedSet:
    query: str
    per_term: dict[str, frozenset[int]]
    seeds: tuple[int, ...]


@dataclass
class Ranking:
    """Scored documents plus the walk diagnostics that produced them."""

    entries: list[tuple[str, float]] = field(default_factory=list)
    visit_counts: dict[int, int] = field(default_factory=dict)
    total_steps: int = 0

    def doc_ids(self) -> list[str]:
        return [doc_id for doc_id, _ in self.entries]


class FatigueTable:
    """Countdowns for recently traversed edges and recently visited nodes."""

    __slots__ = ("nodes", "edges", "clock")

    def __init__(self):
        self.nodes: dict[int, int] = {}
        self.edges: dict[int, int] = {}
        self.clock = 0

    def advance(self, edge_id: int, target_id: int, node_fatigue: int, edge_fatigue: int) -> None:
        """Tick the clock for one executed step, then fatigue its elements.

        Existing entries are decremented first and new entries inserted
        afterwards at full strength, so a fresh entry survives exactly
        `delta` subsequent decisions.
        """
        self.clock += 1
        if self.nodes:
            self.nodes = {n: v - 1 for n, v in self.nodes.items() if v > 1}
        if self.edges:
            self.edges = {e: v - 1 for e, v in self.edges.items() if v > 1}
        if node_fatigue > 0:
            self.nodes[target_id] = node_fatigue
        if edge_fatigue > 0:
            self.edges[edge_id] = edge_fatigue


def query_stream_key(query: str) -> int:
    """Stable 64-bit fingerprint a query contributes to its RNG stream."""
    return int.from_bytes(hashlib.sha256(query.encode("utf-8")).digest()[:8], "big")


def make_stream(rng_seed: int, query: str) -> np.random.Generator:
    """The documented per-invocation random stream."""
    seq = np.random.SeedSequence([rng_seed, query_stream_key(query)])
    return np.random.Generator(np.random.PCG64(seq))


def map_query_to_seeds(graph: Hypergraph, query: str) -> SeedSet:
    """Expand query terms into seed nodes.

    A term that reaches entities through ContainedIn edges contributes those
    entity nodes; a term present in the graph without such edges contributes
    its own term node; an unknown term contributes nothing.
    """
    per_term: dict[str, frozenset[int]] = {}
    for term in dict.fromkeys(tokenize(query)):
        node_id = graph.node_id(NodeKind.TERM, term)
        if node_id is None:
            per_term[term] = frozenset()
            continue
        entities: set[int] = set()
        for edge_id, role in graph.incidence.get(node_id, ()):
            if role is Role.TAIL and graph.edges[edge_id].kind is EdgeKind.CONTAINED_IN:
                entities.update(graph.edges[edge_id].head)
        per_term[term] = frozenset(entities) if entities else frozenset((node_id,))
    seeds = tuple(sorted(set().union(*per_term.values()) if per_term else ()))
    return SeedSet(query, per_term, seeds)


def random_walk(
    graph: Hypergraph,
    start: int,
    length: int,
    fatigue: FatigueTable,
    params: RankingParams,
    rng: np.random.Generator,
    step_listener: StepListener | None = None,
) -> tuple[list[int], list[int], int]:
    """Walk up to `length` steps from `start`, honouring and feeding fatigue.

    Returns (visited edge ids, visited node ids, steps taken). The start
    node is not a visit. The walk ends early when no eligible transition
    remains.
    """
    if not 0 <= start < len(graph.nodes):
        raise InputError(f"unknown start node {start}")
    weighted = graph.variant is Variant.WEIGHTED
    edges = graph.edges
    nodes = graph.nodes
    visited_edges: list[int] = []
    visited_nodes: list[int] = []
    current = start
    for _ in range(length):
        options = graph.transition_options(current, fatigue.edges, fatigue.nodes)
        if not options:
            break
        if weighted:
            pick = _cumulative_pick([edges[eid].weight for eid, _ in options], float(rng.random()))
            edge_id, targets = options[pick]
            pick = _cumulative_pick([nodes[t].weight for t in targets], float(rng.random()))
            target = targets[pick]
        else:
            edge_id, targets = options[int(rng.integers(len(options)))]
            target = targets[int(rng.integers(len(targets)))]
        visited_edges.append(edge_id)
        visited_nodes.append(target)
        fatigue.advance(edge_id, target, params.node_fatigue, params.edge_fatigue)
        if step_listener is not None:
            step_listener(fatigue.clock, edge_id, target)
        current = target
    return visited_edges, visited_nodes, len(visited_edges)


def _cumulative_pick(weights: Sequence[float], u: float) -> int:
    total = 0.0
    for w in weights:
        total += w
    x = u * total
    acc = 0.0
    for i, w in enumerate(weights):
        acc += w
        if x < acc:
            return i
    return len(weights) - 1


def rws(
    graph: Hypergraph,
    query: str,
    params: RankingParams | None = None,
    step_listener: StepListener | None = None,
) -> Ranking:
    """Random walk score: rank documents by Document-edge visit share.

    Seeds are walked repeat-major (for each repeat, every seed in ascending
    node id order) against one shared fatigue table and one RNG stream. The
    result is deterministic for identical (graph, query, params).
    """
    if not graph.frozen:
        raise InputError("graph must be frozen before ranking")
    if params is None:
        params = RankingParams()
    seed_set = map_query_to_seeds(graph, query)
    if not seed_set.seeds:
        return Ranking()
    rng = make_stream(params.rng_seed, query)
    fatigue = FatigueTable()
    edges = graph.edges
    doc = EdgeKind.DOCUMENT
    visit_counts: dict[int, int] = {}
    total_steps = 0
    for _ in range(params.repeats):
        for seed in seed_set.seeds:
            visited_edges, _, steps = random_walk(
                graph, seed, params.walk_length, fatigue, params, rng, step_listener
            )
            total_steps += steps
            for edge_id in visited_edges:
                if edges[edge_id].kind is doc:
                    visit_counts[edge_id] = visit_counts.get(edge_id, 0) + 1
    total_visits = sum(visit_counts.values())
    entries = [
        (edges[edge_id].doc_id, count / total_visits)
        for edge_id, count in visit_counts.items()
    ]
    entries.sort(key=lambda item: (-item[1], item[0]))
    return Ranking(entries, visit_counts, total_steps)


def run_timed(
    graph: Hypergraph, query: str, params: RankingParams | None = None
) -> tuple[Ranking, int]:
    """Run rws and report (ranking, elapsed nanoseconds)."""
    started = time.perf_counter_ns()
    ranking = rws(graph, query, params)
    return ranking, time.perf_counter_ns() - started
