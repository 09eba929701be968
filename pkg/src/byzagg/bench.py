"""Clique-enumeration timing on attack-induced agreement graphs.

The graphs are built directly from the attack structure (never from a
gradient table), so cluster sizes far beyond the simulator's file budget
can be timed: ATT1 isolates the Byzantines, ATT2 removes the bipartite
adversary/disagreement edges.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass

from .detection import AgreementGraph, enumerate_maximal_cliques
from .errors import ConfigError


@dataclass(frozen=True)
class BenchRow:
    k_workers: int
    q: int
    attack: str
    milliseconds: float
    maximal_cliques: int
    maximum_cliques: int
    max_size: int


def attack_agreement_graph(k_workers: int, r: int, q: int, attack: str) -> AgreementGraph:
    """The agreement graph a full-strength attack induces.

    Any two workers share at least one file once r >= 2, so a worker that
    distorts everything disagrees with every honest peer (ATT1), and an
    ATT2 coalition cuts exactly its pairs with the disagreement set.
    """
    if attack not in ("ATT1", "ATT2"):
        raise ConfigError(f"attack {attack!r} must be ATT1 or ATT2 for the benchmark")
    if not 2 <= r <= k_workers:
        raise ConfigError(f"r={r} must satisfy 2 <= r <= K={k_workers}")
    if 2 * q >= k_workers and q > 0:
        raise ConfigError(f"q={q} must satisfy q < K/2 = {k_workers / 2}")
    adversaries = set(range(q))
    everyone = set(range(k_workers))
    if attack == "ATT1":
        honest = everyone - adversaries
        neighbors = [set() if j in adversaries else honest - {j}
                     for j in range(k_workers)]
    else:
        disagreement = set(range(q, 2 * q))
        neighbors = []
        for j in range(k_workers):
            nbrs = everyone - {j}
            if j in adversaries:
                nbrs -= disagreement
            elif j in disagreement:
                nbrs -= adversaries
            neighbors.append(nbrs)
    return AgreementGraph.from_adjacency(neighbors)


def bench_cliques(k_workers: int, r: int, q: int, attack: str,
                  repeats: int = 3) -> BenchRow:
    """Time maximal-clique enumeration; reports the fastest repeat."""
    if repeats < 1:
        raise ConfigError(f"repeats {repeats} must be at least 1")
    graph = attack_agreement_graph(k_workers, r, q, attack)
    best = float("inf")
    cliques: list[tuple[int, ...]] = []
    for _ in range(repeats):
        start = time.perf_counter()
        cliques = enumerate_maximal_cliques(graph)
        best = min(best, (time.perf_counter() - start) * 1000.0)
    top = max(len(c) for c in cliques)
    return BenchRow(
        k_workers=k_workers,
        q=q,
        attack=attack,
        milliseconds=best,
        maximal_cliques=len(cliques),
        maximum_cliques=sum(1 for c in cliques if len(c) == top),
        max_size=top,
    )


def bench_csv(rows: list[BenchRow]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["K", "q", "attack", "milliseconds"])
    for row in rows:
        writer.writerow([row.k_workers, row.q, row.attack, f"{row.milliseconds:.3f}"])
    return out.getvalue()
