"""Agreement graphs, clique enumeration, and both detectors.

Workers are vertices; an edge survives only while two workers return
equal gradients on every file they share.  The one-shot detector trusts
a unique maximum clique; the windowed detector accumulates per-pair
agreement counters across permuted assignments and flags low-degree
vertices inside a detection window.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .adversary import GradientTable
from .assignment import TaskAssignment
from .errors import ConfigError

TOLERANCE = 1e-5
EQUALITY_MODES = ("exact", "tolerance")


def gradients_equal(a: np.ndarray, b: np.ndarray, mode: str = "exact") -> bool:
    """Equality predicate used for agreement; tolerance is relative L2."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ConfigError(f"gradient shapes {a.shape} and {b.shape} differ")
    if mode == "exact":
        return bool(np.array_equal(a, b))
    if mode != "tolerance":
        raise ConfigError(f"equality mode {mode!r} not one of {EQUALITY_MODES}")
    scale = max(float(np.linalg.norm(a)), float(np.linalg.norm(b)))
    if scale == 0.0:
        return True
    return float(np.linalg.norm(a - b)) / scale <= TOLERANCE


@dataclass
class AgreementGraph:
    """Undirected worker-agreement graph plus the per-pair counters."""

    k_workers: int
    agreements: np.ndarray    # common files with equal returns, per pair
    common: np.ndarray        # common files, per pair
    adjacency: tuple[frozenset[int], ...]

    def degree(self, worker: int) -> int:
        return len(self.adjacency[worker])

    def edges(self) -> list[tuple[int, int]]:
        return [(j1, j2) for j1 in range(self.k_workers)
                for j2 in self.adjacency[j1] if j1 < j2]

    @classmethod
    def from_adjacency(cls, neighbor_sets) -> AgreementGraph:
        k = len(neighbor_sets)
        adjacency = tuple(frozenset(s) for s in neighbor_sets)
        common = np.zeros((k, k), dtype=int)
        agreements = np.zeros((k, k), dtype=int)
        for j1, nbrs in enumerate(adjacency):
            for j2 in nbrs:
                common[j1, j2] = 1
                agreements[j1, j2] = 1
        return cls(k_workers=k, agreements=agreements, common=common, adjacency=adjacency)


def pair_counts(assignment: TaskAssignment, table: GradientTable,
                eq_mode: str = "exact") -> tuple[np.ndarray, np.ndarray]:
    """(agreements, common) matrices over worker pairs for one iteration."""
    k = assignment.k_workers
    agreements = np.zeros((k, k), dtype=int)
    common = np.zeros((k, k), dtype=int)
    for i, workers in enumerate(assignment.file_workers):
        for a in range(len(workers)):
            for b in range(a + 1, len(workers)):
                j1, j2 = workers[a], workers[b]
                common[j1, j2] += 1
                common[j2, j1] += 1
                if gradients_equal(table.value(j1, i), table.value(j2, i), eq_mode):
                    agreements[j1, j2] += 1
                    agreements[j2, j1] += 1
    return agreements, common


def build_agreement_graph(assignment: TaskAssignment, table: GradientTable,
                          eq_mode: str = "exact") -> AgreementGraph:
    """Edge (j1, j2) iff the two workers agree on all their common files."""
    agreements, common = pair_counts(assignment, table, eq_mode)
    k = assignment.k_workers
    neighbor_sets = [set() for _ in range(k)]
    for j1 in range(k):
        for j2 in range(j1 + 1, k):
            if common[j1, j2] > 0 and agreements[j1, j2] == common[j1, j2]:
                neighbor_sets[j1].add(j2)
                neighbor_sets[j2].add(j1)
    return AgreementGraph(
        k_workers=k,
        agreements=agreements,
        common=common,
        adjacency=tuple(frozenset(s) for s in neighbor_sets),
    )


def enumerate_maximal_cliques(graph: AgreementGraph) -> list[tuple[int, ...]]:
    """All maximal cliques, each sorted, in sorted order (pivoting search)."""
    adj = graph.adjacency
    cliques: list[tuple[int, ...]] = []

    def expand(partial: set[int], candidates: set[int], seen: set[int]) -> None:
        if not candidates and not seen:
            cliques.append(tuple(sorted(partial)))
            return
        pivot = max(candidates | seen, key=lambda u: len(candidates & adj[u]))
        for v in sorted(candidates - adj[pivot]):
            expand(partial | {v}, candidates & adj[v], seen & adj[v])
            candidates = candidates - {v}
            seen = seen | {v}

    expand(set(), set(range(graph.k_workers)), set())
    return sorted(cliques)


@dataclass(frozen=True)
class DetectionOutcome:
    """Result of one-shot detection."""

    status: str                      # "identified" or "ambiguous"
    honest: tuple[int, ...]
    adversaries: tuple[int, ...]
    max_clique_count: int


def detect_aspis(graph: AgreementGraph, q: int) -> DetectionOutcome:
    """Trust the unique maximum clique; otherwise declare ambiguity.

    Vertices with degree below K-q-1 can never be honest and are excluded
    from the reported honest set even if a clique contains them.
    """
    if 2 * q >= graph.k_workers and q > 0:
        raise ConfigError(f"q={q} must satisfy q < K/2 = {graph.k_workers / 2}")
    cliques = enumerate_maximal_cliques(graph)
    top = max(len(c) for c in cliques)
    maxima = [c for c in cliques if len(c) == top]
    if len(maxima) > 1:
        return DetectionOutcome("ambiguous", (), (), len(maxima))
    floor = graph.k_workers - q - 1
    honest = tuple(j for j in maxima[0] if graph.degree(j) >= floor)
    adversaries = tuple(j for j in range(graph.k_workers) if j not in set(honest))
    return DetectionOutcome("identified", honest, adversaries, 1)


@dataclass
class WindowedDetector:
    """Accumulating detector over a detection window.

    Each step adds one iteration's per-pair agreement counts; an edge is
    removed (permanently, until the window resets) once its accumulated
    count falls below lam * step, and workers whose degree drops below
    K-q-1 are flagged.  The reported estimate is truncated to the q most
    recently flagged workers, ties broken by ascending index.
    """

    k_workers: int
    q: int
    lam: int = 1
    window: int = 15
    _alpha: np.ndarray = field(init=False, repr=False)
    _adjacency: np.ndarray = field(init=False, repr=False)
    _flagged_at: dict[int, int] = field(init=False, repr=False)
    _step_index: int = field(init=False, default=0, repr=False)

    def __post_init__(self):
        if self.window < 1:
            raise ConfigError(f"detection window T_d={self.window} must be at least 1")
        if self.lam < 1:
            raise ConfigError(f"lambda={self.lam} must be at least 1")
        if 2 * self.q >= self.k_workers and self.q > 0:
            raise ConfigError(f"q={self.q} must satisfy q < K/2 = {self.k_workers / 2}")
        self._reset()

    def _reset(self) -> None:
        k = self.k_workers
        self._alpha = np.zeros((k, k), dtype=int)
        self._adjacency = ~np.eye(k, dtype=bool)
        self._flagged_at = {}

    @property
    def step_in_window(self) -> int:
        """1-based position of the next step within the window."""
        return self._step_index % self.window + 1

    @property
    def flag_log(self) -> dict[int, int]:
        """Worker -> 1-based window step at which it was flagged (this window)."""
        return dict(self._flagged_at)

    def step(self, agreements: np.ndarray) -> tuple[int, ...]:
        """Consume one iteration's agreement counts; return the estimate."""
        t_prime = self.step_in_window
        if t_prime == 1:
            self._reset()
        self._alpha += np.asarray(agreements, dtype=int)
        self._adjacency &= self._alpha >= self.lam * t_prime
        degrees = self._adjacency.sum(axis=1)
        floor = self.k_workers - self.q - 1
        for j in range(self.k_workers):
            if degrees[j] < floor and j not in self._flagged_at:
                self._flagged_at[j] = t_prime
        self._step_index += 1
        return self._estimate()

    def _estimate(self) -> tuple[int, ...]:
        flagged = sorted(self._flagged_at, key=lambda j: (-self._flagged_at[j], j))
        return tuple(sorted(flagged[: self.q])) if self.q else ()
