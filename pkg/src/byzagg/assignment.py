"""Worker-to-file assignment for each scheme.

An assignment fixes, for one iteration, which workers compute which file
gradients.  Schemes: every r-subset of workers (aspis), a permuted triple
system (aspis_plus), disjoint groups (detox), one file per worker (baseline).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .combinatorics import (
    BlockDesign,
    binom,
    build_steiner_triple_system,
    enumerate_r_subsets,
    permute_block,
    sample_permutation,
)
from .errors import ConfigError, UnsupportedParameterError
from .rng import PERMUTATION_STREAM, stream_rng

SCHEME_KINDS = ("aspis", "aspis_plus", "detox", "baseline")


@dataclass(frozen=True)
class SchemeSpec:
    """Scheme selector used by configs and the training harness."""

    kind: str
    k_workers: int
    r: int = 3

    def __post_init__(self):
        if self.kind not in SCHEME_KINDS:
            raise ConfigError(f"scheme kind {self.kind!r} not one of {SCHEME_KINDS}")
        if self.kind == "baseline" and self.r != 1:
            raise ConfigError(f"baseline fixes r=1, got r={self.r}")
        if self.kind == "aspis_plus" and self.r != 3:
            raise ConfigError(f"aspis_plus uses triple systems, so r=3, got r={self.r}")


@dataclass(frozen=True)
class TaskAssignment:
    """Immutable worker<->file incidence for one iteration."""

    scheme: str
    k_workers: int
    r: int
    worker_files: tuple[tuple[int, ...], ...]
    file_workers: tuple[tuple[int, ...], ...]
    f: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "f", len(self.file_workers))
        for i, workers in enumerate(self.file_workers):
            if len(set(workers)) != self.r:
                raise ConfigError(f"file {i} has workers {workers}, expected {self.r} distinct")
        listed = {(j, i) for j, files in enumerate(self.worker_files) for i in files}
        incident = {(j, i) for i, workers in enumerate(self.file_workers) for j in workers}
        if listed != incident:
            raise ConfigError("worker_files and file_workers are not transposes")

    def load(self, worker: int) -> int:
        return len(self.worker_files[worker])

    def to_json_dict(self) -> dict:
        return {
            "scheme": self.scheme,
            "K": self.k_workers,
            "r": self.r,
            "f": self.f,
            "worker_files": [list(files) for files in self.worker_files],
            "file_workers": [list(workers) for workers in self.file_workers],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2) + "\n"


def _from_file_workers(scheme: str, k_workers: int, r: int,
                       file_workers: list[tuple[int, ...]]) -> TaskAssignment:
    worker_files: list[list[int]] = [[] for _ in range(k_workers)]
    for i, workers in enumerate(file_workers):
        for j in workers:
            worker_files[j].append(i)
    return TaskAssignment(
        scheme=scheme,
        k_workers=k_workers,
        r=r,
        worker_files=tuple(tuple(files) for files in worker_files),
        file_workers=tuple(tuple(sorted(w)) for w in file_workers),
    )


def assign_aspis(k_workers: int, r: int) -> TaskAssignment:
    """One file per r-subset of workers, in colex order; fixed across iterations."""
    if r % 2 == 0:
        raise UnsupportedParameterError(f"r={r} must be odd for majority voting")
    if not 3 <= r <= k_workers:
        raise ConfigError(f"r={r} must satisfy 3 <= r <= K={k_workers}")
    subsets = enumerate_r_subsets(k_workers, r)
    return _from_file_workers("aspis", k_workers, r, subsets)


def assign_aspis_plus(design: BlockDesign, perm: tuple[int, ...]) -> TaskAssignment:
    """Design blocks mapped through this iteration's worker permutation."""
    if sorted(perm) != list(range(design.v)):
        raise ConfigError(
            f"permutation over {len(perm)} workers does not match design on v={design.v} points"
        )
    file_workers = [permute_block(perm, block) for block in design.blocks]
    return _from_file_workers("aspis_plus", design.v, design.k, file_workers)


def assign_detox(k_workers: int, r: int) -> TaskAssignment:
    """K/r disjoint groups of r consecutive workers; one file per group."""
    if r % 2 == 0:
        raise UnsupportedParameterError(f"r={r} must be odd for majority voting")
    if k_workers % r != 0:
        raise ConfigError(f"r={r} must divide K={k_workers} for grouping")
    groups = [tuple(range(g * r, (g + 1) * r)) for g in range(k_workers // r)]
    return _from_file_workers("detox", k_workers, r, groups)


def assign_baseline(k_workers: int) -> TaskAssignment:
    """Identity assignment: file i is computed by worker i alone."""
    if k_workers < 1:
        raise ConfigError(f"K={k_workers} must be at least 1")
    return _from_file_workers("baseline", k_workers, 1, [(j,) for j in range(k_workers)])


def assign_for_scheme(spec: SchemeSpec, seed: int = 0, iteration: int = 0) -> TaskAssignment:
    """Build the assignment a given scheme uses at one iteration.

    Only aspis_plus depends on (seed, iteration): its blocks are re-shuffled
    through a fresh worker permutation every round.
    """
    if spec.kind == "aspis":
        return assign_aspis(spec.k_workers, spec.r)
    if spec.kind == "aspis_plus":
        design = build_steiner_triple_system(spec.k_workers)
        perm = sample_permutation(
            spec.k_workers, stream_rng(PERMUTATION_STREAM, seed, iteration)
        )
        return assign_aspis_plus(design, perm)
    if spec.kind == "detox":
        return assign_detox(spec.k_workers, spec.r)
    return assign_baseline(spec.k_workers)


def pair_overlap(k_workers: int, r: int) -> int:
    """Files shared by any two workers under the aspis assignment."""
    return binom(k_workers - 2, r - 2)
