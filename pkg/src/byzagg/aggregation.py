"""Turn returned gradients plus a detection outcome into one update.

Two protocol paths: with identified detection the coordinator keeps one
honest copy per file and averages; otherwise every file is majority-voted
and the votes are reduced coordinate-wise by the median.  Grouped and
baseline schemes skip detection and reduce their per-file votes with a
configured rule.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .adversary import GradientTable
from .assignment import TaskAssignment
from .detection import DetectionOutcome, gradients_equal
from .errors import ConfigError, DegenerateDetectionError

RULE_KINDS = (
    "honest-select-mean",
    "majority-then-median",
    "median-of-means",
    "coordinate-median",
    "mean",
    "sign-majority",
)


@dataclass(frozen=True)
class AggregationRule:
    kind: str = "coordinate-median"
    group_size: int | None = None

    def __post_init__(self):
        if self.kind not in RULE_KINDS:
            raise ConfigError(f"aggregation rule {self.kind!r} not one of {RULE_KINDS}")


def select_honest_gradients(assignment: TaskAssignment, table: GradientTable,
                            honest: tuple[int, ...]) -> tuple[list[np.ndarray], list[int]]:
    """One honest copy per file (lowest honest index); returns (kept, skipped).

    Files with no honest assignee are skipped and reported by index.
    """
    if not honest:
        raise DegenerateDetectionError("honest set is empty; nothing to select from")
    honest_set = set(honest)
    kept: list[np.ndarray] = []
    skipped: list[int] = []
    for i, workers in enumerate(assignment.file_workers):
        candidates = [j for j in workers if j in honest_set]
        if candidates:
            kept.append(table.value(min(candidates), i))
        else:
            skipped.append(i)
    return kept, skipped


def majority_vote(copies: list[np.ndarray], eq_mode: str = "exact") -> np.ndarray:
    """Value held by a voting majority of the copies, else the plurality.

    Copies must be in ascending worker-index order; ties go to the group
    whose first copy has the lowest worker index.
    """
    if not copies:
        raise ConfigError("majority_vote needs at least one copy")
    groups: list[tuple[np.ndarray, int]] = []   # representative, count
    for value in copies:
        for idx, (rep, count) in enumerate(groups):
            if gradients_equal(rep, value, eq_mode):
                groups[idx] = (rep, count + 1)
                break
        else:
            groups.append((value, 1))
    best_rep, best_count = groups[0]
    for rep, count in groups[1:]:
        # strict > keeps the first-seen (lowest-index) group on ties
        if count > best_count:
            best_rep, best_count = rep, count
    return best_rep


def coordinate_median(vectors: list[np.ndarray]) -> np.ndarray:
    """Per-dimension median; even counts take the midpoint of the middle two."""
    if len(vectors) == 0:
        raise ConfigError("coordinate_median needs a nonempty list")
    return np.median(np.stack(vectors), axis=0)


def median_of_means(vectors: list[np.ndarray], group_size: int) -> np.ndarray:
    """Partition in index order into equal groups, average, then median."""
    count = len(vectors)
    if count == 0:
        raise ConfigError("median_of_means needs a nonempty list")
    if group_size < 1 or count % group_size != 0:
        raise ConfigError(f"group size {group_size} must divide the count {count}")
    stacked = np.stack(vectors)
    means = stacked.reshape(count // group_size, group_size, -1).mean(axis=1)
    return np.median(means, axis=0)


def sign_majority(vectors: list[np.ndarray]) -> np.ndarray:
    """Per-dimension majority of signs; a zero sum breaks to +1."""
    if len(vectors) == 0:
        raise ConfigError("sign_majority needs a nonempty list")
    total = np.sign(np.stack(vectors)).sum(axis=0)
    return np.where(total >= 0, 1.0, -1.0)


@dataclass
class AggregationResult:
    """Update plus the per-file values that entered the final reduction."""

    update: np.ndarray
    path: str
    file_values: dict[int, np.ndarray] = field(default_factory=dict)
    skipped: tuple[int, ...] = ()

    def distorted_count(self, true_gradients: np.ndarray) -> int:
        """Files whose surviving value is wrong, plus files dropped entirely."""
        wrong = sum(
            1 for i, value in self.file_values.items()
            if not np.array_equal(value, true_gradients[i])
        )
        return wrong + len(self.skipped)


def aggregate(assignment: TaskAssignment, table: GradientTable,
              outcome: DetectionOutcome | None = None,
              rule: AggregationRule | None = None,
              eq_mode: str = "exact",
              excluded: tuple[int, ...] = ()) -> AggregationResult:
    """One model update from the table.

    With a detection outcome: identified -> mean over one honest copy per
    file; ambiguous -> per-file majority vote, then coordinate median.
    Without one: per-file majority vote (excluding flagged workers, files
    with no surviving copy skipped), then the configured rule.  The mean
    rule is the unprotected reference: it averages copies instead of voting.
    """
    if outcome is not None and outcome.status == "identified":
        kept_list, skipped = select_honest_gradients(assignment, table, outcome.honest)
        honest_set = set(outcome.honest)
        file_values = {}
        kept_iter = iter(kept_list)
        for i, workers in enumerate(assignment.file_workers):
            if any(j in honest_set for j in workers):
                file_values[i] = next(kept_iter)
        update = np.mean(np.stack(kept_list), axis=0)
        return AggregationResult(update, "honest-select-mean", file_values, tuple(skipped))

    if rule is None:
        rule = AggregationRule("majority-then-median")
    excluded_set = set(excluded)
    votes: list[np.ndarray] = []
    file_values = {}
    skipped = []
    for i, workers in enumerate(assignment.file_workers):
        copies = [table.value(j, i) for j in workers if j not in excluded_set]
        if not copies:
            skipped.append(i)
            continue
        if rule.kind == "mean":
            vote = np.mean(np.stack(copies), axis=0)
        else:
            vote = majority_vote(copies, eq_mode)
        file_values[i] = vote
        votes.append(vote)
    if not votes:
        raise DegenerateDetectionError("every file lost all its copies to exclusions")

    if rule.kind in ("majority-then-median", "coordinate-median"):
        update = coordinate_median(votes)
        path = rule.kind
    elif rule.kind == "mean":
        update = np.mean(np.stack(votes), axis=0)
        path = "mean"
    elif rule.kind == "sign-majority":
        update = sign_majority(votes)
        path = "sign-majority"
    elif rule.kind == "median-of-means":
        group = rule.group_size if rule.group_size is not None else len(votes)
        update = median_of_means(votes, group)
        path = "median-of-means"
    else:
        raise ConfigError(f"rule {rule.kind!r} needs an identified detection outcome")
    return AggregationResult(update, path, file_values, tuple(skipped))
