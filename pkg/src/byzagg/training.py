"""End-to-end training simulator.

One logical round per iteration: sample a batch, split it into files,
compute true file gradients, apply the attack, run the scheme's detector,
aggregate, and step the model.  Every worker's return is recorded before
any detection or update happens (synchronous rounds), and all randomness
comes from per-concern seed streams, so a (config, seed) pair fully
determines every output byte.
"""

from __future__ import annotations

import csv
import hashlib
import io
from dataclasses import dataclass, field

import numpy as np

from .adversary import (
    AttackScenario,
    GradientTable,
    byzantine_returns,
    choose_adversaries,
    choose_disagreement_set,
)
from .aggregation import AggregationRule, aggregate
from .assignment import (
    SchemeSpec,
    TaskAssignment,
    assign_aspis,
    assign_baseline,
    assign_detox,
    assign_aspis_plus,
)
from .combinatorics import build_steiner_triple_system, sample_permutation
from .detection import WindowedDetector, build_agreement_graph, detect_aspis, pair_counts
from .errors import ConfigError
from .rng import BATCH_STREAM, INIT_STREAM, PERMUTATION_STREAM, stream_rng
from .tasks import SyntheticTask, synthetic_task


@dataclass(frozen=True)
class LearningRate:
    """Constant or geometric-decay schedule."""

    kind: str = "constant"
    base: float = 0.1
    decay: float = 1.0
    step: int = 1

    def __post_init__(self):
        if self.kind not in ("constant", "geometric"):
            raise ConfigError(f"learning-rate kind {self.kind!r} not constant/geometric")
        if self.base <= 0:
            raise ConfigError(f"learning rate base {self.base} must be positive")
        if self.step < 1:
            raise ConfigError(f"decay step {self.step} must be at least 1")

    def value(self, t: int) -> float:
        if self.kind == "constant":
            return self.base
        return self.base * self.decay ** (t // self.step)


@dataclass(frozen=True)
class TrainConfig:
    scheme: SchemeSpec
    attack: AttackScenario | None = None
    task_kind: str = "logistic"
    n_samples: int = 128
    dim: int = 8
    batch_size: int = 32
    iterations: int = 50
    lr: LearningRate = LearningRate()
    detection_window: int = 15
    eq_mode: str = "exact"
    rule: AggregationRule | None = None
    seed: int = 0
    task_seed: int | None = None

    def __post_init__(self):
        if self.iterations < 1:
            raise ConfigError(f"iteration budget {self.iterations} must be at least 1")
        if self.detection_window < 1:
            raise ConfigError(f"detection window T_d={self.detection_window} must be >= 1")
        if self.attack is not None and 2 * self.attack.q >= self.scheme.k_workers:
            raise ConfigError(
                f"q={self.attack.q} must satisfy q < K/2 = {self.scheme.k_workers / 2}"
            )


@dataclass(frozen=True)
class IterationRecord:
    t: int
    loss: float
    distorted: int
    epsilon: float
    adversaries: tuple[int, ...]
    detected: tuple[int, ...]


@dataclass
class TrainResult:
    config: TrainConfig
    records: list[IterationRecord]
    weights: np.ndarray
    models: list[np.ndarray] = field(repr=False, default_factory=list)
    flag_events: dict[tuple[int, int], int] = field(default_factory=dict)
    f: int = 0

    @property
    def final_loss(self) -> float:
        return self.records[-1].loss

    def trajectory_digest(self) -> str:
        """sha256 over the per-iteration (loss, model) byte stream."""
        digest = hashlib.sha256()
        for record, w in zip(self.records, self.models):
            digest.update(np.float64(record.loss).tobytes())
            digest.update(np.asarray(w, dtype=np.float64).tobytes())
        return digest.hexdigest()

    def trajectory_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["t", "loss", "epsilon", "detected"])
        for record in self.records:
            writer.writerow([
                record.t,
                repr(float(record.loss)),
                repr(float(record.epsilon)),
                "|".join(str(j) for j in record.detected),
            ])
        return out.getvalue()


def _fixed_assignment(scheme: SchemeSpec) -> TaskAssignment | None:
    if scheme.kind == "aspis":
        return assign_aspis(scheme.k_workers, scheme.r)
    if scheme.kind == "detox":
        return assign_detox(scheme.k_workers, scheme.r)
    if scheme.kind == "baseline":
        return assign_baseline(scheme.k_workers)
    return None   # aspis_plus re-permutes per iteration


def train(config: TrainConfig, task: SyntheticTask | None = None) -> TrainResult:
    """Run the full simulator; deterministic given (config, seed)."""
    scheme = config.scheme
    k = scheme.k_workers
    if task is None:
        task_seed = config.seed if config.task_seed is None else config.task_seed
        task = synthetic_task(config.task_kind, config.n_samples, config.dim, task_seed)
    n = task.n_samples
    if config.batch_size > n:
        raise ConfigError(f"batch size {config.batch_size} exceeds dataset size {n}")

    fixed = _fixed_assignment(scheme)
    design = build_steiner_triple_system(k) if scheme.kind == "aspis_plus" else None
    f = len(design.blocks) if design is not None else fixed.f
    if config.batch_size % f != 0:
        raise ConfigError(f"batch size {config.batch_size} not divisible by file count {f}")

    attack = config.attack
    q_bound = attack.q if attack is not None else 0
    detector = None
    if scheme.kind == "aspis_plus":
        detector = WindowedDetector(k, q_bound, lam=design.lam,
                                    window=config.detection_window)

    w = 0.1 * stream_rng(INIT_STREAM, config.seed).standard_normal(task.dim)
    records: list[IterationRecord] = []
    models: list[np.ndarray] = []
    flag_events: dict[tuple[int, int], int] = {}

    for t in range(config.iterations):
        if fixed is not None:
            assignment = fixed
        else:
            perm = sample_permutation(k, stream_rng(PERMUTATION_STREAM, config.seed, t))
            assignment = assign_aspis_plus(design, perm)

        batch = stream_rng(BATCH_STREAM, config.seed, t).choice(
            n, size=config.batch_size, replace=False)
        chunks = batch.reshape(f, -1)
        true_gradients = np.stack([task.gradient_sum(w, chunk) for chunk in chunks])

        adversaries: tuple[int, ...] = ()
        disagreement = None
        if attack is not None and attack.q > 0:
            if attack.adversaries is not None:
                adversaries = attack.adversaries
            else:
                adversaries = choose_adversaries(
                    attack.mode, k, attack.q, t, config.seed,
                    byz_window=attack.byz_window, placement=attack.placement,
                    r=scheme.r, excluded=attack.disagreement or ())
            if attack.mode == "ATT2":
                disagreement = attack.disagreement
                if disagreement is None:
                    disagreement = choose_disagreement_set(
                        adversaries, k, attack.q, t, config.seed)
        if adversaries:
            table = byzantine_returns(assignment, attack, adversaries,
                                      true_gradients, disagreement)
        else:
            table = GradientTable.honest(assignment, true_gradients)

        detected: tuple[int, ...] = ()
        if scheme.kind == "aspis" and config.rule is None:
            graph = build_agreement_graph(assignment, table, config.eq_mode)
            outcome = detect_aspis(graph, q_bound)
            result = aggregate(assignment, table, outcome, eq_mode=config.eq_mode)
            if outcome.status == "identified":
                detected = outcome.adversaries
        elif scheme.kind == "aspis_plus":
            agreements, _ = pair_counts(assignment, table, config.eq_mode)
            detected = detector.step(agreements)
            window_index = t // config.detection_window
            for worker, step in detector.flag_log.items():
                flag_events.setdefault((window_index, worker), step)
            result = aggregate(assignment, table, None,
                               config.rule or AggregationRule("majority-then-median"),
                               config.eq_mode, excluded=detected)
        else:
            default = AggregationRule("majority-then-median" if scheme.kind == "aspis"
                                      else "coordinate-median")
            result = aggregate(assignment, table, None, config.rule or default,
                               config.eq_mode)

        distorted = result.distorted_count(true_gradients)
        w = w - config.lr.value(t) * result.update
        records.append(IterationRecord(
            t=t,
            loss=task.loss(w),
            distorted=distorted,
            epsilon=distorted / f,
            adversaries=adversaries,
            detected=detected,
        ))
        models.append(w.copy())

    return TrainResult(config=config, records=records, weights=w,
                       models=models, flag_events=flag_events, f=f)
