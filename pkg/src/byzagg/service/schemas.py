"""Request/response models for the service.

These mirror the JSON run-config format; converters map them onto the
core dataclasses so the library stays importable without pydantic.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

from ..adversary import AttackScenario, DistortionSpec
from ..aggregation import AggregationRule
from ..assignment import SchemeSpec
from ..training import LearningRate, TrainConfig


class StrictModel(BaseModel):
    """Request-side base; unknown fields are rejected, not dropped.

    A silently ignored typo in a run-config would change the experiment,
    so every inbound model fails fast instead.
    """

    model_config = ConfigDict(extra="forbid")


class DistortionModel(StrictModel):
    kind: Literal["alie", "foe", "reversed", "constant"] = "reversed"
    z: float | None = 1.0
    scale: float = 1.0
    fill: float = -1.0

    def to_spec(self) -> DistortionSpec:
        return DistortionSpec(kind=self.kind, z=self.z, scale=self.scale, fill=self.fill)


class AttackModel(StrictModel):
    mode: Literal["ATT1", "ATT2", "ATT3"]
    q: int = Field(ge=0)
    distortion: DistortionModel = DistortionModel()
    disagreement: list[int] | None = None
    byz_window: int = 50
    placement: Literal["random", "detox_optimal", "detox_weak"] = "random"
    adversaries: list[int] | None = None

    def to_scenario(self) -> AttackScenario:
        return AttackScenario(
            mode=self.mode,
            q=self.q,
            distortion=self.distortion.to_spec(),
            disagreement=tuple(self.disagreement) if self.disagreement is not None else None,
            byz_window=self.byz_window,
            placement=self.placement,
            adversaries=tuple(self.adversaries) if self.adversaries is not None else None,
        )


class SchemeModel(StrictModel):
    kind: Literal["aspis", "aspis_plus", "detox", "baseline"]
    K: int = Field(ge=1)
    r: int | None = None

    def to_spec(self) -> SchemeSpec:
        r = self.r
        if r is None:
            r = 1 if self.kind == "baseline" else 3
        return SchemeSpec(kind=self.kind, k_workers=self.K, r=r)


class LearningRateModel(StrictModel):
    kind: Literal["constant", "geometric"] = "constant"
    base: float = 0.1
    decay: float = 1.0
    step: int = 1

    def to_schedule(self) -> LearningRate:
        return LearningRate(kind=self.kind, base=self.base, decay=self.decay, step=self.step)


class RuleModel(StrictModel):
    kind: Literal[
        "honest-select-mean", "majority-then-median", "median-of-means",
        "coordinate-median", "mean", "sign-majority",
    ]
    group_size: int | None = None

    def to_rule(self) -> AggregationRule:
        return AggregationRule(kind=self.kind, group_size=self.group_size)


class TaskModel(StrictModel):
    kind: Literal["logistic", "least_squares", "mlp"] = "logistic"
    n: int = Field(default=128, ge=1)
    dim: int = Field(default=8, ge=1)
    seed: int | None = None


# --- assign -----------------------------------------------------------------

class AssignRequest(StrictModel):
    scheme: SchemeModel
    seed: int = 0
    iteration: int = 0


class AssignResponse(BaseModel):
    scheme: str
    K: int
    r: int
    f: int
    worker_files: list[list[int]]
    file_workers: list[list[int]]


# --- epsilon ----------------------------------------------------------------

class EpsilonRequest(StrictModel):
    K: int = Field(ge=1)
    r: int = 3
    q_values: list[int]
    schemes: list[Literal["aspis", "baseline", "detox"]] = ["aspis", "baseline", "detox"]


class EpsilonRow(BaseModel):
    scheme: str
    attack: str
    K: int
    r: int
    q: int
    f: int
    c: int
    epsilon: float


class EpsilonResponse(BaseModel):
    rows: list[EpsilonRow]
    csv: str


# --- detect-demo ------------------------------------------------------------

class DetectDemoRequest(StrictModel):
    K: int = 7
    r: int = 3
    attack: AttackModel
    dim: int = 8
    seed: int = 0
    eq_mode: Literal["exact", "tolerance"] = "exact"


class DetectDemoResponse(BaseModel):
    status: str
    max_clique_count: int
    honest: list[int]
    detected: list[int]
    actual: list[int]
    distorted_files: list[int]
    edges: list[list[int]]
    summary: str


# --- train ------------------------------------------------------------------

class TrainRequest(StrictModel):
    scheme: SchemeModel
    attack: AttackModel | None = None
    task: TaskModel = TaskModel()
    batch_size: int = 32
    iterations: int = 50
    lr: LearningRateModel = LearningRateModel()
    detection_window: int = 15
    eq_mode: Literal["exact", "tolerance"] = "exact"
    rule: RuleModel | None = None
    seed: int = 0

    def to_config(self) -> TrainConfig:
        return TrainConfig(
            scheme=self.scheme.to_spec(),
            attack=self.attack.to_scenario() if self.attack is not None else None,
            task_kind=self.task.kind,
            n_samples=self.task.n,
            dim=self.task.dim,
            batch_size=self.batch_size,
            iterations=self.iterations,
            lr=self.lr.to_schedule(),
            detection_window=self.detection_window,
            eq_mode=self.eq_mode,
            rule=self.rule.to_rule() if self.rule is not None else None,
            seed=self.seed,
            task_seed=self.task.seed,
        )


class IterationModel(BaseModel):
    t: int
    loss: float
    distorted: int
    epsilon: float
    detected: list[int]


class TrainResponse(BaseModel):
    trajectory_csv: str
    records: list[IterationModel]
    final_loss: float
    final_model: list[float]
    total_distorted: int
    digest: str


# --- bench ------------------------------------------------------------------

class BenchRequest(StrictModel):
    K: int = 100
    r: int = 5
    q_values: list[int] = [5, 15, 25, 35, 45]
    attacks: list[Literal["ATT1", "ATT2"]] = ["ATT1", "ATT2"]
    repeats: int = 3


class BenchRowModel(BaseModel):
    K: int
    q: int
    attack: str
    milliseconds: float
    maximal_cliques: int
    maximum_cliques: int
    max_size: int


class BenchResponse(BaseModel):
    rows: list[BenchRowModel]
    csv: str
