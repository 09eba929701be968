"""HTTP layer: pydantic schemas plus the FastAPI application."""

from .app import app, run_detect_demo, worker_label
from .schemas import (
    AssignRequest,
    AssignResponse,
    AttackModel,
    BenchRequest,
    BenchResponse,
    BenchRowModel,
    DetectDemoRequest,
    DetectDemoResponse,
    DistortionModel,
    EpsilonRequest,
    EpsilonResponse,
    EpsilonRow,
    IterationModel,
    LearningRateModel,
    RuleModel,
    SchemeModel,
    TaskModel,
    TrainRequest,
    TrainResponse,
)

__all__ = [
    "app",
    "run_detect_demo",
    "worker_label",
    "AssignRequest",
    "AssignResponse",
    "AttackModel",
    "BenchRequest",
    "BenchResponse",
    "BenchRowModel",
    "DetectDemoRequest",
    "DetectDemoResponse",
    "DistortionModel",
    "EpsilonRequest",
    "EpsilonResponse",
    "EpsilonRow",
    "IterationModel",
    "LearningRateModel",
    "RuleModel",
    "SchemeModel",
    "TaskModel",
    "TrainRequest",
    "TrainResponse",
]
