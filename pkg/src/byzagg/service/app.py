"""HTTP service exposing assignment, analysis, detection, training, and benchmarks."""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..adversary import byzantine_returns, choose_adversaries, choose_disagreement_set
from ..analysis import distortion_reports, emit_tables
from ..assignment import SchemeSpec, assign_for_scheme
from ..bench import bench_cliques, bench_csv
from ..detection import build_agreement_graph, detect_aspis
from ..errors import ConfigError, ProtocolViolationError
from ..rng import DEMO_STREAM, stream_rng
from ..training import train
from .schemas import (
    AssignRequest,
    AssignResponse,
    BenchRequest,
    BenchResponse,
    BenchRowModel,
    DetectDemoRequest,
    DetectDemoResponse,
    EpsilonRequest,
    EpsilonResponse,
    EpsilonRow,
    IterationModel,
    TrainRequest,
    TrainResponse,
)

app = FastAPI(title="byzagg", version=__version__)


@app.exception_handler(ConfigError)
async def _config_error(request: Request, exc: ConfigError) -> JSONResponse:
    return JSONResponse(status_code=400, content={"detail": str(exc)})


@app.exception_handler(ProtocolViolationError)
async def _protocol_error(request: Request, exc: ProtocolViolationError) -> JSONResponse:
    return JSONResponse(status_code=500, content={"detail": str(exc)})


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/assign", response_model=AssignResponse)
def assign(req: AssignRequest) -> AssignResponse:
    assignment = assign_for_scheme(req.scheme.to_spec(), seed=req.seed, iteration=req.iteration)
    return AssignResponse(**assignment.to_json_dict())


@app.post("/epsilon", response_model=EpsilonResponse)
def epsilon(req: EpsilonRequest) -> EpsilonResponse:
    reports = distortion_reports(req.K, req.r, req.q_values, schemes=tuple(req.schemes))
    rows = [
        EpsilonRow(
            scheme=rep.scheme, attack=rep.attack, K=rep.k_workers, r=rep.r,
            q=rep.q, f=rep.f, c=rep.c, epsilon=rep.epsilon,
        )
        for rep in reports
    ]
    return EpsilonResponse(rows=rows, csv=emit_tables(reports))


def worker_label(index: int) -> str:
    """One-based display name for a worker, e.g. index 0 -> 'U1'."""
    return f"U{index + 1}"


def run_detect_demo(req: DetectDemoRequest) -> DetectDemoResponse:
    # the demo always runs on the fixed r-subset assignment
    assignment = assign_for_scheme(SchemeSpec(kind="aspis", k_workers=req.K, r=req.r))
    scenario = req.attack.to_scenario()
    rng = stream_rng(DEMO_STREAM, req.seed)
    true_gradients = rng.standard_normal((assignment.f, req.dim))
    adversaries = scenario.adversaries
    if adversaries is None:
        adversaries = choose_adversaries(scenario.mode, req.K, scenario.q, 0, req.seed,
                                         byz_window=scenario.byz_window,
                                         placement=scenario.placement, r=req.r)
    disagreement = scenario.disagreement
    if scenario.mode == "ATT2" and disagreement is None:
        disagreement = choose_disagreement_set(adversaries, req.K, scenario.q, 0, req.seed)
    table = byzantine_returns(assignment, scenario, adversaries, true_gradients,
                              disagreement=disagreement)
    graph = build_agreement_graph(assignment, table, eq_mode=req.eq_mode)
    outcome = detect_aspis(graph, scenario.q)
    if outcome.status == "identified":
        names = ",".join(worker_label(j) for j in outcome.adversaries)
        summary = f"identified {{{names}}}"
    else:
        summary = f"ambiguous, {outcome.max_clique_count} maximum cliques"
    return DetectDemoResponse(
        status=outcome.status,
        max_clique_count=outcome.max_clique_count,
        honest=list(outcome.honest),
        detected=list(outcome.adversaries),
        actual=list(adversaries),
        distorted_files=list(table.distorted_files),
        edges=[[i, j] for i, j in graph.edges()],
        summary=summary,
    )


@app.post("/detect-demo", response_model=DetectDemoResponse)
def detect_demo(req: DetectDemoRequest) -> DetectDemoResponse:
    return run_detect_demo(req)


@app.post("/train", response_model=TrainResponse)
def train_endpoint(req: TrainRequest) -> TrainResponse:
    result = train(req.to_config())
    records = [
        IterationModel(t=rec.t, loss=rec.loss, distorted=rec.distorted,
                       epsilon=rec.epsilon, detected=list(rec.detected))
        for rec in result.records
    ]
    return TrainResponse(
        trajectory_csv=result.trajectory_csv(),
        records=records,
        final_loss=result.final_loss,
        final_model=[float(x) for x in result.weights],
        total_distorted=sum(rec.distorted for rec in result.records),
        digest=result.trajectory_digest(),
    )


@app.post("/bench", response_model=BenchResponse)
def bench(req: BenchRequest) -> BenchResponse:
    rows = []
    for attack in req.attacks:
        for q in req.q_values:
            rows.append(bench_cliques(req.K, req.r, q, attack, repeats=req.repeats))
    models = [
        BenchRowModel(K=row.k_workers, q=row.q, attack=row.attack,
                      milliseconds=row.milliseconds, maximal_cliques=row.maximal_cliques,
                      maximum_cliques=row.maximum_cliques, max_size=row.max_size)
        for row in rows
    ]
    return BenchResponse(rows=models, csv=bench_csv(rows))
