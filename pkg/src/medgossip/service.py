"""FastAPI service wrapping the simulator.

The service is stateless: every request builds a fresh deterministic run from
its body, so identical requests always return identical documents. Config
problems map to 422 with field-level detail; a simulation that fails to reach
quiescence maps to 500 with a structured marker.
"""

from __future__ import annotations

from dataclasses import replace

from fastapi import FastAPI, HTTPException

from . import __version__
from .config import ConfigError, RunConfig, make_delay
from .experiments import run_experiment, run_scalability_sweep
from .messages import MessageType
from .schemas import (
    HealthResponse,
    RunRequest,
    RunResponse,
    SweepPointOut,
    SweepRequest,
    SweepResponse,
)
from .simnet import ByzantineProfile, SimulationError
from .workload import CorruptionPlan, WorkloadSpec

app = FastAPI(
    title="medgossip",
    description="Byzantine fault-tolerant gossip consensus experiments",
    version=__version__,
)


def _config_error(exc: ConfigError) -> HTTPException:
    return HTTPException(
        status_code=422,
        detail=[{"loc": ["body", exc.field_name], "msg": exc.message, "type": "value_error"}],
    )


def _abort_error(exc: SimulationError) -> HTTPException:
    return HTTPException(
        status_code=500,
        detail={"error": "simulation_abort", "msg": str(exc)},
    )


def _workload_from(req: RunRequest | SweepRequest, plan: CorruptionPlan) -> WorkloadSpec:
    try:
        return WorkloadSpec(
            counts={
                MessageType.PATIENT_DATA: req.workload.patient_data,
                MessageType.DIAGNOSIS: req.workload.diagnosis,
                MessageType.TREATMENT_PLAN: req.workload.treatment_plan,
                MessageType.EMERGENCY_ALERT: req.workload.emergency_alert,
            },
            plan=plan,
            gap_ms=req.workload.gap_ms,
            start_ms=req.workload.start_ms,
        )
    except ValueError as exc:
        raise _config_error(ConfigError("workload", str(exc))) from None


def _delay_from(req: RunRequest | SweepRequest):
    try:
        if req.delay.kind == "uniform":
            return make_delay(None, req.delay.lo_ms, req.delay.hi_ms)
        return make_delay(req.delay.ms, None, None)
    except ConfigError as exc:
        raise _config_error(exc) from None


def build_run_config(req: RunRequest) -> RunConfig:
    plan = CorruptionPlan(
        bad_signer=req.inject.bad_signature,
        stale_stamper=req.inject.expired_timestamp,
        malformer=req.inject.malformed_content,
    )
    cfg = RunConfig(
        seed=req.seed,
        n=req.n,
        f=req.f,
        fanout_cap=req.fanout,
        h_max=req.hmax,
        max_age_ms=req.max_age_ms,
        future_skew_ms=req.future_skew_ms,
        delay=_delay_from(req),
        vote_timeout_ms=req.vote_timeout_ms,
        workload=_workload_from(req, plan),
        trace=req.trace,
    )
    if req.max_events is not None:
        cfg = replace(cfg, max_events=req.max_events)
    try:
        cfg.validate()
    except ConfigError as exc:
        raise _config_error(exc) from None
    return cfg


def _profiles_from(req: RunRequest, n: int) -> dict[str, ByzantineProfile] | None:
    if not req.profiles:
        return None
    profiles: dict[str, ByzantineProfile] = {}
    known = {f"agent-{i + 1}" for i in range(n)}
    for agent_id, name in req.profiles.items():
        if agent_id not in known:
            raise _config_error(ConfigError("profiles", f"unknown agent {agent_id!r}"))
        try:
            profiles[agent_id] = ByzantineProfile[name]
        except KeyError:
            raise _config_error(
                ConfigError("profiles", f"unknown profile {name!r} for {agent_id}")
            ) from None
    return profiles


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok", service="medgossip", version=__version__)


def _execute_run(req: RunRequest) -> RunResponse:
    cfg = build_run_config(req)
    profiles = _profiles_from(req, cfg.n)
    try:
        outcome = run_experiment(cfg, profiles=profiles)
    except ConfigError as exc:
        raise _config_error(exc) from None
    except SimulationError as exc:
        raise _abort_error(exc) from None
    return RunResponse(
        config=outcome.config.to_dict(),
        metrics=outcome.metrics.to_dict(),
        events=outcome.events,
    )


@app.post("/experiments/run", response_model=RunResponse)
def experiments_run(req: RunRequest) -> RunResponse:
    return _execute_run(req)


@app.post("/experiments/inject", response_model=RunResponse)
def experiments_inject(req: RunRequest) -> RunResponse:
    """Fault-injection run; identical contract to /experiments/run, kept as
    its own endpoint so injection workloads are explicit in client code."""
    return _execute_run(req)


@app.post("/experiments/sweep", response_model=SweepResponse)
def experiments_sweep(req: SweepRequest) -> SweepResponse:
    if req.f_max < req.f_min:
        raise _config_error(ConfigError("f_max", "must be >= f_min"))
    base = RunConfig(
        seed=req.seed,
        n=3 * req.f_min + 1,
        f=req.f_min,
        fanout_cap=req.fanout,
        h_max=req.hmax,
        max_age_ms=req.max_age_ms,
        future_skew_ms=req.future_skew_ms,
        delay=_delay_from(req),
        vote_timeout_ms=req.vote_timeout_ms,
        workload=_workload_from(req, CorruptionPlan()),
    )
    if req.max_events is not None:
        base = replace(base, max_events=req.max_events)
    f_values = list(range(req.f_min, req.f_max + 1))
    try:
        points = run_scalability_sweep(f_values, base, jobs=req.jobs)
    except ConfigError as exc:
        raise _config_error(exc) from None
    except SimulationError as exc:
        raise _abort_error(exc) from None
    return SweepResponse(
        config=base.to_dict(),
        points=[
            SweepPointOut(
                n=p.n, f=p.f, threshold=p.threshold, metrics=p.metrics.to_dict()
            )
            for p in points
        ],
        rows=[p.row() for p in points],
    )
