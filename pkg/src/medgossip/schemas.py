"""Request and response models for the experiment service."""

from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, Field


class DelayIn(BaseModel):
    """Link delay model: fixed ms, or uniform integer ms in [lo_ms, hi_ms]."""

    kind: Literal["fixed", "uniform"] = "fixed"
    ms: int = Field(default=5, ge=0)
    lo_ms: int = Field(default=1, ge=0)
    hi_ms: int = Field(default=10, ge=0)


class WorkloadIn(BaseModel):
    """Per-type message counts and proposal pacing."""

    patient_data: int = Field(default=25, ge=0)
    diagnosis: int = Field(default=25, ge=0)
    treatment_plan: int = Field(default=25, ge=0)
    emergency_alert: int = Field(default=25, ge=0)
    gap_ms: int = Field(default=1000, ge=1)
    start_ms: int | None = Field(default=None, ge=0)


class InjectPlanIn(BaseModel):
    """Corruption counts per attack category."""

    bad_signature: int = Field(default=0, ge=0)
    expired_timestamp: int = Field(default=0, ge=0)
    malformed_content: int = Field(default=0, ge=0)


class RunRequest(BaseModel):
    """One experiment run; seed is mandatory for reproducibility."""

    seed: int
    n: int = Field(default=4, ge=1)
    f: int = Field(default=1, ge=0)
    fanout: int = Field(default=2, ge=1)
    hmax: int | None = Field(default=None, ge=1)
    max_age_ms: int = Field(default=300_000, ge=1)
    future_skew_ms: int = Field(default=0, ge=0)
    delay: DelayIn = DelayIn()
    vote_timeout_ms: int | None = Field(default=None, ge=1)
    workload: WorkloadIn = WorkloadIn()
    inject: InjectPlanIn = InjectPlanIn()
    profiles: dict[str, str] | None = None
    trace: bool = False
    max_events: int | None = Field(default=None, ge=1)


class SweepRequest(BaseModel):
    """Scalability sweep over f = f_min..f_max with n = 3f + 1."""

    seed: int
    f_min: int = Field(default=1, ge=1)
    f_max: int = Field(default=10, ge=1)
    fanout: int = Field(default=2, ge=1)
    hmax: int | None = Field(default=None, ge=1)
    max_age_ms: int = Field(default=300_000, ge=1)
    future_skew_ms: int = Field(default=0, ge=0)
    delay: DelayIn = DelayIn()
    vote_timeout_ms: int | None = Field(default=None, ge=1)
    workload: WorkloadIn = WorkloadIn()
    jobs: int = Field(default=1, ge=1)
    max_events: int | None = Field(default=None, ge=1)


class RunResponse(BaseModel):
    config: dict[str, Any]
    metrics: dict[str, Any]
    events: list[dict[str, Any]] | None = None


class SweepPointOut(BaseModel):
    n: int
    f: int
    threshold: int
    metrics: dict[str, Any]


class SweepResponse(BaseModel):
    config: dict[str, Any]
    points: list[SweepPointOut]
    rows: list[dict[str, Any]]


class HealthResponse(BaseModel):
    status: str
    service: str
    version: str
