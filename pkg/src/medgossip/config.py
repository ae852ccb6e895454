"""Run configuration: validation, derived defaults, and the flat config format.

Config files are flat ``key = value`` text (one pair per line, ``#`` comments)
so they diff cleanly and stay format-neutral. Seeds are always explicit; there
is no wall-clock fallback anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

from .simnet import DEFAULT_MAX_EVENTS, DelayModel, FixedDelay, UniformDelay
from .messages import DEFAULT_MAX_AGE_MS
from .workload import WorkloadSpec

DEFAULT_FIXED_DELAY_MS = 5
VOTE_TIMEOUT_DELAY_FACTOR = 20  # default timeout: 20x the worst link delay


class ConfigError(ValueError):
    """Invalid configuration, carrying the offending field name."""

    def __init__(self, field_name: str, message: str) -> None:
        super().__init__(f"{field_name}: {message}")
        self.field_name = field_name
        self.message = message


def auto_h_max(n: int) -> int:
    """Hop cap sized to the network: geometric fanout-2 reach needs about
    log2(n) levels, plus slack for forwards that land on already-covered
    peers. Never below the 3-hop floor used by the 4-agent setup."""
    return max(3, math.ceil(math.log2(n + 1)) + 2)


@dataclass(frozen=True)
class RunConfig:
    """Everything a single experiment run needs; seed is mandatory."""

    seed: int
    n: int = 4
    f: int = 1
    topology: str = "FULL"
    fanout_cap: int = 2
    h_max: int | None = None  # None: auto_h_max(n)
    max_age_ms: int = DEFAULT_MAX_AGE_MS
    future_skew_ms: int = 0
    delay: DelayModel = FixedDelay(DEFAULT_FIXED_DELAY_MS)
    vote_timeout_ms: int | None = None  # None: 20x max link delay
    workload: WorkloadSpec = field(default_factory=WorkloadSpec)
    trace: bool = False
    jobs: int = 1
    max_events: int = DEFAULT_MAX_EVENTS

    def validate(self) -> None:
        if self.n < 1:
            raise ConfigError("n", "must be at least 1")
        if self.f < 0:
            raise ConfigError("f", "must be non-negative")
        if self.n < 3 * self.f + 1:
            raise ConfigError(
                "n", f"must satisfy n >= 3f + 1 (got n={self.n}, f={self.f})"
            )
        if self.topology != "FULL":
            raise ConfigError("topology", "only FULL is supported")
        if self.fanout_cap < 1:
            raise ConfigError("fanout_cap", "must be >= 1")
        if self.h_max is not None and self.h_max < 1:
            raise ConfigError("h_max", "must be >= 1")
        if self.max_age_ms <= 0:
            raise ConfigError("max_age_ms", "must be positive")
        if self.future_skew_ms < 0:
            raise ConfigError("future_skew_ms", "must be non-negative")
        if self.vote_timeout_ms is not None and self.vote_timeout_ms <= 0:
            raise ConfigError("vote_timeout_ms", "must be positive")
        if self.jobs < 1:
            raise ConfigError("jobs", "must be >= 1")
        if self.max_events < 1:
            raise ConfigError("max_events", "must be >= 1")
        plan = self.workload.plan
        if plan.stale_stamper > 0:
            start = self.resolved_start_ms()
            if start < self.max_age_ms + 1:
                raise ConfigError(
                    "start_ms",
                    "stale-timestamp injection needs proposals to start at or "
                    f"after max_age_ms + 1 = {self.max_age_ms + 1}",
                )

    def resolved_h_max(self) -> int:
        return self.h_max if self.h_max is not None else auto_h_max(self.n)

    def resolved_vote_timeout_ms(self) -> int:
        if self.vote_timeout_ms is not None:
            return self.vote_timeout_ms
        return max(1, VOTE_TIMEOUT_DELAY_FACTOR * self.delay.max_delay_ms)

    def resolved_start_ms(self) -> int:
        if self.workload.start_ms is not None:
            return self.workload.start_ms
        return self.max_age_ms + self.workload.gap_ms

    def resolved(self) -> "RunConfig":
        """Concrete copy with every derived default filled in."""
        self.validate()
        return replace(
            self,
            h_max=self.resolved_h_max(),
            vote_timeout_ms=self.resolved_vote_timeout_ms(),
            workload=replace(self.workload, start_ms=self.resolved_start_ms()),
        )

    def to_dict(self) -> dict:
        delay: dict
        if isinstance(self.delay, FixedDelay):
            delay = {"kind": "fixed", "ms": self.delay.ms}
        else:
            delay = {"kind": "uniform", "lo_ms": self.delay.lo_ms, "hi_ms": self.delay.hi_ms}
        return {
            "seed": self.seed,
            "n": self.n,
            "f": self.f,
            "topology": self.topology,
            "fanout_cap": self.fanout_cap,
            "h_max": self.h_max,
            "max_age_ms": self.max_age_ms,
            "future_skew_ms": self.future_skew_ms,
            "delay": delay,
            "vote_timeout_ms": self.vote_timeout_ms,
            "workload": {
                "counts": {t.name: c for t, c in self.workload.counts.items()},
                "plan": {
                    "bad_signer": self.workload.plan.bad_signer,
                    "stale_stamper": self.workload.plan.stale_stamper,
                    "malformer": self.workload.plan.malformer,
                },
                "gap_ms": self.workload.gap_ms,
                "start_ms": self.workload.start_ms,
            },
            "trace": self.trace,
            "jobs": self.jobs,
            "max_events": self.max_events,
        }


def parse_config_file(path: str | Path) -> dict[str, str]:
    """Read a flat key=value config file into a string mapping."""
    entries: dict[str, str] = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(
                f"line {lineno}", f"expected key=value, got {line!r}"
            )
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key:
            raise ConfigError(f"line {lineno}", "empty key")
        if key in entries:
            raise ConfigError(key, f"duplicated on line {lineno}")
        entries[key] = value
    return entries


def make_delay(
    fixed_ms: int | None,
    uniform_lo_ms: int | None,
    uniform_hi_ms: int | None,
) -> DelayModel:
    """Build a delay model from flat fields; fixed and uniform are exclusive."""
    uniform_given = uniform_lo_ms is not None or uniform_hi_ms is not None
    if fixed_ms is not None and uniform_given:
        raise ConfigError("delay", "fixed and uniform delay are mutually exclusive")
    if uniform_given:
        if uniform_lo_ms is None or uniform_hi_ms is None:
            raise ConfigError("delay", "uniform delay needs both lo and hi")
        try:
            return UniformDelay(uniform_lo_ms, uniform_hi_ms)
        except ValueError as exc:
            raise ConfigError("delay", str(exc)) from None
    if fixed_ms is not None:
        try:
            return FixedDelay(fixed_ms)
        except ValueError as exc:
            raise ConfigError("delay", str(exc)) from None
    return FixedDelay(DEFAULT_FIXED_DELAY_MS)
