"""Experiment metrics: accuracy, detection, coverage, latency, send counts.

All aggregates serialize to plain JSON-able dicts and reconstruct losslessly,
so a metrics document can be re-read and compared byte-for-byte.
"""

from __future__ import annotations

import json
import math
import statistics
from dataclasses import dataclass, field
from typing import Any


def nearest_rank_percentile(values: list[int], percentile: float) -> int:
    """Nearest-rank percentile: the ceil(p/100 * N)-th smallest value."""
    if not values:
        raise ValueError("percentile of empty list")
    ordered = sorted(values)
    rank = max(1, math.ceil(percentile / 100.0 * len(ordered)))
    return ordered[rank - 1]


@dataclass(frozen=True)
class TypeStats:
    """Table-style per-message-type tally."""

    total: int = 0
    accepted: int = 0

    @property
    def accuracy(self) -> float | None:
        if self.total == 0:
            return None
        return self.accepted / self.total


@dataclass(frozen=True)
class AttackStats:
    """Detection tally for one injected corruption category."""

    injected: int = 0
    rejected: int = 0
    validation_reasons: dict[str, int] = field(default_factory=dict)

    @property
    def detection_rate(self) -> float | None:
        if self.injected == 0:
            return None
        return self.rejected / self.injected


@dataclass(frozen=True)
class LatencyStats:
    """Virtual-time consensus latency distribution over decided rounds."""

    count: int
    mean_ms: float | None
    std_ms: float | None
    p50_ms: int | None
    p95_ms: int | None

    @classmethod
    def from_values(cls, values: list[int]) -> "LatencyStats":
        if not values:
            return cls(count=0, mean_ms=None, std_ms=None, p50_ms=None, p95_ms=None)
        return cls(
            count=len(values),
            mean_ms=statistics.fmean(values),
            std_ms=statistics.pstdev(values),
            p50_ms=nearest_rank_percentile(values, 50),
            p95_ms=nearest_rank_percentile(values, 95),
        )


@dataclass(frozen=True)
class ExperimentMetrics:
    """Everything one run reports; shaped after the accuracy and detection
    tables plus coverage, latency, and message-complexity series."""

    n: int
    f: int
    threshold: int
    per_type: dict[str, TypeStats]
    per_attack: dict[str, AttackStats]
    coverage_per_message: dict[str, float]
    latency: LatencyStats
    sends_per_message: dict[str, int]
    duplicate_votes: int
    late_votes: int
    proposals_refused: int
    rounds_accepted: int
    rounds_rejected: int
    rounds_pending: int
    min_honest_accepts: int | None

    @property
    def totals(self) -> TypeStats:
        return TypeStats(
            total=sum(s.total for s in self.per_type.values()),
            accepted=sum(s.accepted for s in self.per_type.values()),
        )

    @property
    def attack_totals(self) -> AttackStats:
        return AttackStats(
            injected=sum(s.injected for s in self.per_attack.values()),
            rejected=sum(s.rejected for s in self.per_attack.values()),
        )

    @property
    def coverage_mean(self) -> float | None:
        if not self.coverage_per_message:
            return None
        return statistics.fmean(self.coverage_per_message.values())

    @property
    def coverage_min(self) -> float | None:
        if not self.coverage_per_message:
            return None
        return min(self.coverage_per_message.values())

    @property
    def sends_mean(self) -> float | None:
        if not self.sends_per_message:
            return None
        return statistics.fmean(self.sends_per_message.values())

    @property
    def sends_max(self) -> int | None:
        if not self.sends_per_message:
            return None
        return max(self.sends_per_message.values())

    def to_dict(self) -> dict[str, Any]:
        totals = self.totals
        attack_totals = self.attack_totals
        return {
            "n": self.n,
            "f": self.f,
            "threshold": self.threshold,
            "per_type": {
                name: {"total": s.total, "accepted": s.accepted, "accuracy": s.accuracy}
                for name, s in self.per_type.items()
            },
            "totals": {
                "total": totals.total,
                "accepted": totals.accepted,
                "accuracy": totals.accuracy,
            },
            "per_attack": {
                name: {
                    "injected": s.injected,
                    "rejected": s.rejected,
                    "detection_rate": s.detection_rate,
                    "validation_reasons": dict(sorted(s.validation_reasons.items())),
                }
                for name, s in self.per_attack.items()
            },
            "attack_totals": {
                "injected": attack_totals.injected,
                "rejected": attack_totals.rejected,
                "detection_rate": attack_totals.detection_rate,
            },
            "coverage": {
                "per_message": dict(sorted(self.coverage_per_message.items())),
                "mean": self.coverage_mean,
                "min": self.coverage_min,
            },
            "latency_ms": {
                "count": self.latency.count,
                "mean": self.latency.mean_ms,
                "std": self.latency.std_ms,
                "p50": self.latency.p50_ms,
                "p95": self.latency.p95_ms,
            },
            "gossip_sends": {
                "per_message": dict(sorted(self.sends_per_message.items())),
                "mean": self.sends_mean,
                "max": self.sends_max,
            },
            "votes": {"duplicate": self.duplicate_votes, "late": self.late_votes},
            "rounds": {
                "accepted": self.rounds_accepted,
                "rejected": self.rounds_rejected,
                "pending": self.rounds_pending,
                "refused_proposals": self.proposals_refused,
            },
            "safety": {
                "min_honest_accepts": self.min_honest_accepts,
                "required_honest_accepts": self.f + 1,
            },
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ExperimentMetrics":
        return cls(
            n=data["n"],
            f=data["f"],
            threshold=data["threshold"],
            per_type={
                name: TypeStats(total=s["total"], accepted=s["accepted"])
                for name, s in data["per_type"].items()
            },
            per_attack={
                name: AttackStats(
                    injected=s["injected"],
                    rejected=s["rejected"],
                    validation_reasons=dict(s["validation_reasons"]),
                )
                for name, s in data["per_attack"].items()
            },
            coverage_per_message=dict(data["coverage"]["per_message"]),
            latency=LatencyStats(
                count=data["latency_ms"]["count"],
                mean_ms=data["latency_ms"]["mean"],
                std_ms=data["latency_ms"]["std"],
                p50_ms=data["latency_ms"]["p50"],
                p95_ms=data["latency_ms"]["p95"],
            ),
            sends_per_message=dict(data["gossip_sends"]["per_message"]),
            duplicate_votes=data["votes"]["duplicate"],
            late_votes=data["votes"]["late"],
            proposals_refused=data["rounds"]["refused_proposals"],
            rounds_accepted=data["rounds"]["accepted"],
            rounds_rejected=data["rounds"]["rejected"],
            rounds_pending=data["rounds"]["pending"],
            min_honest_accepts=data["safety"]["min_honest_accepts"],
        )


def stable_json(document: Any) -> str:
    """Canonical JSON rendering: sorted keys, fixed separators, trailing newline."""
    return json.dumps(document, sort_keys=True, indent=2, separators=(",", ": ")) + "\n"
