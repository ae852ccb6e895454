"""Experiment orchestration: build a network, drive a workload, aggregate.

A run is a pure function of (config, profiles): the workload generator and the
event loop share one seeded RNG, consumed in a fixed order. The scalability
sweep replays the same recipe across n = 3f + 1 sizes, reusing the seed so any
single point reproduces the standalone run.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

from .config import RunConfig
from .consensus import Decision, QuorumConfig
from .gossip import GossipConfig
from .messages import ValidationConfig
from .metrics import AttackStats, ExperimentMetrics, LatencyStats, TypeStats
from .simnet import (
    MESSAGE_CORRUPTION_PROFILES,
    ByzantineProfile,
    QuorumSafetyError,
    SimNetwork,
    apply_byzantine_corruption,
    fully_connected_agents,
)
from .workload import ScheduledProposal, generate_workload


@dataclass(frozen=True)
class RunOutcome:
    """Metrics plus the resolved config and, when tracing, the event log."""

    config: RunConfig
    metrics: ExperimentMetrics
    events: list[dict] | None


@dataclass(frozen=True)
class SweepPoint:
    n: int
    f: int
    threshold: int
    metrics: ExperimentMetrics

    def row(self) -> dict:
        """Plot-data row: network size against threshold, sends, latency."""
        return {
            "n": self.n,
            "f": self.f,
            "threshold": self.threshold,
            "mean_gossip_sends": self.metrics.sends_mean,
            "max_gossip_sends": self.metrics.sends_max,
            "mean_latency_ms": self.metrics.latency.mean_ms,
            "p95_latency_ms": self.metrics.latency.p95_ms,
            "mean_coverage": self.metrics.coverage_mean,
        }


def _schedule_proposals(net: SimNetwork, scheduled: list[ScheduledProposal], cfg: RunConfig) -> None:
    for sp in scheduled:
        def fire(sp: ScheduledProposal = sp) -> None:
            if sp.corruption is None:
                net.propose(sp.proposer, sp.message)
            else:
                corrupted = apply_byzantine_corruption(
                    sp.message, sp.corruption, net.rng, net.clock_ms, cfg.max_age_ms
                )
                net.propose_byzantine(sp.proposer, corrupted)

        net.schedule(sp.at_ms, fire)


def _aggregate(
    net: SimNetwork, scheduled: list[ScheduledProposal], cfg: RunConfig
) -> ExperimentMetrics:
    per_type: dict[str, TypeStats] = {}
    for sp in scheduled:
        name = sp.message.msg_type.name
        prev = per_type.get(name, TypeStats())
        rnd = net.rounds.get(sp.message.id)
        accepted = rnd is not None and rnd.decision is Decision.ACCEPTED
        per_type[name] = TypeStats(prev.total + 1, prev.accepted + int(accepted))

    per_attack: dict[str, AttackStats] = {}
    for profile in MESSAGE_CORRUPTION_PROFILES:
        tagged = [sp for sp in scheduled if sp.corruption is profile]
        if not tagged:
            continue
        rejected = 0
        reasons: dict[str, int] = {}
        for sp in tagged:
            rnd = net.rounds.get(sp.message.id)
            if rnd is not None and rnd.decision is Decision.REJECTED:
                rejected += 1
            for reason, count in net.validation_reasons.get(sp.message.id, {}).items():
                reasons[reason] = reasons.get(reason, 0) + count
        per_attack[profile.name] = AttackStats(
            injected=len(tagged), rejected=rejected, validation_reasons=reasons
        )

    latencies = [
        rnd.latency_ms for rnd in net.rounds.values() if rnd.latency_ms is not None
    ]
    accepted_rounds = [
        rnd for rnd in net.rounds.values() if rnd.decision is Decision.ACCEPTED
    ]
    min_honest: int | None = None
    if accepted_rounds:
        min_honest = min(net.honest_accept_count(rnd) for rnd in accepted_rounds)
        if min_honest < cfg.f + 1:
            raise QuorumSafetyError(
                f"an accepted round has only {min_honest} honest ACCEPT votes"
            )

    return ExperimentMetrics(
        n=cfg.n,
        f=cfg.f,
        threshold=2 * cfg.f + 1,
        per_type=per_type,
        per_attack=per_attack,
        coverage_per_message={
            sp.message.id: net.coverage(sp.message.id) for sp in scheduled
        },
        latency=LatencyStats.from_values(latencies),
        sends_per_message={
            sp.message.id: net.gossip_sends.get(sp.message.id, 0) for sp in scheduled
        },
        duplicate_votes=sum(r.duplicate_votes for r in net.rounds.values()),
        late_votes=sum(r.late_votes for r in net.rounds.values()),
        proposals_refused=net.proposals_refused,
        rounds_accepted=len(accepted_rounds),
        rounds_rejected=sum(
            1 for r in net.rounds.values() if r.decision is Decision.REJECTED
        ),
        rounds_pending=sum(
            1 for r in net.rounds.values() if r.decision is Decision.PENDING
        ),
        min_honest_accepts=min_honest,
    )


def run_experiment(
    config: RunConfig,
    profiles: dict[str, ByzantineProfile] | None = None,
) -> RunOutcome:
    """Run one experiment to quiescence and aggregate its metrics."""
    cfg = config.resolved()
    rng = random.Random(cfg.seed)
    agents = fully_connected_agents(cfg.n, profiles)
    net = SimNetwork(
        agents=agents,
        quorum=QuorumConfig(cfg.n, cfg.f, cfg.vote_timeout_ms or 1),
        gossip=GossipConfig(fanout_cap=cfg.fanout_cap, h_max=cfg.h_max or 3),
        validation=ValidationConfig(cfg.max_age_ms, cfg.future_skew_ms),
        delay=cfg.delay,
        rng=rng,
        trace=cfg.trace,
        max_events=cfg.max_events,
    )
    scheduled = generate_workload(
        cfg.workload, list(agents.keys()), rng, start_ms=cfg.resolved_start_ms()
    )
    _schedule_proposals(net, scheduled, cfg)
    net.run()
    metrics = _aggregate(net, scheduled, cfg)
    return RunOutcome(config=cfg, metrics=metrics, events=net.trace_events)


def _sweep_config(base: RunConfig, f: int) -> RunConfig:
    return replace(base, n=3 * f + 1, f=f, trace=False)


def _sweep_worker(args: tuple[RunConfig, int]) -> ExperimentMetrics:
    base, f = args
    return run_experiment(_sweep_config(base, f)).metrics


def run_scalability_sweep(
    f_values: list[int],
    base: RunConfig,
    jobs: int = 1,
) -> list[SweepPoint]:
    """Run one experiment per f with n = 3f + 1, same seed at every size."""
    if not f_values:
        raise ValueError("f_values must be non-empty")
    if any(f < 1 for f in f_values):
        raise ValueError("sweep requires f >= 1")
    for f in f_values:
        _sweep_config(base, f).validate()
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_worker, [(base, f) for f in f_values]))
    else:
        results = [_sweep_worker((base, f)) for f in f_values]
    points = [
        SweepPoint(n=3 * f + 1, f=f, threshold=2 * f + 1, metrics=m)
        for f, m in zip(f_values, results)
    ]
    return sorted(points, key=lambda p: p.n)
