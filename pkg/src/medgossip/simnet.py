"""Deterministic discrete-event network simulator.

Virtual time only advances when events execute; ties are broken by insertion
sequence so a (config, seed) pair fully determines every run. Agents carry a
behavior profile: honest agents and message-corrupting profiles vote their
true validation verdict, vote flippers negate it, silent agents never vote.
"""

from __future__ import annotations

import hashlib
import heapq
import random
from collections import Counter, deque
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable

from .consensus import (
    ConsensusRound,
    Decision,
    QuorumConfig,
    Vote,
    expire_round,
    record_vote,
)
from .gossip import GossipAction, GossipConfig, SeenSet, handle_gossip
from .messages import (
    DEFAULT_MAX_AGE_MS,
    MedicalMessage,
    REQUIRED_CONTENT_KEYS,
    MessageType,
    ValidationConfig,
    resign,
    validate_message,
    verify_signature,
)


class SimulationError(RuntimeError):
    """Mid-run abort: non-quiescence past the event cap or a wiring bug."""


class QuorumSafetyError(SimulationError):
    """A round was accepted without f+1 honest ACCEPT votes."""


class Specialization(Enum):
    DIAGNOSIS = "DIAGNOSIS"
    TREATMENT = "TREATMENT"
    EMERGENCY = "EMERGENCY"
    ANALYSIS = "ANALYSIS"


class ByzantineProfile(Enum):
    """Per-agent behavior. The first three corrupt that agent's own proposals
    (or tagged workload messages); they vote honestly. VOTE_FLIPPER and SILENT
    misbehave at vote time instead."""

    HONEST = "HONEST"
    BAD_SIGNER = "BAD_SIGNER"
    STALE_STAMPER = "STALE_STAMPER"
    MALFORMER = "MALFORMER"
    VOTE_FLIPPER = "VOTE_FLIPPER"
    SILENT = "SILENT"


MESSAGE_CORRUPTION_PROFILES = (
    ByzantineProfile.BAD_SIGNER,
    ByzantineProfile.STALE_STAMPER,
    ByzantineProfile.MALFORMER,
)


@dataclass
class AgentState:
    """One node: identity, specialization, peer links, seen set, history."""

    id: str
    specialization: Specialization
    peers: tuple[str, ...]
    seen: SeenSet = field(default_factory=SeenSet)
    history: list[tuple[str, int]] = field(default_factory=list)
    profile: ByzantineProfile = ByzantineProfile.HONEST

    def __post_init__(self) -> None:
        if self.id in self.peers:
            raise ValueError(f"agent {self.id} lists itself as a peer")


@dataclass(frozen=True)
class FixedDelay:
    """Every link delivery takes exactly ms."""

    ms: int

    def __post_init__(self) -> None:
        if self.ms < 0:
            raise ValueError("delay must be non-negative")

    def sample(self, rng: random.Random) -> int:
        return self.ms

    @property
    def max_delay_ms(self) -> int:
        return self.ms


@dataclass(frozen=True)
class UniformDelay:
    """Per-link delay drawn uniformly from [lo_ms, hi_ms] inclusive."""

    lo_ms: int
    hi_ms: int

    def __post_init__(self) -> None:
        if self.lo_ms < 0 or self.hi_ms < self.lo_ms:
            raise ValueError("uniform delay requires 0 <= lo_ms <= hi_ms")

    def sample(self, rng: random.Random) -> int:
        return rng.randint(self.lo_ms, self.hi_ms)

    @property
    def max_delay_ms(self) -> int:
        return self.hi_ms


DelayModel = FixedDelay | UniformDelay


@dataclass(frozen=True)
class VotePayload:
    """Unicast vote from a validator back to the proposer."""

    message_id: str
    voter: str
    vote: Vote


DEFAULT_MAX_EVENTS = 2_000_000

_SPECIALIZATION_CYCLE = (
    Specialization.DIAGNOSIS,
    Specialization.TREATMENT,
    Specialization.EMERGENCY,
    Specialization.ANALYSIS,
)


def agent_name(index: int) -> str:
    return f"agent-{index + 1}"


def fully_connected_agents(
    n: int,
    profiles: dict[str, ByzantineProfile] | None = None,
) -> dict[str, AgentState]:
    """Build agent-1..agent-n with full peer connectivity."""
    names = [agent_name(i) for i in range(n)]
    profiles = profiles or {}
    agents: dict[str, AgentState] = {}
    for i, name in enumerate(names):
        agents[name] = AgentState(
            id=name,
            specialization=_SPECIALIZATION_CYCLE[i % len(_SPECIALIZATION_CYCLE)],
            peers=tuple(p for p in names if p != name),
            profile=profiles.get(name, ByzantineProfile.HONEST),
        )
    return agents


class SimNetwork:
    """Event-driven network of agents running gossip plus quorum voting."""

    def __init__(
        self,
        agents: dict[str, AgentState],
        quorum: QuorumConfig,
        gossip: GossipConfig,
        validation: ValidationConfig,
        delay: DelayModel,
        rng: random.Random,
        trace: bool = False,
        max_events: int = DEFAULT_MAX_EVENTS,
    ) -> None:
        if quorum.n != len(agents):
            raise ValueError("quorum config n must match the agent count")
        for agent in agents.values():
            for peer in agent.peers:
                if peer not in agents:
                    raise ValueError(f"agent {agent.id} peers unknown agent {peer}")
        self.agents = agents
        self.quorum = quorum
        self.gossip_config = gossip
        self.validation = validation
        self.delay = delay
        self.rng = rng
        self.max_events = max_events
        self.clock_ms = 0
        self.rounds: dict[str, ConsensusRound] = {}
        self.trace_events: list[dict] | None = [] if trace else None

        self._queue: list[tuple[int, int, Callable[[], None]]] = []
        self._seq = 0
        self._events_executed = 0
        self._distances: dict[tuple[str, str], int | None] = {}

        # per-message accounting used by the metrics harness and invariants
        self.gossip_sends: Counter[str] = Counter()
        self.duplicate_deliveries: Counter[str] = Counter()
        self.hop_drops: Counter[str] = Counter()
        self.process_counts: Counter[tuple[str, str]] = Counter()
        self.max_processed_hop: dict[str, int] = {}
        self.validation_reasons: dict[str, Counter[str]] = {}
        self.proposals_refused = 0
        self.votes_unroutable = 0
        self.votes_orphaned = 0

    # -- scheduling ---------------------------------------------------------

    def schedule(self, delay_ms: int, fn: Callable[[], None]) -> None:
        """Enqueue fn at clock + delay; same-time events run in insert order."""
        if delay_ms < 0:
            raise ValueError("delay_ms must be non-negative")
        heapq.heappush(self._queue, (self.clock_ms + delay_ms, self._seq, fn))
        self._seq += 1

    def run(self) -> None:
        """Execute events until quiescence (empty queue) or the event cap."""
        while self._queue:
            self._events_executed += 1
            if self._events_executed > self.max_events:
                raise SimulationError(
                    f"not quiescent after {self.max_events} events; "
                    f"{len(self._queue)} still queued at t={self.clock_ms}ms"
                )
            time_ms, _, fn = heapq.heappop(self._queue)
            if time_ms < self.clock_ms:
                raise SimulationError("event scheduled in the past")
            self.clock_ms = time_ms
            fn()

    def _trace(self, event_type: str, actor: str, message_id: str, detail: dict) -> None:
        if self.trace_events is not None:
            self.trace_events.append(
                {
                    "time_ms": self.clock_ms,
                    "type": event_type,
                    "actor": actor,
                    "message_id": message_id,
                    "detail": detail,
                }
            )

    # -- transport ----------------------------------------------------------

    def sample_peers(self, pool: list[str], k: int) -> list[str]:
        """Draw k distinct targets from pool using the run's seeded RNG."""
        return self.rng.sample(pool, k)

    def send(self, frm: str, to: str, payload: MedicalMessage | VotePayload) -> None:
        """Schedule delivery of a gossip copy or a vote over the network."""
        if frm not in self.agents or to not in self.agents:
            raise SimulationError(f"send between unknown agents: {frm} -> {to}")
        if frm == to:
            raise SimulationError(f"agent {frm} attempted a self-send")
        if isinstance(payload, MedicalMessage):
            if to not in self.agents[frm].peers:
                raise SimulationError(f"gossip send over missing edge {frm} -> {to}")
            self.gossip_sends[payload.id] += 1
            delay = self.delay.sample(self.rng)
            self.schedule(delay, lambda: self._deliver_gossip(frm, to, payload))
        else:
            hops = self._distance(frm, to)
            if hops is None:
                self.votes_unroutable += 1
                return
            delay = sum(self.delay.sample(self.rng) for _ in range(hops))
            self.schedule(delay, lambda: self._deliver_vote(to, payload))

    def _distance(self, frm: str, to: str) -> int | None:
        """Hop distance over peer edges; votes pay per-hop delay (None: no path)."""
        key = (frm, to)
        if key not in self._distances:
            dist: int | None = None
            visited = {frm}
            frontier = deque([(frm, 0)])
            while frontier:
                node, d = frontier.popleft()
                if node == to:
                    dist = d
                    break
                for peer in self.agents[node].peers:
                    if peer not in visited:
                        visited.add(peer)
                        frontier.append((peer, d + 1))
            self._distances[key] = dist
        return self._distances[key]

    # -- gossip + voting ----------------------------------------------------

    def _deliver_gossip(self, frm: str, to: str, msg: MedicalMessage) -> None:
        agent = self.agents[to]
        outcome = handle_gossip(msg, agent, self, self.gossip_config, from_agent=frm)
        if outcome.action is GossipAction.DUPLICATE:
            self.duplicate_deliveries[msg.id] += 1
        elif outcome.action is GossipAction.HOP_LIMIT:
            self.hop_drops[msg.id] += 1
        self._trace(
            "gossip_deliver",
            to,
            msg.id,
            {
                "from": frm,
                "hop": msg.hop_count,
                "action": outcome.action.value,
                "forwarded_to": list(outcome.forwarded_to),
            },
        )

    def process_locally(self, agent: AgentState, msg: MedicalMessage) -> None:
        """Local handling on first receipt: track the hop, then vote unless
        this agent is the proposer (whose vote was recorded at proposal)."""
        self.process_counts[(msg.id, agent.id)] += 1
        prev = self.max_processed_hop.get(msg.id, 0)
        self.max_processed_hop[msg.id] = max(prev, msg.hop_count)
        if agent.id == msg.sender:
            return
        vote = self._compute_vote(agent, msg)
        if vote is None:
            return
        self.send(agent.id, msg.sender, VotePayload(msg.id, agent.id, vote))

    def _record_validation(self, message_id: str, reason: str) -> None:
        self.validation_reasons.setdefault(message_id, Counter())[reason] += 1

    def _compute_vote(self, agent: AgentState, msg: MedicalMessage) -> Vote | None:
        verdict = validate_message(msg, self.clock_ms, self.validation)
        self._record_validation(msg.id, verdict.reason.name)
        honest_vote = Vote.ACCEPT if verdict.accepted else Vote.REJECT
        if agent.profile is ByzantineProfile.VOTE_FLIPPER:
            return Vote.REJECT if honest_vote is Vote.ACCEPT else Vote.ACCEPT
        if agent.profile is ByzantineProfile.SILENT:
            return None
        return honest_vote

    def _deliver_vote(self, proposer: str, payload: VotePayload) -> None:
        rnd = self.rounds.get(payload.message_id)
        if rnd is None:
            # gossip without a proposal (or a refused one): nothing to tally
            self.votes_orphaned += 1
            return
        before = rnd.decision
        decision = record_vote(rnd, payload.voter, payload.vote, self.quorum, self.clock_ms)
        if before is Decision.PENDING and decision is not Decision.PENDING:
            self._on_decided(rnd)
        self._trace(
            "vote_deliver",
            proposer,
            payload.message_id,
            {
                "voter": payload.voter,
                "vote": payload.vote.value,
                "accepts": rnd.accept_count(),
                "votes": len(rnd.votes),
                "decision": decision.value,
            },
        )

    def _on_decided(self, rnd: ConsensusRound) -> None:
        if rnd.decision is Decision.ACCEPTED:
            self._check_quorum_safety(rnd)
            self.agents[rnd.proposer].history.append(
                (rnd.message_id, rnd.decided_at_ms or 0)
            )

    def _check_quorum_safety(self, rnd: ConsensusRound) -> None:
        honest_accepts = self.honest_accept_count(rnd)
        if honest_accepts < self.quorum.f + 1:
            raise QuorumSafetyError(
                f"round {rnd.message_id} accepted with only {honest_accepts} "
                f"honest ACCEPT votes (need {self.quorum.f + 1})"
            )

    def honest_accept_count(self, rnd: ConsensusRound) -> int:
        return sum(
            1
            for voter, vote in rnd.votes.items()
            if vote is Vote.ACCEPT
            and self.agents[voter].profile is ByzantineProfile.HONEST
        )

    # -- proposals ----------------------------------------------------------

    def propose(self, agent_id: str, msg: MedicalMessage) -> ConsensusRound | None:
        """Honest proposal path: refuse on a failed self-signature check,
        otherwise open a round, self-vote, gossip, and arm the timeout."""
        if not verify_signature(msg):
            self.proposals_refused += 1
            self._trace("propose_refused", agent_id, msg.id, {"reason": "BAD_SIGNATURE"})
            return None
        verdict = validate_message(msg, self.clock_ms, self.validation)
        self._record_validation(msg.id, verdict.reason.name)
        self_vote = Vote.ACCEPT if verdict.accepted else Vote.REJECT
        return self._open_round(agent_id, msg, self_vote)

    def propose_byzantine(self, agent_id: str, msg: MedicalMessage) -> ConsensusRound:
        """Fault-injection path: skip the self-check and claim validity."""
        return self._open_round(agent_id, msg, Vote.ACCEPT)

    def _open_round(
        self, agent_id: str, msg: MedicalMessage, self_vote: Vote
    ) -> ConsensusRound:
        if agent_id not in self.agents:
            raise SimulationError(f"unknown proposer {agent_id}")
        if msg.id in self.rounds:
            raise SimulationError(f"duplicate proposal for message {msg.id}")
        rnd = ConsensusRound(
            message_id=msg.id, proposer=agent_id, proposed_at_ms=self.clock_ms
        )
        self.rounds[msg.id] = rnd
        before = rnd.decision
        decision = record_vote(rnd, agent_id, self_vote, self.quorum, self.clock_ms)
        if before is Decision.PENDING and decision is not Decision.PENDING:
            self._on_decided(rnd)
        outcome = handle_gossip(
            msg, self.agents[agent_id], self, self.gossip_config, from_agent=None
        )
        self.schedule(self.quorum.vote_timeout_ms, lambda: self._expire(rnd))
        self._trace(
            "propose",
            agent_id,
            msg.id,
            {"self_vote": self_vote.value, "forwarded_to": list(outcome.forwarded_to)},
        )
        return rnd

    def _expire(self, rnd: ConsensusRound) -> None:
        before = rnd.decision
        decision = expire_round(rnd, self.quorum, self.clock_ms)
        if before is Decision.PENDING and decision is not Decision.PENDING:
            self._on_decided(rnd)
        self._trace(
            "round_timeout",
            rnd.proposer,
            rnd.message_id,
            {"decision": decision.value},
        )

    def coverage(self, message_id: str) -> float:
        reached = sum(1 for a in self.agents.values() if message_id in a.seen)
        return reached / len(self.agents)


def apply_byzantine_corruption(
    msg: MedicalMessage,
    profile: ByzantineProfile,
    rng: random.Random,
    now_ms: int,
    max_age_ms: int = DEFAULT_MAX_AGE_MS,
) -> MedicalMessage:
    """Corrupt a message so exactly one validation stage fails.

    BAD_SIGNER swaps in a digest of random bytes; STALE_STAMPER backdates the
    timestamp past the freshness window and re-signs; MALFORMER breaks one
    required content rule and re-signs. Re-signing is what keeps the three
    attack categories separable in detection metrics.
    """
    if profile is ByzantineProfile.BAD_SIGNER:
        while True:
            fake = hashlib.sha256(rng.randbytes(32)).hexdigest()
            if fake != msg.signature:
                return replace(msg, signature=fake)
    if profile is ByzantineProfile.STALE_STAMPER:
        stale_ts = now_ms - (max_age_ms + 1)
        if stale_ts < 0:
            raise ValueError(
                "cannot backdate past the freshness window this early in the run; "
                "schedule proposals at or after max_age_ms + 1"
            )
        return resign(replace(msg, timestamp_ms=stale_ts))
    if profile is ByzantineProfile.MALFORMER:
        required = REQUIRED_CONTENT_KEYS[msg.msg_type]
        if msg.msg_type is MessageType.DIAGNOSIS and rng.random() < 0.5:
            content = dict(msg.content)
            content["confidence"] = "1.5"
        else:
            drop = rng.choice(required)
            content = {k: v for k, v in msg.content.items() if k != drop}
        return resign(replace(msg, content=content))
    raise ValueError(f"profile {profile} is not a message corruption")
