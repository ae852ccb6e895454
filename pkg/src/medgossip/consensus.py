"""Quorum voting: per-message consensus rounds against the 2f+1 threshold.

A round collects one vote per agent. It is accepted the moment ACCEPT votes
reach 2f+1, rejected when all n agents have voted without reaching the
threshold, and rejected on timeout otherwise. Decisions are final; votes
arriving afterwards are kept for metrics but cannot flip the outcome.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class Vote(Enum):
    ACCEPT = "ACCEPT"
    REJECT = "REJECT"


class Decision(Enum):
    PENDING = "PENDING"
    ACCEPTED = "ACCEPTED"
    REJECTED = "REJECTED"


class DecisionCause(Enum):
    """Why a round left PENDING: quorum met, all votes in, or timer expiry."""

    QUORUM = "QUORUM"
    ALL_VOTES = "ALL_VOTES"
    TIMEOUT = "TIMEOUT"


@dataclass(frozen=True)
class QuorumConfig:
    """Network size n, tolerated Byzantine count f, and the vote timeout."""

    n: int
    f: int
    vote_timeout_ms: int

    def __post_init__(self) -> None:
        if self.f < 0:
            raise ValueError("f must be non-negative")
        if self.n < 3 * self.f + 1:
            raise ValueError(
                f"quorum requires n >= 3f + 1 (got n={self.n}, f={self.f})"
            )
        if self.vote_timeout_ms <= 0:
            raise ValueError("vote_timeout_ms must be positive")

    def threshold(self) -> int:
        return 2 * self.f + 1


def quorum_threshold(config: QuorumConfig) -> int:
    """ACCEPT votes needed to decide a round: 2f + 1."""
    return config.threshold()


@dataclass
class ConsensusRound:
    """Vote ledger and decision state for one proposed message."""

    message_id: str
    proposer: str
    proposed_at_ms: int
    votes: dict[str, Vote] = field(default_factory=dict)
    decision: Decision = Decision.PENDING
    decided_at_ms: int | None = None
    cause: DecisionCause | None = None
    duplicate_votes: int = 0  # repeat votes from one agent; equivocation evidence
    late_votes: int = 0  # first votes landing after the decision

    def accept_count(self) -> int:
        return sum(1 for v in self.votes.values() if v is Vote.ACCEPT)

    def _decide(self, decision: Decision, cause: DecisionCause, now_ms: int) -> None:
        self.decision = decision
        self.cause = cause
        self.decided_at_ms = now_ms

    @property
    def latency_ms(self) -> int | None:
        if self.decided_at_ms is None:
            return None
        return self.decided_at_ms - self.proposed_at_ms


def record_vote(
    rnd: ConsensusRound,
    voter: str,
    vote: Vote,
    config: QuorumConfig,
    now_ms: int,
) -> Decision:
    """Record one vote; first vote per agent wins, decisions are monotone.

    Returns the round's decision after the vote is applied.
    """
    if voter in rnd.votes:
        rnd.duplicate_votes += 1
        return rnd.decision
    rnd.votes[voter] = vote
    if rnd.decision is not Decision.PENDING:
        rnd.late_votes += 1
        return rnd.decision
    if rnd.accept_count() >= config.threshold():
        rnd._decide(Decision.ACCEPTED, DecisionCause.QUORUM, now_ms)
    elif len(rnd.votes) >= config.n:
        rnd._decide(Decision.REJECTED, DecisionCause.ALL_VOTES, now_ms)
    return rnd.decision


def expire_round(rnd: ConsensusRound, config: QuorumConfig, now_ms: int) -> Decision:
    """Reject a still-pending round at timeout; no-op on decided rounds."""
    if rnd.decision is Decision.PENDING:
        rnd._decide(Decision.REJECTED, DecisionCause.TIMEOUT, now_ms)
    return rnd.decision
