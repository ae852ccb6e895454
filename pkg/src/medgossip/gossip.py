"""Epidemic dissemination: duplicate suppression, hop limiting, fanout sampling.

An agent handles each message id at most once. Copies arriving at or beyond
the hop cap are dropped before any local processing, so a message at the hop
limit is never validated by its receiver. Forwarding targets are sampled
uniformly from the agent's peers excluding the link the copy arrived on;
backflow to the sender would be suppressed anyway and skipping it is what
makes a 4-node full mesh reach everyone on every seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Iterable, Iterator

from .messages import MedicalMessage

if TYPE_CHECKING:  # pragma: no cover
    from .simnet import AgentState, SimNetwork


@dataclass(frozen=True)
class GossipConfig:
    """Fanout cap k and hop cap h_max; both at least 1."""

    fanout_cap: int = 2
    h_max: int = 3

    def __post_init__(self) -> None:
        if self.fanout_cap < 1:
            raise ValueError("fanout_cap must be >= 1")
        if self.h_max < 1:
            raise ValueError("h_max must be >= 1")


class SeenSet:
    """Insert-only record of message ids an agent has processed."""

    def __init__(self, ids: Iterable[str] = ()) -> None:
        self._ids: set[str] = set(ids)

    def add(self, message_id: str) -> None:
        self._ids.add(message_id)

    def __contains__(self, message_id: str) -> bool:
        return message_id in self._ids

    def __len__(self) -> int:
        return len(self._ids)

    def __iter__(self) -> Iterator[str]:
        return iter(self._ids)


class GossipAction(Enum):
    PROCESSED = "PROCESSED"
    DUPLICATE = "DUPLICATE"
    HOP_LIMIT = "HOP_LIMIT"


@dataclass(frozen=True)
class GossipOutcome:
    """What one delivery did: suppressed, hop-dropped, or processed+forwarded."""

    action: GossipAction
    forwarded_to: tuple[str, ...] = ()

    @property
    def processed(self) -> bool:
        return self.action is GossipAction.PROCESSED


def handle_gossip(
    msg: MedicalMessage,
    agent: "AgentState",
    network: "SimNetwork",
    config: GossipConfig,
    from_agent: str | None = None,
) -> GossipOutcome:
    """Process one delivered copy and forward it to a fresh peer sample.

    from_agent is the link the copy arrived on (None for the proposer's own
    initial dissemination at hop 0).
    """
    if msg.id in agent.seen:
        return GossipOutcome(GossipAction.DUPLICATE)
    if msg.hop_count >= config.h_max:
        return GossipOutcome(GossipAction.HOP_LIMIT)
    agent.seen.add(msg.id)
    network.process_locally(agent, msg)
    pool = [p for p in agent.peers if p != from_agent]
    k = min(config.fanout_cap, len(pool))
    targets = network.sample_peers(pool, k)
    forwarded = msg.next_hop()
    for peer in targets:
        network.send(agent.id, peer, forwarded)
    return GossipOutcome(GossipAction.PROCESSED, tuple(targets))


def expected_coverage(k: int, h: int) -> int:
    """Predicted agents reached within h hops at fanout k: sum of k^i, i=0..h.

    The closed form (k^(h+1) - 1) / (k - 1) is singular at k=1, where the
    geometric sum degenerates to h + 1.
    """
    if k < 1:
        raise ValueError("fanout k must be >= 1")
    if h < 0:
        raise ValueError("hop count h must be >= 0")
    if k == 1:
        return h + 1
    return (k ** (h + 1) - 1) // (k - 1)


def measured_coverage(message_id: str, network: "SimNetwork") -> float:
    """Fraction of agents whose seen set contains the message id."""
    reached = sum(1 for agent in network.agents.values() if message_id in agent.seen)
    return reached / len(network.agents)
