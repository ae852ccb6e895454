"""Byzantine fault-tolerant consensus over gossip for healthcare messages.

Deterministic discrete-event simulator plus an experiment service and CLI:
signed medical messages propagate by bounded epidemic gossip, validators vote,
and proposals decide against the 2f+1 quorum threshold under n >= 3f+1.
"""

__version__ = "0.1.0"

from .consensus import (
    ConsensusRound,
    Decision,
    DecisionCause,
    QuorumConfig,
    Vote,
    expire_round,
    quorum_threshold,
    record_vote,
)
from .gossip import (
    GossipConfig,
    SeenSet,
    expected_coverage,
    handle_gossip,
    measured_coverage,
)
from .messages import (
    MedicalMessage,
    MessageType,
    ValidationConfig,
    ValidationReason,
    ValidationVerdict,
    canonical_bytes,
    check_freshness,
    compute_signature,
    validate_content,
    validate_message,
    verify_signature,
)
from .simnet import (
    AgentState,
    ByzantineProfile,
    FixedDelay,
    SimNetwork,
    Specialization,
    UniformDelay,
    apply_byzantine_corruption,
    fully_connected_agents,
)

__all__ = [
    "__version__",
    "AgentState",
    "ByzantineProfile",
    "ConsensusRound",
    "Decision",
    "DecisionCause",
    "FixedDelay",
    "GossipConfig",
    "MedicalMessage",
    "MessageType",
    "QuorumConfig",
    "SeenSet",
    "SimNetwork",
    "Specialization",
    "UniformDelay",
    "ValidationConfig",
    "ValidationReason",
    "ValidationVerdict",
    "Vote",
    "apply_byzantine_corruption",
    "canonical_bytes",
    "check_freshness",
    "compute_signature",
    "expected_coverage",
    "expire_round",
    "fully_connected_agents",
    "handle_gossip",
    "measured_coverage",
    "quorum_threshold",
    "record_vote",
    "validate_content",
    "validate_message",
    "verify_signature",
]
