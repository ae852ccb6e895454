"""Synthetic workload generation: rule-conforming messages plus corruption tags.

Content draws from small fixed vocabularies so runs are reproducible and
traces stay readable. Corruption tags are assigned up front and applied only
at proposal time, because backdated timestamps depend on the proposal clock.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .messages import MedicalMessage, MessageType
from .simnet import ByzantineProfile

PATIENT_IDS = tuple(f"P{i:04d}" for i in range(1, 21))
DOCTOR_IDS = tuple(f"D{i:02d}" for i in range(1, 9))
DATA_TYPES = ("heart_rate", "blood_pressure", "temperature", "oxygen_saturation", "glucose")
DIAGNOSES = ("hypertension", "type_2_diabetes", "pneumonia", "atrial_fibrillation", "sepsis")
TREATMENTS = ("beta_blocker", "insulin_regimen", "iv_antibiotics", "anticoagulation", "fluid_resuscitation")
ALERT_TYPES = ("cardiac_arrest", "stroke", "anaphylaxis", "respiratory_failure")
SEVERITIES = ("low", "medium", "high", "critical")
LOCATIONS = tuple(f"ward-{i}" for i in range(1, 7)) + ("er", "icu")

DEFAULT_PER_TYPE_COUNT = 25
DEFAULT_GAP_MS = 1000

_TYPE_ORDER = (
    MessageType.PATIENT_DATA,
    MessageType.DIAGNOSIS,
    MessageType.TREATMENT_PLAN,
    MessageType.EMERGENCY_ALERT,
)


@dataclass(frozen=True)
class CorruptionPlan:
    """How many proposals to corrupt per attack category."""

    bad_signer: int = 0
    stale_stamper: int = 0
    malformer: int = 0

    def __post_init__(self) -> None:
        if min(self.bad_signer, self.stale_stamper, self.malformer) < 0:
            raise ValueError("corruption counts must be non-negative")

    @property
    def total(self) -> int:
        return self.bad_signer + self.stale_stamper + self.malformer

    def tags(self) -> list[ByzantineProfile]:
        return (
            [ByzantineProfile.BAD_SIGNER] * self.bad_signer
            + [ByzantineProfile.STALE_STAMPER] * self.stale_stamper
            + [ByzantineProfile.MALFORMER] * self.malformer
        )


@dataclass(frozen=True)
class WorkloadSpec:
    """Message mix, corruption plan, and proposal pacing for one experiment."""

    counts: dict[MessageType, int] = field(
        default_factory=lambda: {t: DEFAULT_PER_TYPE_COUNT for t in _TYPE_ORDER}
    )
    plan: CorruptionPlan = CorruptionPlan()
    gap_ms: int = DEFAULT_GAP_MS
    start_ms: int | None = None  # None: resolved to max_age_ms + gap_ms

    def __post_init__(self) -> None:
        for msg_type in _TYPE_ORDER:
            if self.counts.get(msg_type, 0) < 0:
                raise ValueError(f"negative count for {msg_type.name}")
        if self.gap_ms <= 0:
            raise ValueError("gap_ms must be positive")
        if self.start_ms is not None and self.start_ms < 0:
            raise ValueError("start_ms must be non-negative")
        if self.plan.total > self.total_messages:
            raise ValueError(
                f"corruption plan covers {self.plan.total} messages "
                f"but the workload has only {self.total_messages}"
            )

    @property
    def total_messages(self) -> int:
        return sum(self.counts.get(t, 0) for t in _TYPE_ORDER)


@dataclass(frozen=True)
class ScheduledProposal:
    """One workload entry: who proposes what, when, and any corruption tag."""

    message: MedicalMessage
    proposer: str
    at_ms: int
    corruption: ByzantineProfile | None = None


def _content_for(msg_type: MessageType, rng: random.Random) -> dict[str, str]:
    patient = rng.choice(PATIENT_IDS)
    if msg_type is MessageType.PATIENT_DATA:
        return {
            "patient_id": patient,
            "data_type": rng.choice(DATA_TYPES),
            "value": str(rng.randint(40, 180)),
        }
    if msg_type is MessageType.DIAGNOSIS:
        return {
            "patient_id": patient,
            "diagnosis": rng.choice(DIAGNOSES),
            "confidence": f"{rng.uniform(0.0, 1.0):.2f}",
            "doctor_id": rng.choice(DOCTOR_IDS),
        }
    if msg_type is MessageType.TREATMENT_PLAN:
        return {
            "patient_id": patient,
            "treatment": rng.choice(TREATMENTS),
            "duration": f"{rng.randint(1, 30)}d",
            "doctor_id": rng.choice(DOCTOR_IDS),
        }
    return {
        "patient_id": patient,
        "alert_type": rng.choice(ALERT_TYPES),
        "severity": rng.choice(SEVERITIES),
        "location": rng.choice(LOCATIONS),
    }


def _type_sequence(counts: dict[MessageType, int]) -> list[MessageType]:
    remaining = {t: counts.get(t, 0) for t in _TYPE_ORDER}
    sequence: list[MessageType] = []
    while any(remaining.values()):
        for msg_type in _TYPE_ORDER:
            if remaining[msg_type] > 0:
                sequence.append(msg_type)
                remaining[msg_type] -= 1
    return sequence


def generate_workload(
    spec: WorkloadSpec,
    agent_ids: list[str],
    rng: random.Random,
    start_ms: int,
) -> list[ScheduledProposal]:
    """Produce signed, schedulable proposals with corruption tags shuffled in.

    Proposers rotate round-robin over agent_ids; message i is timestamped at
    its own proposal slot start_ms + i * gap_ms.
    """
    if not agent_ids:
        raise ValueError("need at least one agent")
    sequence = _type_sequence(spec.counts)
    tags: list[ByzantineProfile | None] = list(spec.plan.tags())
    tags += [None] * (len(sequence) - len(tags))
    rng.shuffle(tags)

    proposals = []
    for i, msg_type in enumerate(sequence):
        at_ms = start_ms + i * spec.gap_ms
        proposer = agent_ids[i % len(agent_ids)]
        message = MedicalMessage.signed(
            msg_id=f"msg-{i:04d}",
            msg_type=msg_type,
            content=_content_for(msg_type, rng),
            timestamp_ms=at_ms,
            sender=proposer,
        )
        proposals.append(
            ScheduledProposal(
                message=message, proposer=proposer, at_ms=at_ms, corruption=tags[i]
            )
        )
    return proposals
