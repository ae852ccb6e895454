"""Healthcare message model: canonical serialization, hash signatures, validation.

A message is signed by hashing a canonical byte rendering of its identifying
fields. Hop count is transport state and is excluded from the preimage, so
forwarded copies keep the original signature. The hash provides integrity
(tamper detection) only, not sender authentication: any party can recompute
it. Keyed or asymmetric signatures are out of scope.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, replace
from enum import Enum
from typing import Mapping

FIELD_SEP = "|"
PAIR_SEP = ";"
KV_SEP = "="
_DELIMITERS = (FIELD_SEP, PAIR_SEP, KV_SEP)

DEFAULT_MAX_AGE_MS = 300_000  # freshness window: 300 s in virtual milliseconds
DEFAULT_FUTURE_SKEW_MS = 0

_HEX_DIGEST_RE = re.compile(r"^[0-9a-f]{64}$")


class MessageType(Enum):
    """The four healthcare message categories."""

    PATIENT_DATA = "PATIENT_DATA"
    DIAGNOSIS = "DIAGNOSIS"
    TREATMENT_PLAN = "TREATMENT_PLAN"
    EMERGENCY_ALERT = "EMERGENCY_ALERT"

    @classmethod
    def parse(cls, name: str) -> "MessageType":
        """Parse a type name; anything but the four variants raises ValueError."""
        try:
            return cls[name]
        except KeyError:
            raise ValueError(f"unknown message type: {name!r}") from None


# Required content keys per message type. Extra keys are permitted; required
# values must be non-empty. DIAGNOSIS confidence must parse as a decimal in
# [0, 1] inclusive.
REQUIRED_CONTENT_KEYS: dict[MessageType, tuple[str, ...]] = {
    MessageType.PATIENT_DATA: ("patient_id", "data_type", "value"),
    MessageType.DIAGNOSIS: ("patient_id", "diagnosis", "confidence", "doctor_id"),
    MessageType.TREATMENT_PLAN: ("patient_id", "treatment", "duration", "doctor_id"),
    MessageType.EMERGENCY_ALERT: ("patient_id", "alert_type", "severity", "location"),
}


class ValidationReason(Enum):
    """Diagnostic outcome of message validation."""

    OK = "OK"
    BAD_SIGNATURE = "BAD_SIGNATURE"
    STALE_TIMESTAMP = "STALE_TIMESTAMP"
    FUTURE_TIMESTAMP = "FUTURE_TIMESTAMP"
    MALFORMED_CONTENT = "MALFORMED_CONTENT"


@dataclass(frozen=True)
class ValidationVerdict:
    """Validation result; accepted holds exactly when the reason is OK."""

    reason: ValidationReason

    @property
    def accepted(self) -> bool:
        return self.reason is ValidationReason.OK


@dataclass(frozen=True)
class ValidationConfig:
    """Freshness parameters used by full message validation."""

    max_age_ms: int = DEFAULT_MAX_AGE_MS
    future_skew_ms: int = DEFAULT_FUTURE_SKEW_MS

    def __post_init__(self) -> None:
        if self.max_age_ms < 0 or self.future_skew_ms < 0:
            raise ValueError("freshness windows must be non-negative")


def _check_field(name: str, value: str) -> None:
    if not isinstance(value, str) or not value:
        raise ValueError(f"{name} must be a non-empty string")
    if FIELD_SEP in value:
        raise ValueError(f"{name} must not contain {FIELD_SEP!r}: {value!r}")


def _check_content(content: Mapping[str, str]) -> None:
    for key, value in content.items():
        if not isinstance(key, str) or not key:
            raise ValueError("content keys must be non-empty strings")
        if not isinstance(value, str):
            raise ValueError(f"content value for {key!r} must be a string")
        for part, label in ((key, "key"), (value, "value")):
            for delim in _DELIMITERS:
                if delim in part:
                    raise ValueError(
                        f"content {label} {part!r} contains reserved delimiter {delim!r}"
                    )


@dataclass(frozen=True)
class MedicalMessage:
    """One signed, timestamped healthcare message.

    Field constraints are enforced at construction: identifiers are non-empty
    and free of the field delimiter, content keys/values are free of all
    delimiter characters, and the signature is a 64-char lowercase hex digest.
    Forwarded copies share id and signature and differ only in hop_count.
    """

    id: str
    msg_type: MessageType
    content: Mapping[str, str]
    timestamp_ms: int
    sender: str
    signature: str
    hop_count: int = 0

    def __post_init__(self) -> None:
        _check_field("id", self.id)
        _check_field("sender", self.sender)
        if not isinstance(self.msg_type, MessageType):
            raise ValueError(f"msg_type must be a MessageType, got {self.msg_type!r}")
        _check_content(self.content)
        if not isinstance(self.timestamp_ms, int) or self.timestamp_ms < 0:
            raise ValueError("timestamp_ms must be a non-negative integer")
        if not isinstance(self.hop_count, int) or self.hop_count < 0:
            raise ValueError("hop_count must be a non-negative integer")
        if not _HEX_DIGEST_RE.match(self.signature):
            raise ValueError("signature must be 64 lowercase hex characters")

    @classmethod
    def signed(
        cls,
        msg_id: str,
        msg_type: MessageType,
        content: Mapping[str, str],
        timestamp_ms: int,
        sender: str,
        hop_count: int = 0,
    ) -> "MedicalMessage":
        """Construct a message with its signature computed over the fields."""
        signature = compute_signature(msg_id, msg_type, content, timestamp_ms, sender)
        return cls(
            id=msg_id,
            msg_type=msg_type,
            content=dict(content),
            timestamp_ms=timestamp_ms,
            sender=sender,
            signature=signature,
            hop_count=hop_count,
        )

    def next_hop(self) -> "MedicalMessage":
        """Copy for forwarding: hop count incremented, everything else shared."""
        return replace(self, hop_count=self.hop_count + 1)


def canonical_bytes(
    msg_id: str,
    msg_type: MessageType,
    content: Mapping[str, str],
    timestamp_ms: int,
    sender: str,
) -> bytes:
    """Deterministic signing preimage.

    Renders ``id|TYPE|k=v;k=v|timestamp|sender`` in UTF-8 with content pairs
    sorted lexicographically by key. Signature and hop count never enter the
    preimage. Injective as long as fields respect the delimiter exclusions,
    which are re-checked here for direct callers.
    """
    _check_field("id", msg_id)
    _check_field("sender", sender)
    _check_content(content)
    if timestamp_ms < 0:
        raise ValueError("timestamp_ms must be non-negative")
    pairs = PAIR_SEP.join(
        f"{key}{KV_SEP}{content[key]}" for key in sorted(content.keys())
    )
    rendered = FIELD_SEP.join(
        (msg_id, msg_type.name, pairs, str(timestamp_ms), sender)
    )
    return rendered.encode("utf-8")


def compute_signature(
    msg_id: str,
    msg_type: MessageType,
    content: Mapping[str, str],
    timestamp_ms: int,
    sender: str,
) -> str:
    """Lowercase hex SHA-256 of the canonical byte rendering."""
    return hashlib.sha256(
        canonical_bytes(msg_id, msg_type, content, timestamp_ms, sender)
    ).hexdigest()


def verify_signature(msg: MedicalMessage) -> bool:
    """True iff the carried signature matches a recomputation over the fields."""
    try:
        expected = compute_signature(
            msg.id, msg.msg_type, msg.content, msg.timestamp_ms, msg.sender
        )
    except ValueError:
        return False
    return msg.signature == expected


def resign(msg: MedicalMessage) -> MedicalMessage:
    """Recompute the signature after a field change (fault-injection helper)."""
    return replace(
        msg,
        signature=compute_signature(
            msg.id, msg.msg_type, msg.content, msg.timestamp_ms, msg.sender
        ),
    )


def check_freshness(
    timestamp_ms: int,
    now_ms: int,
    max_age_ms: int = DEFAULT_MAX_AGE_MS,
    future_skew_ms: int = DEFAULT_FUTURE_SKEW_MS,
) -> ValidationVerdict:
    """Freshness window check.

    A message is stale once its age reaches max_age_ms (strict `<` survival),
    and rejected as future-dated when its timestamp exceeds now by more than
    the allowed skew.
    """
    if now_ms - timestamp_ms >= max_age_ms:
        return ValidationVerdict(ValidationReason.STALE_TIMESTAMP)
    if timestamp_ms > now_ms + future_skew_ms:
        return ValidationVerdict(ValidationReason.FUTURE_TIMESTAMP)
    return ValidationVerdict(ValidationReason.OK)


def _confidence_in_range(raw: str) -> bool:
    try:
        value = float(raw)
    except ValueError:
        return False
    return 0.0 <= value <= 1.0


def validate_content(msg_type: MessageType, content: Mapping[str, str]) -> bool:
    """Per-type required-field check; extra keys are permitted."""
    for key in REQUIRED_CONTENT_KEYS[msg_type]:
        if key not in content or not content[key]:
            return False
    if msg_type is MessageType.DIAGNOSIS:
        return _confidence_in_range(content["confidence"])
    return True


def validate_message(
    msg: MedicalMessage,
    now_ms: int,
    config: ValidationConfig = ValidationConfig(),
) -> ValidationVerdict:
    """Full validation: signature, then freshness, then content.

    The conjunction decides acceptance; the fixed order only makes the
    diagnostic reason deterministic when several checks would fail.
    """
    if not verify_signature(msg):
        return ValidationVerdict(ValidationReason.BAD_SIGNATURE)
    freshness = check_freshness(
        msg.timestamp_ms, now_ms, config.max_age_ms, config.future_skew_ms
    )
    if not freshness.accepted:
        return freshness
    if not validate_content(msg.msg_type, msg.content):
        return ValidationVerdict(ValidationReason.MALFORMED_CONTENT)
    return ValidationVerdict(ValidationReason.OK)
