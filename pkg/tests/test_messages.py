"""Message model tests: canonical bytes, signatures, freshness, content rules.

Golden digests were computed with coreutils sha256sum over the literal
canonical strings, independently of this codebase.
"""

import dataclasses

import pytest
from hypothesis import given, strategies as st

from medgossip.messages import (
    MedicalMessage,
    MessageType,
    ValidationConfig,
    ValidationReason,
    canonical_bytes,
    check_freshness,
    compute_signature,
    validate_content,
    validate_message,
    verify_signature,
)

# sha256sum of "msg-001|PATIENT_DATA|data_type=heart_rate;patient_id=P1;value=72|1000|agent-1"
GOLDEN_DIGEST = "2aa98ed551c712dee59f5bcf7b4e7265c8c28e96daef573d4cb94d3b99fa2289"
# same string with timestamp 1001
GOLDEN_DIGEST_TS1001 = "b200a023365c1f53968d5ce893952dfeff8895e9f31c6aa9733d3e258d791aa9"
# sha256sum of "msg-001|PATIENT_DATA||1000|agent-1"
GOLDEN_DIGEST_EMPTY = "1178d0885527e9a3f95ff409e0a33093af73b996eb3b9f242e99416654e36b46"

PATIENT_CONTENT = {"patient_id": "P1", "data_type": "heart_rate", "value": "72"}


class TestCanonicalBytes:
    def test_rendering(self):
        data = canonical_bytes(
            "msg-001", MessageType.PATIENT_DATA, PATIENT_CONTENT, 1000, "agent-1"
        )
        assert data == b"msg-001|PATIENT_DATA|data_type=heart_rate;patient_id=P1;value=72|1000|agent-1"

    def test_empty_content_leaves_empty_segment(self):
        data = canonical_bytes("msg-001", MessageType.PATIENT_DATA, {}, 1000, "agent-1")
        assert data == b"msg-001|PATIENT_DATA||1000|agent-1"

    def test_insertion_order_is_irrelevant(self):
        forward = {"a": "1", "b": "2", "c": "3"}
        backward = {"c": "3", "b": "2", "a": "1"}
        args = ("m", MessageType.DIAGNOSIS, 5, "s")
        assert canonical_bytes(args[0], args[1], forward, args[2], args[3]) == \
            canonical_bytes(args[0], args[1], backward, args[2], args[3])

    def test_zero_timestamp_renders_without_padding(self):
        assert canonical_bytes("m", MessageType.DIAGNOSIS, {}, 0, "s").endswith(b"|0|s")

    @pytest.mark.parametrize("bad", ["a=b", "a;b", "a|b"])
    def test_delimiters_rejected_in_content(self, bad):
        with pytest.raises(ValueError):
            canonical_bytes("m", MessageType.DIAGNOSIS, {bad: "v"}, 1, "s")
        with pytest.raises(ValueError):
            canonical_bytes("m", MessageType.DIAGNOSIS, {"k": bad}, 1, "s")

    def test_pipe_rejected_in_id_and_sender(self):
        with pytest.raises(ValueError):
            canonical_bytes("m|x", MessageType.DIAGNOSIS, {}, 1, "s")
        with pytest.raises(ValueError):
            canonical_bytes("m", MessageType.DIAGNOSIS, {}, 1, "s|x")


class TestSignatures:
    def test_golden_digest(self):
        sig = compute_signature(
            "msg-001", MessageType.PATIENT_DATA, PATIENT_CONTENT, 1000, "agent-1"
        )
        assert sig == GOLDEN_DIGEST

    def test_golden_digest_empty_content(self):
        sig = compute_signature("msg-001", MessageType.PATIENT_DATA, {}, 1000, "agent-1")
        assert sig == GOLDEN_DIGEST_EMPTY

    def test_timestamp_change_changes_digest(self):
        sig = compute_signature(
            "msg-001", MessageType.PATIENT_DATA, PATIENT_CONTENT, 1001, "agent-1"
        )
        assert sig == GOLDEN_DIGEST_TS1001
        assert sig != GOLDEN_DIGEST

    def test_deterministic(self):
        args = ("m", MessageType.EMERGENCY_ALERT, {"k": "v"}, 7, "s")
        assert compute_signature(*args) == compute_signature(*args)

    def test_honest_message_verifies(self, patient_msg):
        assert verify_signature(patient_msg)
        assert patient_msg.signature == GOLDEN_DIGEST

    def test_tampered_content_fails(self, patient_msg):
        tampered = dataclasses.replace(
            patient_msg, content={**patient_msg.content, "value": "73"}
        )
        assert not verify_signature(tampered)

    def test_flipped_signature_character_fails(self, patient_msg):
        sig = patient_msg.signature
        flipped = ("0" if sig[0] != "0" else "1") + sig[1:]
        assert not verify_signature(dataclasses.replace(patient_msg, signature=flipped))

    def test_hop_count_not_signed(self, patient_msg):
        assert verify_signature(patient_msg.next_hop())
        assert patient_msg.next_hop().hop_count == 1


class TestMessageConstruction:
    def test_unknown_type_name_fails(self):
        with pytest.raises(ValueError):
            MessageType.parse("LAB_RESULT")
        assert MessageType.parse("DIAGNOSIS") is MessageType.DIAGNOSIS

    def test_empty_id_rejected(self):
        with pytest.raises(ValueError):
            MedicalMessage.signed("", MessageType.DIAGNOSIS, {}, 1, "s")

    def test_negative_timestamp_rejected(self):
        with pytest.raises(ValueError):
            MedicalMessage.signed("m", MessageType.DIAGNOSIS, {}, -1, "s")

    def test_malformed_signature_rejected(self, patient_msg):
        with pytest.raises(ValueError):
            dataclasses.replace(patient_msg, signature="ABC")


class TestFreshness:
    def test_age_just_inside_window(self):
        verdict = check_freshness(1000, 300_999, max_age_ms=300_000)
        assert verdict.accepted

    def test_age_exactly_at_window_is_stale(self):
        verdict = check_freshness(1000, 301_000, max_age_ms=300_000)
        assert verdict.reason is ValidationReason.STALE_TIMESTAMP

    def test_future_timestamp_rejected(self):
        verdict = check_freshness(5000, 4000, future_skew_ms=0)
        assert verdict.reason is ValidationReason.FUTURE_TIMESTAMP

    def test_future_within_skew_accepted(self):
        assert check_freshness(5000, 4000, future_skew_ms=1000).accepted


class TestContentRules:
    def test_diagnosis_ok(self, diagnosis_msg):
        assert validate_content(MessageType.DIAGNOSIS, diagnosis_msg.content)

    @pytest.mark.parametrize("confidence,ok", [
        ("0", True),
        ("1", True),
        ("0.85", True),
        ("1.2", False),
        ("-0.1", False),
        ("high", False),
        ("", False),
    ])
    def test_diagnosis_confidence_bounds(self, confidence, ok):
        content = {
            "patient_id": "P1",
            "diagnosis": "flu",
            "confidence": confidence,
            "doctor_id": "D01",
        }
        assert validate_content(MessageType.DIAGNOSIS, content) is ok

    def test_patient_data_missing_value(self):
        content = {"patient_id": "P1", "data_type": "heart_rate"}
        assert not validate_content(MessageType.PATIENT_DATA, content)

    def test_required_value_must_be_non_empty(self):
        content = {"patient_id": "P1", "data_type": "", "value": "72"}
        assert not validate_content(MessageType.PATIENT_DATA, content)

    def test_extra_keys_allowed(self):
        content = {**PATIENT_CONTENT, "unit": "bpm"}
        assert validate_content(MessageType.PATIENT_DATA, content)

    def test_treatment_and_alert_required_sets(self):
        assert validate_content(
            MessageType.TREATMENT_PLAN,
            {"patient_id": "P1", "treatment": "x", "duration": "7d", "doctor_id": "D01"},
        )
        assert not validate_content(
            MessageType.EMERGENCY_ALERT,
            {"patient_id": "P1", "alert_type": "stroke", "severity": "high"},
        )


class TestValidateMessage:
    def test_valid_message_at_small_age(self, diagnosis_msg):
        verdict = validate_message(diagnosis_msg, diagnosis_msg.timestamp_ms + 10_000)
        assert verdict.accepted and verdict.reason is ValidationReason.OK

    def test_signature_check_first(self, diagnosis_msg):
        # tampered content AND stale: the signature failure must win
        tampered = dataclasses.replace(
            diagnosis_msg, content={**diagnosis_msg.content, "confidence": "0.1"}
        )
        verdict = validate_message(tampered, tampered.timestamp_ms + 400_000)
        assert verdict.reason is ValidationReason.BAD_SIGNATURE

    def test_stale_after_window(self, diagnosis_msg):
        verdict = validate_message(diagnosis_msg, diagnosis_msg.timestamp_ms + 400_000)
        assert verdict.reason is ValidationReason.STALE_TIMESTAMP

    def test_custom_config_widens_window(self, diagnosis_msg):
        config = ValidationConfig(max_age_ms=500_000)
        verdict = validate_message(diagnosis_msg, diagnosis_msg.timestamp_ms + 400_000, config)
        assert verdict.accepted


# -- property tests ----------------------------------------------------------

_SAFE = st.text(
    alphabet="abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_.-",
    min_size=1,
    max_size=12,
)
_CONTENT = st.dictionaries(_SAFE, _SAFE, max_size=4)
_TYPES = st.sampled_from(list(MessageType))


@st.composite
def _messages(draw):
    return MedicalMessage.signed(
        msg_id=draw(_SAFE),
        msg_type=draw(_TYPES),
        content=draw(_CONTENT),
        timestamp_ms=draw(st.integers(min_value=0, max_value=10**9)),
        sender=draw(_SAFE),
        hop_count=draw(st.integers(min_value=0, max_value=5)),
    )


@given(_messages())
def test_honest_messages_always_verify(msg):
    assert verify_signature(msg)


@given(_messages(), st.sampled_from(["id", "msg_type", "content", "timestamp_ms", "sender"]))
def test_any_single_field_mutation_breaks_verification(msg, field_name):
    if field_name == "id":
        mutated = dataclasses.replace(msg, id=msg.id + "x")
    elif field_name == "msg_type":
        others = [t for t in MessageType if t is not msg.msg_type]
        mutated = dataclasses.replace(msg, msg_type=others[0])
    elif field_name == "content":
        # "!" is outside the generation alphabet, so this key is always new
        mutated = dataclasses.replace(msg, content={**msg.content, "mutated!": "yes"})
    elif field_name == "timestamp_ms":
        mutated = dataclasses.replace(msg, timestamp_ms=msg.timestamp_ms + 1)
    else:
        mutated = dataclasses.replace(msg, sender=msg.sender + "x")
    assert not verify_signature(mutated)


@given(_messages(), st.integers(min_value=0, max_value=10))
def test_hop_count_never_affects_signature_or_verdict(msg, hops):
    rehopped = dataclasses.replace(msg, hop_count=hops)
    assert verify_signature(rehopped)
    now = msg.timestamp_ms + 1
    assert validate_message(rehopped, now) == validate_message(msg, now)


@given(
    st.tuples(_SAFE, _TYPES, _CONTENT, st.integers(min_value=0, max_value=10**9), _SAFE),
    st.tuples(_SAFE, _TYPES, _CONTENT, st.integers(min_value=0, max_value=10**9), _SAFE),
)
def test_canonical_bytes_injective(fields_a, fields_b):
    if fields_a == fields_b:
        assert canonical_bytes(*fields_a) == canonical_bytes(*fields_b)
    else:
        assert canonical_bytes(*fields_a) != canonical_bytes(*fields_b)


@given(_messages(), st.integers(min_value=0, max_value=2 * 10**9))
def test_verdict_matches_conjunction_of_stages(msg, now):
    verdict = validate_message(msg, now)
    conjunction = (
        verify_signature(msg)
        and check_freshness(msg.timestamp_ms, now).accepted
        and validate_content(msg.msg_type, msg.content)
    )
    assert verdict.accepted == conjunction
