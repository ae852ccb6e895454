import pytest

from medgossip.messages import MedicalMessage, MessageType


@pytest.fixture
def patient_msg() -> MedicalMessage:
    return MedicalMessage.signed(
        msg_id="msg-001",
        msg_type=MessageType.PATIENT_DATA,
        content={"patient_id": "P1", "data_type": "heart_rate", "value": "72"},
        timestamp_ms=1000,
        sender="agent-1",
    )


@pytest.fixture
def diagnosis_msg() -> MedicalMessage:
    return MedicalMessage.signed(
        msg_id="msg-002",
        msg_type=MessageType.DIAGNOSIS,
        content={
            "patient_id": "P2",
            "diagnosis": "pneumonia",
            "confidence": "0.85",
            "doctor_id": "D01",
        },
        timestamp_ms=2000,
        sender="agent-2",
    )
