from .messages import FORWARDING_TYPES, Message, MsgType, SeenSet, forwards
from .codec import (
    FRAME_HEADER_LEN,
    PROTOCOL_VERSION,
    decode,
    decode_params_payload,
    encode,
    encode_params_payload,
)
from .flooding import on_receive
from .heartbeat import LinkState, PeerLink, heartbeat_tick, note_beat
from .transport import InProcHub, TcpEndpoint, TrafficCounters

__all__ = [
    "FORWARDING_TYPES",
    "FRAME_HEADER_LEN",
    "InProcHub",
    "LinkState",
    "Message",
    "MsgType",
    "PROTOCOL_VERSION",
    "PeerLink",
    "SeenSet",
    "TcpEndpoint",
    "TrafficCounters",
    "decode",
    "decode_params_payload",
    "encode",
    "encode_params_payload",
    "forwards",
    "heartbeat_tick",
    "note_beat",
    "on_receive",
]
