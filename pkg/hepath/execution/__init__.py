"""
Two-party execution: wire format, subprotocols, encrypted geometry and sessions.
"""

from .wire import ChannelClosedError, CountedChannel, MessageTag, ProtocolError
from .subprotocols import ProtocolCtx, secure_equal, secure_leq, secure_mult, secure_sign, serve_requests
from .enc_geometry import compare_paths, enc_intersect, enc_on_segment, enc_orientation, encrypt_path
from .session import AliceSession, BobSession, Metrics, run_alice, run_bob, run_loopback, run_role_swap
from .flight import FlightConfig, flight_sim
from .probe import ProbeConfig, brute_force_probe

__all__ = [
    "ChannelClosedError",
    "CountedChannel",
    "MessageTag",
    "ProtocolError",
    "ProtocolCtx",
    "secure_equal",
    "secure_leq",
    "secure_mult",
    "secure_sign",
    "serve_requests",
    "compare_paths",
    "enc_intersect",
    "enc_on_segment",
    "enc_orientation",
    "encrypt_path",
    "AliceSession",
    "BobSession",
    "Metrics",
    "run_alice",
    "run_bob",
    "run_loopback",
    "run_role_swap",
    "FlightConfig",
    "flight_sim",
    "ProbeConfig",
    "brute_force_probe",
]
