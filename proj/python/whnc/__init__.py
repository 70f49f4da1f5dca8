"""Worst-case delay bounds for wormhole networks-on-chip with finite buffers."""

import json

from ._core import (
    ArrivalCurve,
    CycleError,
    DomainError,
    Error,
    FlowResult,
    InstabilityError,
    InvalidArgument,
    Network,
    ParseError,
    ServiceCurve,
    SimReport,
    analyze,
    convolve,
    deconvolve,
    delay_shift,
    hdev,
    hops,
    residual_blind,
    run_cli,
    simulate,
    validate,
    vdev,
)
from ._core import blocking_json as _blocking_json


def blocking(network, mode="buffer-aware"):
    """Direct and indirect blocking sets per flow, as plain dicts."""
    return json.loads(_blocking_json(network, mode))


__all__ = [
    "ArrivalCurve",
    "CycleError",
    "DomainError",
    "Error",
    "FlowResult",
    "InstabilityError",
    "InvalidArgument",
    "Network",
    "ParseError",
    "ServiceCurve",
    "SimReport",
    "analyze",
    "blocking",
    "convolve",
    "deconvolve",
    "delay_shift",
    "hdev",
    "hops",
    "residual_blind",
    "run_cli",
    "simulate",
    "validate",
    "vdev",
]
