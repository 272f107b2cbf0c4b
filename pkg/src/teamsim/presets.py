"""Named agent personas and config-file loading.

Personas are homogeneous team profiles. The built-in presets cover the
behavior families used throughout the analysis; a JSON config file can add
or override personas with the same field names as AgentProfile plus a
nested latency object.
"""
from __future__ import annotations

import json
import math

from .agents import AgentProfile, LatencyModel


def _heavy_tail_latency() -> LatencyModel:
    return LatencyModel(
        kind="heavytail",
        base=LatencyModel(kind="lognormal", location=math.log(2.0), scale=0.35),
        spike_prob=0.08,
        spike_magnitude=3.0,
        spike_alpha=3.0,
    )


PERSONAS: dict[str, AgentProfile] = {
    "ideal": AgentProfile(kind="ideal"),
    "chatty-idler": AgentProfile(kind="chatty-idler", chattiness=0.6),
    "greedy-claimer": AgentProfile(
        kind="greedy-claimer",
        chattiness=0.3,
        misreport_prob=0.1,
        run_tests_on_complete=True,
    ),
    "misreporter": AgentProfile(
        kind="misreporter",
        misreport_prob=0.1,
        run_tests_on_complete=True,
    ),
    "heavy-tail": AgentProfile(kind="ideal", latency=_heavy_tail_latency()),
}


def latency_from_dict(d: dict) -> LatencyModel:
    d = dict(d)
    if "base" in d and d["base"] is not None:
        d["base"] = latency_from_dict(d["base"])
    return LatencyModel(**d)


def profile_from_dict(d: dict) -> AgentProfile:
    d = dict(d)
    if "latency" in d and d["latency"] is not None:
        d["latency"] = latency_from_dict(d["latency"])
    return AgentProfile(**d)


def load_personas(path: str | None = None) -> dict[str, AgentProfile]:
    """Built-in personas, optionally extended/overridden by a JSON config."""
    personas = dict(PERSONAS)
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        for name, spec in doc.get("personas", doc).items():
            personas[name] = profile_from_dict(spec)
    return personas
