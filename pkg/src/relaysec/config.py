"""Strict JSON run-configuration parsing.

The document is a single JSON object; unknown keys anywhere are errors so
a config reproduces exactly one run. Schema (see README for the prose
version):

    {
      "scenario": {
        "protocol": "Direct|DF|AF|DBJ",
        "k_relays": int,
        "rho_db": float,
        "rate_bpcu": float,
        "alpha": float,                  # optional, default 1.0
        "n_packets": int,                # even, >= 2
        "receiver_model": "BasicARQ|HARQ",        # optional
        "collusion_model": "PerSlotMax|Accumulate",  # optional
        "geometry": {
          "relay_fractions": [float, ...],   # length K or 1 (broadcast)
          "path_loss_exponent": float,       # optional, default 4.0
          "direct_link": bool                # optional, default by protocol
        }
      },
      "sweep": {                         # optional, grid axes
        "protocol": [...], "k_relays": [...], "n_packets": [...],
        "relay_fraction": [...], "alpha": [...],
        "receiver_model": [...], "collusion_model": [...]
      },
      "trials": int, "seed": int, "workers": int,
      "output": {"path": str, "format": "csv|json"}   # optional
    }
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

from .channel import (
    CollusionModel,
    Geometry,
    Protocol,
    ReceiverModel,
    Scenario,
)
from .simulator import SweepAxes

__all__ = ["ConfigError", "RunConfig", "load_config", "parse_config"]


class ConfigError(ValueError):
    """Malformed or invalid run configuration."""


@dataclass(frozen=True)
class RunConfig:
    scenario: Scenario
    sweep_axes: Optional[SweepAxes]
    trials: int
    seed: int
    workers: int
    output_path: Optional[str]
    output_format: str


def _require_keys(obj: dict, allowed: set[str], where: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")


def _get(obj: dict, key: str, kind, where: str, default=None, required=False):
    if key not in obj:
        if required:
            raise ConfigError(f"missing required key '{key}' in {where}")
        return default
    val = obj[key]
    if kind is float and isinstance(val, int) and not isinstance(val, bool):
        val = float(val)
    if kind is int and isinstance(val, bool):
        raise ConfigError(f"'{key}' in {where} must be {kind.__name__}")
    if not isinstance(val, kind):
        raise ConfigError(f"'{key}' in {where} must be {kind.__name__}")
    return val


def _enum(cls, raw: str, where: str):
    try:
        return cls(raw)
    except ValueError:
        choices = ", ".join(e.value for e in cls)
        raise ConfigError(f"{where}: '{raw}' is not one of {choices}") from None


def _parse_geometry(obj: Any, k_relays: int, protocol: Protocol) -> Geometry:
    if not isinstance(obj, dict):
        raise ConfigError("'geometry' must be an object")
    _require_keys(
        obj, {"relay_fractions", "path_loss_exponent", "direct_link"}, "geometry"
    )
    fracs = obj.get("relay_fractions")
    if not isinstance(fracs, list) or not all(
        isinstance(f, (int, float)) and not isinstance(f, bool) for f in fracs
    ):
        raise ConfigError("'relay_fractions' must be a list of numbers")
    fracs = [float(f) for f in fracs]
    if len(fracs) == 1:
        fracs = fracs * k_relays
    if len(fracs) != k_relays:
        raise ConfigError(
            f"'relay_fractions' must have length {k_relays} (or 1 to broadcast)"
        )
    eta = _get(obj, "path_loss_exponent", float, "geometry", default=4.0)
    direct = _get(
        obj, "direct_link", bool, "geometry", default=(protocol is not Protocol.DBJ)
    )
    try:
        return Geometry(
            relay_fractions=tuple(fracs),
            path_loss_exponent=eta,
            direct_link_present=direct,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _parse_scenario(obj: Any) -> Scenario:
    if not isinstance(obj, dict):
        raise ConfigError("'scenario' must be an object")
    _require_keys(
        obj,
        {
            "protocol",
            "k_relays",
            "rho_db",
            "rate_bpcu",
            "alpha",
            "n_packets",
            "receiver_model",
            "collusion_model",
            "geometry",
        },
        "scenario",
    )
    protocol = _enum(
        Protocol, _get(obj, "protocol", str, "scenario", required=True), "protocol"
    )
    k_relays = _get(obj, "k_relays", int, "scenario", required=True)
    geometry = _parse_geometry(obj.get("geometry"), k_relays, protocol)
    try:
        return Scenario(
            protocol=protocol,
            k_relays=k_relays,
            rho_db=_get(obj, "rho_db", float, "scenario", required=True),
            rate_bpcu=_get(obj, "rate_bpcu", float, "scenario", required=True),
            geometry=geometry,
            alpha=_get(obj, "alpha", float, "scenario", default=1.0),
            receiver_model=_enum(
                ReceiverModel,
                _get(obj, "receiver_model", str, "scenario", default="BasicARQ"),
                "receiver_model",
            ),
            collusion_model=_enum(
                CollusionModel,
                _get(obj, "collusion_model", str, "scenario", default="PerSlotMax"),
                "collusion_model",
            ),
            n_packets=_get(obj, "n_packets", int, "scenario", default=2),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _parse_sweep(obj: Any) -> SweepAxes:
    if not isinstance(obj, dict):
        raise ConfigError("'sweep' must be an object")
    allowed = {
        "protocol",
        "k_relays",
        "n_packets",
        "relay_fraction",
        "alpha",
        "receiver_model",
        "collusion_model",
    }
    _require_keys(obj, allowed, "sweep")
    for key, val in obj.items():
        if not isinstance(val, list) or not val:
            raise ConfigError(f"sweep axis '{key}' must be a nonempty list")
    kw = {}
    if "protocol" in obj:
        kw["protocol"] = [_enum(Protocol, p, "sweep.protocol") for p in obj["protocol"]]
    if "k_relays" in obj:
        kw["k_relays"] = [int(v) for v in obj["k_relays"]]
    if "n_packets" in obj:
        kw["n_packets"] = [int(v) for v in obj["n_packets"]]
    if "relay_fraction" in obj:
        kw["relay_fraction"] = [float(v) for v in obj["relay_fraction"]]
    if "alpha" in obj:
        kw["alpha"] = [float(v) for v in obj["alpha"]]
    if "receiver_model" in obj:
        kw["receiver_model"] = [
            _enum(ReceiverModel, v, "sweep.receiver_model") for v in obj["receiver_model"]
        ]
    if "collusion_model" in obj:
        kw["collusion_model"] = [
            _enum(CollusionModel, v, "sweep.collusion_model")
            for v in obj["collusion_model"]
        ]
    return SweepAxes(**kw)


def parse_config(doc: Any) -> RunConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a JSON object")
    _require_keys(
        doc, {"scenario", "sweep", "trials", "seed", "workers", "output"}, "config"
    )
    scenario = _parse_scenario(doc.get("scenario"))
    sweep_axes = _parse_sweep(doc["sweep"]) if "sweep" in doc else None
    trials = _get(doc, "trials", int, "config", default=100_000)
    if trials < 1:
        raise ConfigError("'trials' must be >= 1")
    seed = _get(doc, "seed", int, "config", default=0)
    if not (0 <= seed < 2**64):
        raise ConfigError("'seed' must fit in 64 bits")
    workers = _get(doc, "workers", int, "config", default=1)
    if workers < 1:
        raise ConfigError("'workers' must be >= 1")
    out_path = None
    out_format = "csv"
    if "output" in doc:
        out = doc["output"]
        if not isinstance(out, dict):
            raise ConfigError("'output' must be an object")
        _require_keys(out, {"path", "format"}, "output")
        out_path = _get(out, "path", str, "output")
        out_format = _get(out, "format", str, "output", default="csv")
        if out_format not in ("csv", "json"):
            raise ConfigError("'output.format' must be 'csv' or 'json'")
    return RunConfig(
        scenario=scenario,
        sweep_axes=sweep_axes,
        trials=trials,
        seed=seed,
        workers=workers,
        output_path=out_path,
        output_format=out_format,
    )


def load_config(path: str | Path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return parse_config(doc)
