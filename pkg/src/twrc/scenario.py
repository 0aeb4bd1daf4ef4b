"""JSON scenario files: a channel configuration plus sweep settings.

Grids may be written as explicit lists or as ``{"start", "stop", "num"}``
objects expanded with ``numpy.linspace``. SNR values are in dB here and
nowhere else; :meth:`ScenarioFile.channel` converts them once.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

import jsonschema
import numpy as np

from twrc.channel import ChannelConfig, Mode
from twrc.errors import DomainError

_GRID = {
    "oneOf": [
        {"type": "array", "items": {"type": "number"}},
        {
            "type": "object",
            "properties": {
                "start": {"type": "number"},
                "stop": {"type": "number"},
                "num": {"type": "integer", "minimum": 0},
            },
            "required": ["start", "stop", "num"],
            "additionalProperties": False,
        },
    ]
}

SCHEMA = {
    "type": "object",
    "properties": {
        "omega1": {"type": "number", "exclusiveMinimum": 0},
        "omega2": {"type": "number", "exclusiveMinimum": 0},
        "total_power": {"type": "number", "exclusiveMinimum": 0},
        "snr_db": {"type": "number"},
        "relay_power": {"type": "number", "exclusiveMinimum": 0},
        "p1": {"type": "number", "minimum": 0},
        "p2": {"type": "number", "minimum": 0},
        "mode": {"enum": [m.value for m in Mode]},
        "rate_grid": _GRID,
        "snr_grid_db": _GRID,
        "sum_rates": _GRID,
        "plane": {
            "type": "object",
            "properties": {"r1": _GRID, "r2": _GRID},
            "required": ["r1", "r2"],
            "additionalProperties": False,
        },
        "samples": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0},
        "tol": {"type": "number", "exclusiveMinimum": 0},
    },
    "additionalProperties": False,
}


def expand_grid(spec) -> tuple[float, ...]:
    if isinstance(spec, dict):
        return tuple(float(x) for x in np.linspace(spec["start"], spec["stop"], spec["num"]))
    return tuple(float(x) for x in spec)


@dataclass(frozen=True)
class ScenarioFile:
    omega1: float = 0.5
    omega2: float = 2.0
    total_power: float = 1.0
    snr_db: float = 20.0
    relay_power: Optional[float] = None
    p1: Optional[float] = None
    p2: Optional[float] = None
    mode: Mode = Mode.TWO_WAY
    rate_grid: tuple[float, ...] = ()
    snr_grid_db: tuple[float, ...] = ()
    sum_rates: tuple[float, ...] = ()
    plane_r1: tuple[float, ...] = ()
    plane_r2: tuple[float, ...] = ()
    samples: int = 100_000
    seed: int = 0
    tol: float = 1e-5

    @classmethod
    def from_dict(cls, doc: dict) -> "ScenarioFile":
        try:
            jsonschema.validate(doc, SCHEMA)
        except jsonschema.ValidationError as exc:
            raise DomainError(f"invalid scenario: {exc.message}") from None
        kw = {k: v for k, v in doc.items() if k not in ("plane", "mode")}
        for key in ("rate_grid", "snr_grid_db", "sum_rates"):
            if key in kw:
                kw[key] = expand_grid(kw[key])
        if "plane" in doc:
            kw["plane_r1"] = expand_grid(doc["plane"]["r1"])
            kw["plane_r2"] = expand_grid(doc["plane"]["r2"])
        if "mode" in doc:
            kw["mode"] = Mode(doc["mode"])
        return cls(**kw)

    @classmethod
    def load(cls, path: str | Path) -> "ScenarioFile":
        with open(path, encoding="utf-8") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise DomainError(f"{path}: not valid JSON ({exc})") from None
        return cls.from_dict(doc)

    def channel(self, snr_db: Optional[float] = None, mode: Optional[Mode] = None) -> ChannelConfig:
        return ChannelConfig.from_snr_db(
            self.snr_db if snr_db is None else snr_db,
            omega1=self.omega1,
            omega2=self.omega2,
            P=self.total_power,
            pR=self.relay_power,
            p1=self.p1,
            p2=self.p2,
            mode=self.mode if mode is None else Mode(mode),
        )

    def updated(self, **changes) -> "ScenarioFile":
        return replace(self, **{k: v for k, v in changes.items() if v is not None})
