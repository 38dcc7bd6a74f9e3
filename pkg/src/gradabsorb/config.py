"""Run configuration: JSON schema, validation, content hash, and assembly
of the objects a run needs (params, grid, initial data, control).

Schema (all keys except "initial" extras are required):

    {
      "params":  {"p": 3.0, "q": 1.5, "dim": 1},
      "grid":    {"extent": 4.0, "cells": 1024},
      "initial": {"kind": "cap", "amplitude": 1.0, "radius": 1.0,
                  "power": 2.0},            # or powerdist/plateau/file
      "mode":    "original",                # rescaled | hj-only | plap-only
      "control": {"t_end": 1000.0, ...},    # StepControl fields
      "t_start": 0.0
    }

Everything is deterministic; there is no seed anywhere.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field as dc_field

from .errors import ValidationError
from .grid import Field, Grid, initial_bump
from .params import Params
from .stepper import MODES, StepControl

__all__ = ["RunConfig", "canonical_json", "config_hash"]


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def config_hash(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()


_INITIAL_KINDS = ("cap", "powerdist", "plateau", "file")


@dataclass(frozen=True)
class RunConfig:
    params: Params
    grid: Grid
    initial: dict
    mode: str
    control: StepControl
    t_start: float = 0.0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValidationError(f"mode must be one of {MODES} (got {self.mode!r})")
        kind = self.initial.get("kind")
        if kind not in _INITIAL_KINDS:
            raise ValidationError(
                f"initial.kind must be one of {_INITIAL_KINDS} (got {kind!r})")
        if self.params.dim != self.grid.dim:
            raise ValidationError("params.dim and grid dimension disagree")

    def build_initial(self) -> Field:
        spec = dict(self.initial)
        kind = spec.pop("kind")
        if kind == "file":
            from .io import read_field_bin, read_field_csv

            path = spec.get("path")
            if path is None:
                raise ValidationError("initial.kind='file' needs a 'path'")
            f = read_field_bin(path) if str(path).endswith(".bin") else read_field_csv(path)
            if f.grid != self.grid:
                raise ValidationError("field file grid does not match the config grid")
            return f
        if "center" in spec and spec["center"] is not None:
            spec["center"] = tuple(spec["center"])
        return initial_bump(self.grid, kind, **spec)

    def to_json(self) -> dict:
        out = {
            "params": self.params.to_json(),
            "grid": self.grid.to_json(),
            "initial": dict(self.initial),
            "mode": self.mode,
            "control": self.control.to_json(),
            "t_start": self.t_start,
        }
        return out

    def hash(self) -> str:
        return config_hash(self.to_json())

    @staticmethod
    def from_json(obj: dict) -> "RunConfig":
        try:
            params = Params.from_json(obj["params"])
            gspec = obj["grid"]
            grid = Grid(dim=params.dim, extent=float(gspec["extent"]),
                        cells=int(gspec["cells"]))
            control = StepControl.from_json(obj["control"])
            return RunConfig(
                params=params, grid=grid, initial=dict(obj["initial"]),
                mode=str(obj["mode"]), control=control,
                t_start=float(obj.get("t_start", 0.0)),
            )
        except KeyError as exc:
            raise ValidationError(f"run config missing key {exc}") from exc
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ValidationError(f"malformed run config: {exc}") from exc

    def run(self):
        from .stepper import run

        return run(self.params, self.grid, self.build_initial(), self.mode,
                   self.control, t_start=self.t_start, config_hash=self.hash())
