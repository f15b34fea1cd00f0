"""Run configuration and ensemble files (JSON)."""
from __future__ import annotations

import copy
import json
import os
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .ladder import DRIFT_TOLERANCES, N_MAX
from .propagator import EvolveParams, gaussian_ic, soliton_ic
from .separable import Ensemble
from .spectral import GridSpec, WaveField, normalize


class ConfigError(ValueError):
    """Invalid configuration or input file (CLI exit code 2)."""


DEFAULTS = {
    "grid": {"n_points": 512, "half_length": 20.0},
    "evolve": {"kappa": -1, "dt": 1e-3, "t_final": 1.0, "record_every": 100, "dt_max": 0.5},
    "ladder": {"n_max": 6},
    "initial": {"kind": "soliton", "params": {"eta": 1.0, "velocity": 0.0, "x0": 0.0}},
    "ensemble": [
        {"weight": 0.3, "kind": "gaussian", "params": {"center": -2.0, "width": 1.0, "velocity": 0.5}},
        {"weight": 0.7, "kind": "soliton", "params": {"eta": 0.5, "velocity": 0.0, "x0": 1.0}, "normalize": True},
    ],
    "hierarchy": {"orders": None, "n_max": 4, "j": 1, "k_extra": 0, "products": []},
    "oracle": {"n_points": None, "half_length": 6.0, "max_order": 3, "k": None},
    "tolerances": {"drift": [list(row) for row in DRIFT_TOLERANCES], "route_agreement": 1e-9, "oracle": 1e-8},
    "seed": 0,
    "output": {"dir": None, "formats": ["csv", "json"]},
}


def _merge(base: dict, extra: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in extra.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def apply_override(cfg: dict, assignment: str) -> dict:
    """``a.b.c=value``; value parsed as JSON, else kept as a string."""
    if "=" not in assignment:
        raise ConfigError(f"override {assignment!r} is not of the form key=value")
    path, raw = assignment.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    keys = path.strip().split(".")
    node = cfg
    for key in keys[:-1]:
        if not isinstance(node.get(key), dict):
            node[key] = {}
        node = node[key]
    node[keys[-1]] = value
    return cfg


@dataclass
class RunConfig:
    raw: dict
    base_dir: Path

    @classmethod
    def load(cls, path=None, overrides=()) -> RunConfig:
        data: dict = {}
        base_dir = Path.cwd()
        if path is not None:
            p = Path(path)
            if not p.is_file():
                raise ConfigError(f"config file not found: {p}")
            try:
                data = json.loads(p.read_text(encoding="utf-8") or "{}")
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config {p} is not valid JSON: {exc}") from None
            if not isinstance(data, dict):
                raise ConfigError("config must be a JSON object")
            base_dir = p.resolve().parent
        cfg = _merge(DEFAULTS, data)
        for item in overrides:
            apply_override(cfg, item)
        return cls(cfg, base_dir)

    def __getitem__(self, key):
        return self.raw[key]

    def grid(self) -> GridSpec:
        g = self.raw["grid"]
        try:
            return GridSpec(int(g["n_points"]), float(g["half_length"]))
        except (TypeError, ValueError, KeyError) as exc:
            raise ConfigError(f"bad grid: {exc}") from None

    def evolve_params(self) -> EvolveParams:
        e = self.raw["evolve"]
        try:
            return EvolveParams(kappa=int(e["kappa"]), dt=float(e["dt"]), t_final=float(e["t_final"]),
                                record_every=int(e["record_every"]), dt_max=float(e.get("dt_max", 0.01)))
        except (TypeError, ValueError, KeyError) as exc:
            raise ConfigError(f"bad evolve section: {exc}") from None

    def n_max(self) -> int:
        n = self.raw["ladder"]["n_max"]
        if not isinstance(n, int) or not 1 <= n <= N_MAX:
            raise ConfigError(f"ladder.n_max must be an integer in 1..{N_MAX}")
        return n

    def drift_policy(self):
        try:
            return tuple((int(lo), int(hi), float(tol)) for lo, hi, tol in self.raw["tolerances"]["drift"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad tolerances.drift: {exc}") from None

    def ensemble_entries(self) -> list:
        spec = self.raw["ensemble"]
        if isinstance(spec, str):
            return load_ensemble_entries(self.base_dir / spec, self.grid())
        if isinstance(spec, dict):
            return _entries_from_doc(spec, self.grid(), "inline ensemble")
        if isinstance(spec, list):
            return spec
        raise ConfigError("ensemble must be a file path, an object or a list of components")

    def output_dir(self):
        d = self.raw["output"].get("dir")
        return None if d is None else Path(d)

    def formats(self) -> set:
        fmts = set(self.raw["output"].get("formats") or [])
        if not fmts <= {"csv", "json"}:
            raise ConfigError(f"unknown output formats {sorted(fmts - {'csv', 'json'})}")
        return fmts


def threads() -> int:
    raw = os.environ.get("GPH_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _entries_from_doc(doc, grid: GridSpec, where) -> list:
    if isinstance(doc, dict):
        g = doc.get("grid")
        if g is not None and (int(g.get("n_points", -1)) != grid.n_points
                              or float(g.get("half_length", -1)) != grid.half_length):
            raise ConfigError(f"{where}: grid {g} does not match run grid {grid}")
        doc = doc.get("components")
    if not isinstance(doc, list) or not doc:
        raise ConfigError(f"{where}: expected a non-empty list of components")
    return doc


def load_ensemble_entries(path, grid: GridSpec) -> list:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"ensemble file not found: {p}")
    try:
        doc = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"ensemble file {p} is not valid JSON: {exc}") from None
    return _entries_from_doc(doc, grid, str(p))


def field_from_entry(entry: dict, grid: GridSpec) -> WaveField:
    """Build a component field from ``{kind, params | samples, normalize}``."""
    if not isinstance(entry, dict):
        raise ConfigError(f"component must be an object, got {entry!r}")
    kind = entry.get("kind")
    params = dict(entry.get("params") or {})
    try:
        if kind == "gaussian":
            f = gaussian_ic(grid, **params)
        elif kind == "soliton":
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                f = soliton_ic(grid, **params)
        elif kind == "samples":
            pairs = np.asarray(entry.get("samples"), dtype=float)
            if pairs.shape != (grid.n_points, 2):
                raise ConfigError(f"samples must be {grid.n_points} [re, im] pairs, got shape {pairs.shape}")
            f = WaveField(grid, pairs[:, 0] + 1j * pairs[:, 1])
        else:
            raise ConfigError(f"unknown component kind {kind!r}")
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad params for {kind}: {exc}") from None
    if entry.get("normalize", False):
        f = normalize(f)
    return f


def build_ensemble(entries, grid: GridSpec) -> Ensemble:
    comps = []
    for e in entries:
        if "weight" not in e:
            raise ConfigError("ensemble component missing 'weight'")
        comps.append((float(e["weight"]), field_from_entry(e, grid)))
    try:
        return Ensemble(tuple(comps))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def single_field(cfg: RunConfig) -> WaveField:
    """The one wavefunction of a ladder run: ``initial`` or a one-component ``ensemble``."""
    grid = cfg.grid()
    if cfg.raw["ensemble"] != DEFAULTS["ensemble"]:
        entries = cfg.ensemble_entries()
        if len(entries) != 1:
            raise ConfigError(f"ladder needs exactly one wavefunction, ensemble has {len(entries)}")
        return field_from_entry(entries[0], grid)
    return field_from_entry(cfg.raw["initial"], grid)
