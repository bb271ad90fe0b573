"""Scenario configuration: flat ``section.key = value`` text or JSON.

Example::

    # two-layer run over a bump
    params.mu    = 0.04
    params.eps   = 0.2
    grid.n       = 512
    zeta.profile = gaussian
    zeta.amp     = 1.0

Every key is optional; unspecified keys take the defaults in ``KEYS``.
Environment variables ``BILAYER_GN_<SECTION>__<KEY>`` override file values
(``BILAYER_GN_PARAMS__MU=0.05`` sets ``params.mu``).
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .diagnostics import OrderConfig, Thresholds
from .errors import ParseError
from .fields import (
    Bathymetry,
    FlatProfile,
    GaussianProfile,
    Profile,
    SinusoidProfile,
    State,
    make_bathymetry,
    sample_profile,
)
from .grid import PeriodicGrid
from .regime import ModelCoefficients, RegimeBounds, RegimeParams, compute_coefficients

ENV_PREFIX = "BILAYER_GN_"

_PROFILE_NAMES = ("flat", "rest", "gaussian", "sinusoid")

# key -> (kind, default); ``None`` defaults are resolved against the grid length.
KEYS: dict[str, tuple[str, object]] = {
    "params.mu": ("float", 0.04),
    "params.eps": ("float", 0.2),
    "params.delta": ("float", 1.0),
    "params.gamma": ("float", 0.0),
    "params.beta": ("float", 0.2),
    "params.bo_inv": ("float", 0.0),
    "params.bo": ("float", None),
    "params.M": ("float", 1.0),
    "params.nu0": ("float", 1e-3),
    "bounds.mu_max": ("float", 1.0),
    "bounds.delta_min": ("float", 0.1),
    "bounds.delta_max": ("float", 10.0),
    "bounds.beta_max": ("float", 1.0),
    "bounds.bo_inv_max": ("float", 10.0),
    "grid.L": ("float", 20.0),
    "grid.n": ("int", 512),
    "bathymetry.profile": ("str", "gaussian"),
    "bathymetry.center": ("float", None),
    "bathymetry.width": ("float", None),
    "bathymetry.height": ("float", 0.5),
    "bathymetry.k": ("float", 1.0),
    "zeta.profile": ("str", "gaussian"),
    "zeta.amp": ("float", 1.0),
    "zeta.width": ("float", None),
    "zeta.center": ("float", None),
    "zeta.k": ("float", 1.0),
    "v.profile": ("str", "rest"),
    "v.amp": ("float", 0.0),
    "v.width": ("float", None),
    "v.center": ("float", None),
    "v.k": ("float", 1.0),
    "control.cfl": ("float", 0.5),
    "control.T": ("float", 1.0),
    "control.snapshot_stride": ("int", 10),
    "control.s_energy": ("float", 1.0),
    "control.lambda_cap": ("float", 10.0),
    "control.h01": ("float", 0.05),
    "control.h02": ("float", 0.05),
    "control.h03": ("float", 0.05),
    "control.seed": ("int", 0),
    "orders.expansion_ladder": ("floats", (0.2, 0.1, 0.05, 0.025)),
    "orders.expansion_n": ("int", 512),
    "orders.gamma": ("float", 0.5),
    "orders.delta": ("float", 1.5),
    "orders.form_ladder": ("ints", (128, 256, 512, 1024)),
    "orders.spatial_ladder": ("ints", (128, 256, 512, 1024)),
    "orders.temporal_n": ("int", 256),
    "orders.temporal_levels": ("int", 4),
}

_LOOKUP = {k.lower(): k for k in KEYS}


def _convert(key: str, raw, line: int | None):
    kind = KEYS[key][0]
    try:
        if kind == "float":
            return float(raw)
        if kind == "int":
            if isinstance(raw, float) and not raw.is_integer():
                raise ValueError(raw)
            return int(raw)
        if kind == "str":
            if not isinstance(raw, str):
                raise ValueError(raw)
            return raw.strip().lower()
        items = raw if isinstance(raw, (list, tuple)) else [s for s in str(raw).replace(",", " ").split() if s]
        conv = float if kind == "floats" else int
        return tuple(conv(s) for s in items)
    except (TypeError, ValueError):
        raise ParseError(f"cannot read {raw!r} as {kind} for {key}", line) from None


def _canonical(key: str, line: int | None) -> str:
    try:
        return _LOOKUP[key.strip().lower()]
    except KeyError:
        raise ParseError(f"unknown key {key!r}", line) from None


def parse_text(text: str) -> dict[str, object]:
    out: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if not key or not value:
            raise ParseError(f"empty key or value in {raw.strip()!r}", lineno)
        name = _canonical(key, lineno)
        out[name] = _convert(name, value, lineno)
    return out


def _flatten(obj, prefix=""):
    for k, val in obj.items():
        name = f"{prefix}.{k}" if prefix else str(k)
        if isinstance(val, dict):
            yield from _flatten(val, name)
        else:
            yield name, val


def parse_json(text: str) -> dict[str, object]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno) from None
    if not isinstance(data, dict):
        raise ParseError("top-level JSON value must be an object", 1)
    out = {}
    for key, val in _flatten(data):
        name = _canonical(key, None)
        out[name] = _convert(name, val, None)
    return out


def env_overrides(environ=None) -> dict[str, object]:
    environ = os.environ if environ is None else environ
    out = {}
    for var, val in environ.items():
        if not var.startswith(ENV_PREFIX):
            continue
        key = var[len(ENV_PREFIX):].replace("__", ".")
        try:
            name = _canonical(key, None)
        except ParseError:
            raise ParseError(f"environment variable {var} names unknown key {key.lower()!r}") from None
        out[name] = _convert(name, val, None)
    return out


def load_config(path, environ=None) -> dict[str, object]:
    text = Path(path).read_text()
    if str(path).endswith(".json") or text.lstrip().startswith("{"):
        values = parse_json(text)
    else:
        values = parse_text(text)
    values.update(env_overrides(environ))
    return values


# -- scenario -----------------------------------------------------------------

@dataclass(frozen=True)
class Control:
    cfl: float = 0.5
    T: float = 1.0
    snapshot_stride: int = 10
    s_energy: float = 1.0
    lambda_cap: float = 10.0
    thresholds: Thresholds = field(default_factory=Thresholds)


@dataclass(frozen=True)
class Scenario:
    params: RegimeParams
    grid: PeriodicGrid
    bathymetry_profile: Profile
    zeta_profile: Profile
    v_profile: Profile
    control: Control = field(default_factory=Control)
    orders: OrderConfig | None = None
    seed: int = 0

    def coefficients(self) -> ModelCoefficients:
        return compute_coefficients(self.params)

    def bathymetry(self) -> Bathymetry:
        return make_bathymetry(self.grid, self.bathymetry_profile)

    def initial_state(self) -> State:
        zeta = sample_profile(self.grid, self.zeta_profile)[0]
        v = sample_profile(self.grid, self.v_profile)[0]
        return State(0.0, zeta, v)

    @property
    def t_final(self) -> float:
        m = self.params.amplitude
        return self.control.T / m if m > 0 else self.control.T

    def with_grid(self, grid: PeriodicGrid) -> "Scenario":
        return replace(self, grid=grid)

    def order_config(self) -> OrderConfig:
        cfg = self.orders or OrderConfig()
        return replace(cfg, scenario=self, seed=self.seed, temporal_cfl=self.control.cfl)

    @classmethod
    def from_mapping(cls, values: dict[str, object]) -> "Scenario":
        unknown = set(values) - set(KEYS)
        if unknown:
            raise ParseError(f"unknown keys {sorted(unknown)}")
        cfg = {k: d for k, (_, d) in KEYS.items()}
        cfg.update(values)
        L = cfg["grid.L"]
        try:
            grid = PeriodicGrid(L, cfg["grid.n"])
        except ValueError as exc:
            raise ParseError(str(exc)) from None
        bo_inv = cfg["params.bo_inv"]
        if cfg["params.bo"] is not None:
            bo = cfg["params.bo"]
            if "params.bo_inv" in values:
                raise ParseError("give either params.bo or params.bo_inv, not both")
            if bo <= 0:
                raise ParseError(f"params.bo must be positive, got {bo}")
            bo_inv = 0.0 if math.isinf(bo) else 1.0 / bo
        bounds = RegimeBounds(
            mu_max=cfg["bounds.mu_max"],
            delta_min=cfg["bounds.delta_min"],
            delta_max=cfg["bounds.delta_max"],
            beta_max=cfg["bounds.beta_max"],
            bo_inv_max=cfg["bounds.bo_inv_max"],
        )
        params = RegimeParams(
            mu=cfg["params.mu"],
            eps=cfg["params.eps"],
            delta=cfg["params.delta"],
            gamma=cfg["params.gamma"],
            beta=cfg["params.beta"],
            bo_inv=bo_inv,
            M=cfg["params.M"],
            nu0=cfg["params.nu0"],
            bounds=bounds,
        )
        if not (params.mu > 0 and params.delta > 0):
            raise ParseError("params.mu and params.delta must be positive")
        control = Control(
            cfl=cfg["control.cfl"],
            T=cfg["control.T"],
            snapshot_stride=cfg["control.snapshot_stride"],
            s_energy=cfg["control.s_energy"],
            lambda_cap=cfg["control.lambda_cap"],
            thresholds=Thresholds(cfg["control.h01"], cfg["control.h02"], cfg["control.h03"]),
        )
        if not control.T > 0:
            raise ParseError(f"control.T must be positive, got {control.T}")
        if not 0 < control.cfl <= 1:
            raise ParseError(f"control.cfl must lie in (0, 1], got {control.cfl}")
        if control.snapshot_stride < 1:
            raise ParseError("control.snapshot_stride must be >= 1")
        if control.s_energy < 0:
            raise ParseError("control.s_energy must be >= 0")
        orders = OrderConfig(
            expansion_ladder=cfg["orders.expansion_ladder"],
            expansion_n=cfg["orders.expansion_n"],
            mu=params.mu,
            gamma=cfg["orders.gamma"],
            delta=cfg["orders.delta"],
            form_ladder=cfg["orders.form_ladder"],
            spatial_ladder=cfg["orders.spatial_ladder"],
            temporal_n=cfg["orders.temporal_n"],
            temporal_levels=cfg["orders.temporal_levels"],
        )
        return cls(
            params=params,
            grid=grid,
            bathymetry_profile=_profile(cfg, "bathymetry", L, default_center=0.7 * L),
            zeta_profile=_profile(cfg, "zeta", L),
            v_profile=_profile(cfg, "v", L),
            control=control,
            orders=orders,
            seed=cfg["control.seed"],
        )


def _profile(cfg, section: str, L: float, default_center: float | None = None) -> Profile:
    kind = cfg[f"{section}.profile"]
    amp_key = "bathymetry.height" if section == "bathymetry" else f"{section}.amp"
    amp = cfg[amp_key]
    if kind not in _PROFILE_NAMES:
        raise ParseError(f"{section}.profile must be one of {_PROFILE_NAMES}, got {kind!r}")
    if kind in ("flat", "rest"):
        return FlatProfile()
    if not np.isfinite(amp):
        raise ParseError(f"{amp_key} must be finite")
    if kind == "gaussian":
        center = cfg[f"{section}.center"]
        width = cfg[f"{section}.width"]
        center = (default_center if default_center is not None else L / 2) if center is None else center
        width = L / 20 if width is None else width
        if not width > 0:
            raise ParseError(f"{section}.width must be positive")
        return GaussianProfile(center=center, width=width, height=amp)
    return SinusoidProfile(k=cfg[f"{section}.k"], height=amp)


def load_scenario(path, environ=None) -> Scenario:
    return Scenario.from_mapping(load_config(path, environ))


def default_scenario(**overrides) -> Scenario:
    """The Gaussian scenario (interface bump over a bottom bump) with optional dotted-key overrides."""
    values = {}
    for key, val in overrides.items():
        name = _canonical(key.replace("__", "."), None)
        values[name] = _convert(name, val, None)
    return Scenario.from_mapping(values)
