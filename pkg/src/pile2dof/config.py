"""Flat JSON run configuration shared by every CLI command."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields, replace

from .beam import BeamSection, PileGeometry
from .errors import FormatError, Pile2dofError
from .fir import DEFAULT_TARGET_PERIOD, FirConfig, select_k
from .inclination import DEFAULT_CUTOFF_HZ, STANDARD_GRAVITY, InclinationConfig
from .synth import DEFAULT_FS, DEFAULT_LVDT_NOISE, DEFAULT_NOISE_SIGMA, DynamicSpec, TrainEventSpec


@dataclass(frozen=True)
class RunConfig:
    # geometry
    m: float = 0.447
    h: float | None = 0.447
    L: float | None = None
    E: float = 0.92e9
    I: float = 0.148 * 0.008**3 / 12.0
    # FIR
    k: int | None = None
    target_period: float = DEFAULT_TARGET_PERIOD
    lambda_override: float | None = None
    weighting: str = "identity"
    window_count: str = "2k+3"
    zero_dc: bool = True
    # inclination
    g: float = STANDARD_GRAVITY
    cutoff_hz: float = DEFAULT_CUTOFF_HZ
    # simulation
    sample_rate_hz: float = DEFAULT_FS
    noise_sigma: float = DEFAULT_NOISE_SIGMA
    lvdt_noise: float = DEFAULT_LVDT_NOISE
    dynamic_fraction: float = 0.1
    dynamic_f_min: float = 0.7
    dynamic_f_max: float = 3.0
    seed: int = 2021
    fixed_base: bool = False
    bottom_inertia: float = 0.0
    # behaviour
    strict_paper: bool = False
    jobs: int = 1
    out_dir: str = "."

    @classmethod
    def from_dict(cls, data: dict) -> RunConfig:
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise FormatError(f"unknown config keys: {', '.join(unknown)}", "io-cli")
        try:
            cfg = cls(**data)
            cfg.geometry()
            cfg.section()
            cfg.inclination()
        except TypeError as exc:
            raise FormatError(f"bad config: {exc}", "io-cli")
        except Pile2dofError as exc:
            raise FormatError(f"invalid config value: {exc}", "io-cli")
        return cfg

    @classmethod
    def load(cls, path=None, **overrides) -> RunConfig:
        data = {}
        if path is not None:
            try:
                with open(path) as fh:
                    data = json.load(fh)
            except OSError as exc:
                raise FormatError(f"cannot read config {path}: {exc}", "io-cli")
            except json.JSONDecodeError as exc:
                raise FormatError(f"config {path} is not valid JSON: {exc}", "io-cli")
            if not isinstance(data, dict):
                raise FormatError("config must be a JSON object", "io-cli")
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return asdict(self)

    def geometry(self) -> PileGeometry:
        return PileGeometry(m=self.m, h=self.h, L=self.L)

    def section(self) -> BeamSection:
        return BeamSection(E=self.E, I=self.I)

    def inclination(self) -> InclinationConfig:
        return InclinationConfig(g=self.g, cutoff_hz=self.cutoff_hz, centered=not self.strict_paper)

    def fir(self, dt: float) -> FirConfig:
        k = self.k if self.k is not None else select_k(dt, self.target_period)
        return FirConfig(
            k=k,
            dt=dt,
            lambda_override=self.lambda_override,
            weighting=self.weighting,
            target_period=self.target_period,
            window_count=self.window_count,
            zero_dc=self.zero_dc,
        )

    def apply_to_spec(self, spec: TrainEventSpec) -> TrainEventSpec:
        dynamic = DynamicSpec(
            f_min=self.dynamic_f_min,
            f_max=self.dynamic_f_max,
            fraction=self.dynamic_fraction,
            n_components=spec.dynamic.n_components,
        )
        return replace(spec, noise_sigma=self.noise_sigma, lvdt_noise=self.lvdt_noise, dynamic=dynamic)
