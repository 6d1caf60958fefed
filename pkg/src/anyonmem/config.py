"""Experiment configuration: one JSON document, schema-checked, hashable.

A config fully determines an experiment (kind, sizes, interaction, bath,
ensemble statistics, sampling, seed, decoder mode), so that re-running the
same config and seed reproduces output files bit-for-bit. CLI flags can
override individual fields with dotted paths (e.g. ``bath.T=0.25``).
"""

from __future__ import annotations

import copy
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .bath import Bath, ExplicitRatesBath, SpinBosonBath, balanced_explicit_bath
from .energy import InteractionError, InteractionSpec

EXPERIMENT_KINDS = (
    "simulate", "threshold", "lifetime-scan", "equilibrium",
    "nonsplit-pair", "single-pair", "analytics", "cavity",
)


class ConfigError(ValueError):
    """Invalid or inconsistent experiment configuration."""


@dataclass
class ExperimentConfig:
    experiment: str
    sizes: list[int] = field(default_factory=lambda: [16])
    interaction: dict = field(default_factory=dict)
    bath: dict = field(default_factory=dict)
    T: float | None = None
    runs: int = 1000
    t_max: float = 10.0
    sampling: dict = field(default_factory=dict)
    seed: int = 1
    decoder: dict = field(default_factory=dict)
    threshold: dict = field(default_factory=dict)
    lifetime: dict = field(default_factory=dict)
    equilibrium: dict = field(default_factory=dict)
    nonsplit: dict = field(default_factory=dict)
    single_pair: dict = field(default_factory=dict)
    analytics: dict = field(default_factory=dict)
    cavity: dict = field(default_factory=dict)
    memory_budget_mb: int = 4096
    out: str = "out"

    # -- construction -------------------------------------------------------

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        raw = copy.deepcopy(raw)
        known = set(cls.__dataclass_fields__)
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(
                f"unknown config keys {sorted(unknown)}; known keys are "
                f"{sorted(known)}")
        cfg = cls(**raw)
        cfg.validate()
        return cfg

    @classmethod
    def from_file(cls, path: str | Path) -> "ExperimentConfig":
        with open(path, "r", encoding="utf-8") as fh:
            try:
                raw = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config {path} is not valid JSON: {exc}")
        return cls.from_dict(raw)

    def to_dict(self) -> dict:
        return {
            name: copy.deepcopy(getattr(self, name))
            for name in self.__dataclass_fields__
        }

    def apply_overrides(self, pairs: list[str]) -> None:
        """Apply ``key=value`` overrides with dotted paths into sub-dicts."""
        for pair in pairs:
            if "=" not in pair:
                raise ConfigError(f"override {pair!r} must look like key=value")
            key, _, value = pair.partition("=")
            try:
                parsed = json.loads(value)
            except json.JSONDecodeError:
                parsed = value
            parts = key.split(".")
            if parts[0] not in self.__dataclass_fields__:
                raise ConfigError(f"override targets unknown key {parts[0]!r}")
            if len(parts) == 1:
                setattr(self, parts[0], parsed)
            else:
                target = getattr(self, parts[0])
                if not isinstance(target, dict):
                    raise ConfigError(
                        f"{parts[0]} is not a nested section; cannot set "
                        f"{key!r}")
                node = target
                for p in parts[1:-1]:
                    node = node.setdefault(p, {})
                node[parts[-1]] = parsed
        self.validate()

    # -- validation ----------------------------------------------------------

    def validate(self) -> None:
        if self.experiment not in EXPERIMENT_KINDS:
            raise ConfigError(
                f"experiment must be one of {EXPERIMENT_KINDS}, got "
                f"{self.experiment!r}")
        if not isinstance(self.sizes, list) or not self.sizes:
            raise ConfigError("sizes must be a non-empty list of integers")
        for L in self.sizes:
            if not isinstance(L, int) or L < 2:
                raise ConfigError(f"lattice sizes must be integers >= 2, got {L!r}")
        if self.runs < 1:
            raise ConfigError(f"runs must be >= 1, got {self.runs}")
        if self.t_max < 0:
            raise ConfigError(f"t_max must be >= 0, got {self.t_max}")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError(f"seed must be a non-negative integer, got {self.seed!r}")
        if self.T is not None and not self.T > 0:
            raise ConfigError(f"temperature must be > 0, got {self.T}")
        mode = self.decoder.get("mode", "auto")
        if mode not in ("auto", "complete", "delaunay"):
            raise ConfigError(f"decoder.mode must be auto|complete|delaunay, got {mode!r}")
        try:
            self.interaction_spec()
        except InteractionError as exc:
            raise ConfigError(f"invalid interaction block: {exc}")
        if self.experiment not in ("analytics", "cavity", "equilibrium"):
            try:
                self.bath_spec()
            except (ConfigError, ValueError) as exc:
                raise ConfigError(f"invalid bath block: {exc}")

    # -- physics objects -----------------------------------------------------

    def temperature(self) -> float:
        T = self.bath.get("T", self.T)
        if T is None:
            raise ConfigError("no temperature given (set T or bath.T)")
        if not T > 0:
            raise ConfigError(f"temperature must be > 0, got {T}")
        return float(T)

    def interaction_spec(self, alpha: float | None = None) -> InteractionSpec:
        blk = self.interaction
        return InteractionSpec(
            J=float(blk.get("J", 1.0)),
            A=float(blk.get("A", 0.0)),
            alpha=float(blk.get("alpha", 0.0) if alpha is None else alpha),
        )

    def bath_spec(self) -> Bath:
        blk = dict(self.bath)
        kind = blk.pop("kind", "spin-boson")
        T = self.temperature()
        blk.pop("T", None)
        if kind == "spin-boson":
            omega_c = blk.pop("omega_c", None)
            return SpinBosonBath(
                n=int(blk.pop("n", 1)), T=T,
                kappa=float(blk.pop("kappa", 1.0)),
                omega_c=math.inf if omega_c in (None, "inf") else float(omega_c),
            )
        if kind == "explicit":
            J = float(blk.pop("J", self.interaction.get("J", 1.0)))
            if "gamma_minus" in blk:
                return ExplicitRatesBath(
                    gamma0=float(blk.pop("gamma0", 1.0)),
                    gamma_minus=float(blk.pop("gamma_minus")), T=T, J=J)
            # balanced convention gamma(0) = gamma(2J)
            return balanced_explicit_bath(T=T, J=J,
                                          gamma0=float(blk.pop("gamma0", 1.0)))
        raise ConfigError(
            f"bath.kind must be 'spin-boson' or 'explicit', got {kind!r}")

    def sampling_params(self) -> tuple[int, float]:
        ppd = int(self.sampling.get("points_per_decade", 64))
        decades = float(self.sampling.get("decades", 3.0))
        if ppd < 1 or decades <= 0:
            raise ConfigError("sampling needs points_per_decade >= 1 and decades > 0")
        return ppd, decades

    # -- reproducibility -----------------------------------------------------

    def config_hash(self) -> str:
        payload = self.to_dict()
        payload.pop("out", None)
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def estimated_memory_mb(self, workers: int) -> float:
        """Per-worker footprint of the long-range engine state (~30 arrays
        of L^2 doubles) plus decoder scratch."""
        Lmax = max(self.sizes)
        per_run = 30.0 * Lmax * Lmax * 8.0 / 1e6
        return workers * per_run
