"""Run configuration: a flat dotted-key text format with one schema version.

Files hold `key = value` lines; keys are dotted paths grouping the model,
domain, time, data, source, study, and output blocks.  Unknown keys are
rejected and round-trips are lossless, so identical configs give identical
runs.  Example:

    schema = 1
    model.family = iii
    model.nonlinearity = westervelt
    model.alpha = 0.8
    model.tau = 1.0
    model.c = 1.0
    model.delta = 0.1
    model.k = 0.1
    domain.kind = interval
    domain.lengths = 1.0
    domain.cutoff = 8
    time.T = 1.0
    time.N = 256
    data.preset = bump
    data.amplitude = 1e-3
    source.preset = zero
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .models import Family, MediumParams, ModelSpec, ModelVariant, Nonlinearity
from .spectral import Domain, EigenBasis, SpectralField
from .models import InitialData
from .fractional import TimeGrid

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""


_KNOWN_KEYS = {
    "schema",
    "model.family",
    "model.nonlinearity",
    "model.alpha",
    "model.tau",
    "model.c",
    "model.delta",
    "model.k",
    "model.l",
    "domain.kind",
    "domain.lengths",
    "domain.cutoff",
    "time.T",
    "time.N",
    "data.preset",
    "data.amplitude",
    "data.mode",
    "data.psi0",
    "data.psi1",
    "data.psi2",
    "source.preset",
    "source.amplitude",
    "source.omega",
    "study.alpha_sweep",
    "study.n_sweep",
    "study.crosscheck",
    "study.selfcheck_signals",
    "output.directory",
    "output.formats",
}

_DEFAULTS = {
    "schema": "1",
    "model.family": "iii",
    "model.nonlinearity": "linear",
    "model.alpha": "1.0",
    "model.tau": "1.0",
    "model.c": "1.0",
    "model.delta": "0.1",
    "model.k": "0.0",
    "model.l": "0.0",
    "domain.kind": "interval",
    "domain.lengths": "1.0",
    "domain.cutoff": "8",
    "time.T": "1.0",
    "time.N": "256",
    "data.preset": "bump",
    "data.amplitude": "1.0",
    "data.mode": "1",
    "source.preset": "zero",
    "source.amplitude": "1.0",
    "source.omega": "3.0",
    "output.formats": "csv,json",
}


@dataclass
class RunConfig:
    entries: dict = field(default_factory=dict)

    @classmethod
    def from_text(cls, text: str, path: str = "<config>") -> "RunConfig":
        entries = dict(_DEFAULTS)
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in _KNOWN_KEYS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            entries[key] = value
        if entries.get("schema") != str(SCHEMA_VERSION):
            raise ConfigError(
                f"{path}: unsupported schema {entries.get('schema')!r}; "
                f"this build reads schema {SCHEMA_VERSION}"
            )
        cfg = cls(entries)
        cfg.validate()
        return cfg

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_text(fh.read(), str(path))

    def to_text(self) -> str:
        lines = [f"{k} = {self.entries[k]}" for k in sorted(self.entries)]
        return "\n".join(lines) + "\n"

    # typed accessors -------------------------------------------------------

    def _float(self, key):
        try:
            return float(self.entries[key])
        except ValueError as exc:
            raise ConfigError(f"key {key}: not a number: {self.entries[key]!r}") from exc

    def _int(self, key):
        try:
            return int(self.entries[key])
        except ValueError as exc:
            raise ConfigError(f"key {key}: not an integer: {self.entries[key]!r}") from exc

    def _floats(self, key):
        try:
            return [float(v) for v in self.entries[key].split(",") if v.strip()]
        except ValueError as exc:
            raise ConfigError(f"key {key}: not a number list: {self.entries[key]!r}") from exc

    def validate(self) -> "RunConfig":
        fam = self.entries["model.family"]
        if fam not in {f.value for f in Family}:
            raise ConfigError(f"model.family must be one of base/i/ii/iii, got {fam!r}")
        nl = self.entries["model.nonlinearity"]
        if nl not in {n.value for n in Nonlinearity}:
            raise ConfigError(
                f"model.nonlinearity must be linear/westervelt/kuznetsov, got {nl!r}"
            )
        variant = ModelVariant(Family(fam), Nonlinearity(nl))
        alpha = self._float("model.alpha")
        if not variant.admits(alpha):
            lo, _ = variant.alpha_range
            raise ConfigError(
                f"model.alpha: alpha must lie in ({lo}, 1] for family {fam}, got {alpha}"
            )
        if self.entries["domain.kind"] not in ("interval", "rectangle"):
            raise ConfigError("domain.kind must be interval or rectangle")
        if self._int("time.N") < 4:
            raise ConfigError("time.N must be at least 4")
        if self._float("time.T") <= 0:
            raise ConfigError("time.T must be positive")
        if self.entries["data.preset"] not in ("zero", "bump", "mode", "decay", "coeffs"):
            raise ConfigError(f"unknown data.preset {self.entries['data.preset']!r}")
        if self.entries["source.preset"] not in ("zero", "mode-cos", "pulse"):
            raise ConfigError(f"unknown source.preset {self.entries['source.preset']!r}")
        return self

    # object construction ---------------------------------------------------

    def spec(self) -> ModelSpec:
        variant = ModelVariant(
            Family(self.entries["model.family"]),
            Nonlinearity(self.entries["model.nonlinearity"]),
        )
        k = self._float("model.k")
        l = self._float("model.l")
        params = MediumParams(
            tau=self._float("model.tau"),
            c=self._float("model.c"),
            delta=self._float("model.delta"),
            k=k,
            k_tilde=k,
            l_tilde=l,
        )
        return ModelSpec(variant, params, self._float("model.alpha"))

    def basis(self) -> EigenBasis:
        lengths = self._floats("domain.lengths")
        if self.entries["domain.kind"] == "interval":
            dom = Domain.interval(lengths[0])
            cutoff = self._int("domain.cutoff")
        else:
            if len(lengths) != 2:
                raise ConfigError("rectangle domains need two lengths")
            dom = Domain.rectangle(*lengths)
            cutoff = self._int("domain.cutoff")
        return EigenBasis(dom, cutoff)

    def grid(self) -> TimeGrid:
        return TimeGrid(self._float("time.T"), self._int("time.N"))

    def initial_data(self, basis: EigenBasis) -> InitialData:
        preset = self.entries["data.preset"]
        amp = self._float("data.amplitude")
        if preset == "zero":
            psi0 = basis.zero_field()
        elif preset == "bump":
            if basis.domain.ndim == 1:
                L = basis.domain.lengths[0]
                raw = basis.project(lambda x: x * (L - x))
            else:
                Lx, Ly = basis.domain.lengths
                raw = basis.project(lambda x, y: x * (Lx - x) * y * (Ly - y))
            scale = amp / np.max(np.abs(raw.coeffs))
            psi0 = SpectralField(basis, raw.coeffs * scale)
        elif preset == "mode":
            psi0 = basis.unit_mode(self._int("data.mode") - 1, amp)
        elif preset == "decay":
            j = np.arange(1, basis.size + 1)
            psi0 = SpectralField(basis, amp * j ** (-1.2))
        else:  # explicit coefficient lists
            psi0 = self._field_from_key(basis, "data.psi0")
        psi1 = self._field_from_key(basis, "data.psi1") if "data.psi1" in self.entries else basis.zero_field()
        psi2 = self._field_from_key(basis, "data.psi2") if "data.psi2" in self.entries else basis.zero_field()
        return InitialData(psi0, psi1, psi2)

    def _field_from_key(self, basis, key):
        vals = self._floats(key)
        coeffs = np.zeros(basis.size)
        coeffs[: len(vals)] = vals
        return SpectralField(basis, coeffs)

    def forcing(self, basis: EigenBasis, grid: TimeGrid):
        preset = self.entries["source.preset"]
        if preset == "zero":
            return None
        amp = self._float("source.amplitude")
        om = self._float("source.omega")
        n1 = grid.steps + 1
        farr = np.zeros((n1, basis.size))
        if preset == "mode-cos":
            farr[:, 0] = amp * np.cos(om * grid.nodes)
        else:  # pulse
            t0, s = 0.3 * grid.horizon, 0.1 * grid.horizon
            farr[:, 0] = amp * np.exp(-(((grid.nodes - t0) / s) ** 2))
        return farr
