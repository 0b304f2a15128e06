"""
Run configuration for ``verify``.

Configs are YAML or JSON documents (JSON is read through the YAML loader):

    preset: jagannathan-srinivasa      # or custom: {R_num: [...], phi_num: [...], ...}
    suites: [crochet3, bell]           # default: every suite
    window: {index_min: -3, index_max: 3, basis_window: 8}
    flags: {rnb2_prefactor_variant: rnb2, phi_override: {num: [...], den: [...]}}
    truncation: {N: 8, D: 3}
    jobs: 4
    output: report.json
"""

import difflib
import os
from dataclasses import dataclass, field
from typing import Any, Dict, Mapping, Optional, Tuple

import yaml

from .brackets import PREFACTOR_VARIANTS
from .constraints import Truncation
from .debuglog import NULL_LOG, DebugLog
from .deformation import PQ_VARIABLES, Deformation, from_custom, preset
from .errors import ConfigError, WorkbenchError
from .exactnum import PQ, LaurentPoly

SUITE_IDS: Tuple[str, ...] = (
    "deformed-numbers",
    "sigma-derivation",
    "crochet1",
    "crochet2",
    "crochet3",
    "witt3",
    "rcom1-vs-rnb1",
    "rcom2-vs-rnb2",
    "antisymmetry",
    "virasoro-2n",
    "gsva",
    "sv2n",
    "super-jacobi",
    "tau-identities",
    "bell",
    "rpqprod",
    "scrto",
    "scrgo",
    "toy-nbracket",
    "dictionary",
    "ac-specialization",
    "js-specialization",
)

TOP_LEVEL_KEYS = ("preset", "custom", "suites", "window", "flags", "truncation", "jobs", "output")


@dataclass(frozen=True)
class IndexWindow:
    index_min: int
    index_max: int
    basis_window: int

    def indices(self) -> Tuple[int, ...]:
        return tuple(range(self.index_min, self.index_max + 1))

    def to_dict(self) -> Dict[str, int]:
        return {"index_min": self.index_min, "index_max": self.index_max, "basis_window": self.basis_window}


@dataclass(frozen=True)
class RunConfig:
    preset: Optional[str] = None
    custom: Optional[Mapping[str, Any]] = None
    suites: Tuple[str, ...] = SUITE_IDS
    window: Optional[IndexWindow] = None
    prefactor_variant: str = "rnb2"
    phi_override: Optional[Mapping[str, Any]] = None
    truncation: Optional[Truncation] = None
    jobs: int = 1
    output: Optional[str] = None
    echo: Mapping[str, Any] = field(default_factory=dict)

    @property
    def deformation_label(self) -> str:
        return self.preset or "custom"


def _hint(requested: str, available: Tuple[str, ...]) -> str:
    matches = difflib.get_close_matches(requested, list(available), n=1, cutoff=0.6)
    return f" is '{matches[0]}' what you're looking for?" if matches else ""


def _int(value: Any, label: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"'{label}' must be an integer, got {value!r}")
    return value


class ConfigLoader:
    def __init__(self, debug: DebugLog = NULL_LOG):
        self.debug = debug

    def load(self, path: str) -> RunConfig:
        if not os.path.isfile(path):
            raise ConfigError(f"config file not found: {path}")
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigError(f"config {path} is not valid YAML/JSON: {e}")
        config = self.from_mapping(data if data is not None else {})
        self.debug.emit(
            f"config: {path} deformation={config.deformation_label} suites={len(config.suites)} jobs={config.jobs}"
        )
        return config

    def from_mapping(self, data: Any) -> RunConfig:
        if not isinstance(data, Mapping):
            raise ConfigError("config must be a mapping at the top level")
        unknown = [k for k in data if k not in TOP_LEVEL_KEYS]
        if unknown:
            raise ConfigError(f"unknown config key '{unknown[0]}';{_hint(str(unknown[0]), TOP_LEVEL_KEYS)}")
        if ("preset" in data) == ("custom" in data):
            raise ConfigError("config needs exactly one of 'preset' or 'custom'")
        flags = data.get("flags") or {}
        if not isinstance(flags, Mapping):
            raise ConfigError("'flags' must be a mapping")
        variant = flags.get("rnb2_prefactor_variant", "rnb2")
        if variant not in PREFACTOR_VARIANTS:
            raise ConfigError(
                f"unknown rnb2_prefactor_variant '{variant}'; expected one of {', '.join(PREFACTOR_VARIANTS)}"
            )
        custom = data.get("custom")
        if custom is not None and not isinstance(custom, Mapping):
            raise ConfigError("'custom' must be a mapping of term-record lists")
        return RunConfig(
            preset=data.get("preset"),
            custom=custom,
            suites=self._suites(data.get("suites")),
            window=self._window(data.get("window")),
            prefactor_variant=variant,
            phi_override=flags.get("phi_override"),
            truncation=self._truncation(data.get("truncation")),
            jobs=self._jobs(data.get("jobs", 1)),
            output=data.get("output"),
            echo=dict(data),
        )

    def _suites(self, value: Any) -> Tuple[str, ...]:
        if value is None:
            return SUITE_IDS
        if not isinstance(value, list) or not value:
            raise ConfigError("'suites' must be a non-empty list of suite ids")
        for suite in value:
            if suite not in SUITE_IDS:
                raise ConfigError(f"unknown suite '{suite}';{_hint(str(suite), SUITE_IDS)}")
        # registry order keeps reports stable regardless of how the list is written
        return tuple(s for s in SUITE_IDS if s in value)

    def _window(self, value: Any) -> Optional[IndexWindow]:
        if value is None:
            return None
        if not isinstance(value, Mapping):
            raise ConfigError("'window' must be a mapping")
        low = _int(value.get("index_min", -3), "window.index_min")
        high = _int(value.get("index_max", 3), "window.index_max")
        w = _int(value.get("basis_window", 8), "window.basis_window")
        if low > high:
            raise ConfigError(f"empty index window [{low}, {high}]")
        if w < 1:
            raise ConfigError(f"basis_window must be >= 1, got {w}")
        return IndexWindow(low, high, w)

    def _truncation(self, value: Any) -> Optional[Truncation]:
        if value is None:
            return None
        if not isinstance(value, Mapping):
            raise ConfigError("'truncation' must be a mapping with N and D")
        try:
            return Truncation(_int(value.get("N", 8), "truncation.N"), _int(value.get("D", 3), "truncation.D"))
        except ValueError as e:
            raise ConfigError(str(e))

    def _jobs(self, value: Any) -> int:
        jobs = _int(value, "jobs")
        if jobs < 1:
            raise ConfigError(f"jobs must be >= 1, got {jobs}")
        return jobs


def resolve_deformation(config: RunConfig, debug: DebugLog = NULL_LOG) -> Deformation:
    """Deformation named by the config with the phi override applied."""
    try:
        if config.preset is not None:
            d = preset(config.preset, debug)
        else:
            d = from_custom(config.custom or {}, name="custom", debug=debug)
    except WorkbenchError as e:
        raise ConfigError(str(e))
    if config.phi_override is None:
        return d
    override = config.phi_override
    if not isinstance(override, Mapping) or "num" not in override:
        raise ConfigError("phi_override needs a 'num' term-record list")
    try:
        phi = LaurentPoly.from_records(PQ_VARIABLES, override["num"]).to_scalar(PQ)
        if "den" in override:
            phi = phi / LaurentPoly.from_records(PQ_VARIABLES, override["den"]).to_scalar(PQ)
    except ValueError as e:
        raise ConfigError(f"phi_override: {e}")
    debug.emit(f"config: phi overridden to {phi.render()}")
    return d.with_phi(phi)
