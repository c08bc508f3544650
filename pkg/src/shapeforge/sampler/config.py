"""Sampler configuration: family weights and parameter ranges.

Parameter ranges beyond the primitive recipe are project choices; every
range lives here so generated corpora are reproducible from the config
alone. Configs serialize to canonical JSON and hash stably into dataset
manifests.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field

from ..errors import ConfigError

FAMILIES = ("primitive", "translation", "bridge_loop", "boolean", "array", "fill_grid")

# family weights follow the corpus composition ratios for the five core
# families (1.5 : 3 : 1.5 : 1.5 : 2.4); fill_grid has no published count
DEFAULT_WEIGHTS = {
    "primitive": 1.5,
    "translation": 3.0,
    "bridge_loop": 1.5,
    "boolean": 1.5,
    "array": 2.4,
    "fill_grid": 0.6,
}

DEFAULT_RANGES: dict[str, dict] = {
    "primitive": {
        "log10_scale": (-2.0, 2.0),
    },
    "translation": {
        "revolve_prob": 0.2,
        "section_size": (0.2, 0.9),
        "line_length": (0.6, 1.8),
        "curve_radius": (0.4, 1.0),
        "profile_constant_prob": 0.5,
        "profile_end_scale": (0.4, 1.6),
    },
    "bridge_loop": {
        "loops": (2, 4),
        "loop_size": (0.25, 0.8),
        "xy_jitter": 0.25,
        "tilt_max": 0.35,
    },
    "boolean": {
        "operands": (2, 3),
        "third_operand_prob": 0.25,
        "operand_edge": (0.8, 1.4),
        "min_result_volume": 1e-3,
    },
    "array": {
        "one_d_prob": 0.55,
        "count": (2, 8),
        "grid_count": (2, 4),
        "spacing": (1.0, 1.8),
        "proto_fill": (0.5, 0.9),
    },
    "fill_grid": {
        "vertices": (4, 9),
        "radius": (0.8, 1.5),
        "nonplanar_prob": 0.3,
        "nonplanar_jitter": 0.08,
        "thickness": (0.08, 0.35),
    },
}


@dataclass
class FamilyConfig:
    family: str
    weight: float
    ranges: dict = field(default_factory=dict)

    def merged_ranges(self) -> dict:
        base = dict(DEFAULT_RANGES.get(self.family, {}))
        base.update(self.ranges)
        return base


@dataclass
class SamplerConfig:
    families: list[FamilyConfig] = field(
        default_factory=lambda: [
            FamilyConfig(name, DEFAULT_WEIGHTS[name]) for name in FAMILIES
        ]
    )
    # target for the longest bbox edge; drawn strictly inside [1, 2] so the
    # 6-digit quantization of parameters cannot push it over the bounds
    longest_edge: tuple[float, float] = (1.001, 1.999)
    # placement keeps meshes this far inside [-1, 1]^3 (quantization headroom)
    placement_margin: float = 1e-4
    cloud_points: int = 8192

    def validate(self) -> None:
        if not self.families:
            raise ConfigError("at least one family must be configured")
        for fc in self.families:
            if fc.family not in FAMILIES:
                raise ConfigError(f"unknown family {fc.family!r}")
            if fc.weight < 0:
                raise ConfigError(f"family {fc.family!r} has negative weight")
            if not fc.merged_ranges() and fc.family != "primitive":
                raise ConfigError(f"family {fc.family!r} has empty ranges")
        if not any(fc.weight > 0 for fc in self.families):
            raise ConfigError("at least one family weight must be positive")
        lo, hi = self.longest_edge
        if not (1.0 <= lo < hi <= 2.0):
            raise ConfigError("longest_edge must lie within [1, 2]")

    def family_config(self, family: str) -> FamilyConfig:
        for fc in self.families:
            if fc.family == family:
                return fc
        return FamilyConfig(family, 0.0)

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), sort_keys=True, separators=(",", ":"))

    def config_hash(self) -> str:
        return hashlib.sha256(self.to_json().encode("utf-8")).hexdigest()

    @staticmethod
    def from_dict(data: dict) -> "SamplerConfig":
        families = [
            FamilyConfig(f["family"], f["weight"], f.get("ranges", {}))
            for f in data.get("families", [])
        ]
        cfg = SamplerConfig()
        if families:
            cfg.families = families
        if "longest_edge" in data:
            cfg.longest_edge = tuple(data["longest_edge"])
        if "placement_margin" in data:
            cfg.placement_margin = float(data["placement_margin"])
        if "cloud_points" in data:
            cfg.cloud_points = int(data["cloud_points"])
        cfg.validate()
        return cfg
