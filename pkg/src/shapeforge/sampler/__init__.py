"""Seeded probabilistic generation of paired (program, mesh) part datasets."""

from .config import DEFAULT_RANGES, DEFAULT_WEIGHTS, FAMILIES, FamilyConfig, SamplerConfig
from .dataset import (
    DatasetManifest,
    generate_dataset,
    load_records,
    pick_family,
    record_to_json,
)
from .families import SampleRecord, sample_part, sample_primitive_params

__all__ = [
    "DEFAULT_RANGES",
    "DEFAULT_WEIGHTS",
    "FAMILIES",
    "DatasetManifest",
    "FamilyConfig",
    "SampleRecord",
    "SamplerConfig",
    "generate_dataset",
    "load_records",
    "pick_family",
    "record_to_json",
    "sample_part",
    "sample_primitive_params",
]
