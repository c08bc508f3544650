"""Readers for the part-dataset files the shapeforge CLI writes.

This package consumes only the on-disk interfaces: ``manifest.json``,
``parts-{split}-{nnnn}.jsonl`` shard lines with ``seed``, ``program_text``
and friends, and binary little-endian PLY point clouds (float64 x, y, z)
under ``clouds/``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass
class Sample:
    seed: int
    family: str
    split: str
    program_text: str
    points: np.ndarray  # (N, 3) float64 in [-1, 1]^3


def read_ply_points(path) -> np.ndarray:
    with open(path, "rb") as fh:
        if fh.readline().strip() != b"ply":
            raise ValueError(f"{path} is not a PLY file")
        if b"binary_little_endian" not in fh.readline():
            raise ValueError("expected binary little-endian PLY")
        count = 0
        props = []
        while True:
            line = fh.readline()
            if not line:
                raise ValueError("truncated PLY header")
            line = line.strip()
            if line == b"end_header":
                break
            toks = line.split()
            if toks[0] == b"element" and toks[1] == b"vertex":
                count = int(toks[2])
            elif toks[0] == b"property" and toks[1] == b"double":
                props.append(toks[2].decode())
        if props[:3] != ["x", "y", "z"]:
            raise ValueError(f"unexpected vertex properties {props}")
        data = np.frombuffer(fh.read(24 * count), dtype="<f8")
        return data.reshape(count, 3).copy()


def load_dataset(dataset_dir, limit: int | None = None) -> list[Sample]:
    """Load shard records and their point clouds (clouds must be materialized)."""
    root = Path(dataset_dir)
    manifest = json.loads((root / "manifest.json").read_text(encoding="utf-8"))
    samples: list[Sample] = []
    for shard in manifest["shards"]:
        for line in (root / shard["path"]).read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            rec = json.loads(line)
            tag = f"{rec['seed'] & 0xFFFFFFFFFFFFFFFF:016x}"
            cloud_path = root / "clouds" / f"{tag}.ply"
            if not cloud_path.exists():
                raise FileNotFoundError(
                    f"{cloud_path} missing: generate the dataset with clouds materialized"
                )
            samples.append(
                Sample(
                    seed=rec["seed"],
                    family=rec["family"],
                    split=rec["split"],
                    program_text=rec["program_text"],
                    points=read_ply_points(cloud_path),
                )
            )
            if limit is not None and len(samples) >= limit:
                return samples
    return samples


def resample_points(points: np.ndarray, count: int, seed: int) -> np.ndarray:
    """Deterministic subsample (or resample with replacement) to ``count``."""
    rng = np.random.default_rng(seed)
    n = len(points)
    if count <= n:
        idx = rng.choice(n, size=count, replace=False)
    else:
        idx = rng.integers(0, n, size=count)
    return points[np.sort(idx)]
