"""Sharded JSONL dataset generation with a checksummed manifest.

Layout under the output directory::

    manifest.json                      counts, splits, config hash, shards
    parts-{split}-{nnnn}.jsonl         one record per line
    meshes/{seed:016x}.ply             when mesh materialization is enabled
    clouds/{seed:016x}.ply             when cloud materialization is enabled

Records regenerate byte-identically from (config, master seed): the i-th
record's seed is a splitmix64 mix of the master seed and i, its family is
a weighted pick from that seed, and its split is a SHA-256 hash of the
seed, so membership never depends on generation order or thread count.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from ..dsl import print_program
from ..geometry.io import save_ply_mesh
from ..pointcloud import sample_surface, save_cloud
from ..prng import record_seed, split_of_seed, splitmix64
from .config import SamplerConfig
from .families import SampleRecord, sample_part

FORMAT_VERSION = 1
SHARD_SIZE = 1000
SPLITS = ("train", "val", "test")


@dataclass
class DatasetManifest:
    format_version: int
    count: int
    master_seed: int
    config_hash: str
    counts_by_family: dict
    counts_by_split: dict
    shards: list
    created_at: str = ""

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def stable_hash(self) -> str:
        """Hash over everything except the creation timestamp."""
        data = self.to_dict()
        data.pop("created_at", None)
        blob = json.dumps(data, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()

    @staticmethod
    def load(path) -> "DatasetManifest":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return DatasetManifest(**data)


def pick_family(cfg: SamplerConfig, seed: int) -> str:
    """Weighted family choice as a pure function of the record seed."""
    weights = [(fc.family, fc.weight) for fc in cfg.families if fc.weight > 0]
    total = sum(w for _, w in weights)
    u = splitmix64(seed ^ 0xFA417A17) / 2**64 * total
    acc = 0.0
    for family, w in weights:
        acc += w
        if u < acc:
            return family
    return weights[-1][0]


def record_to_json(rec: SampleRecord, split: str) -> str:
    payload = {
        "seed": rec.seed,
        "family": rec.family,
        "split": split,
        "program_text": print_program(rec.program),
        "bbox": [list(rec.bbox[0]), list(rec.bbox[1])],
        "metadata": rec.metadata,
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def generate_dataset(
    cfg: SamplerConfig,
    count: int,
    seed: int,
    out_dir,
    materialize: tuple[str, ...] = (),
    threads: int = 1,
    shard_size: int = SHARD_SIZE,
) -> DatasetManifest:
    """Generate ``count`` records and write shards plus a manifest.

    ``materialize`` may include "meshes" and/or "clouds" to write per-seed
    PLY files next to the shards. Partial output is removed on failure.
    """
    cfg.validate()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    produced: list[Path] = []

    def one(i: int) -> tuple[str, SampleRecord]:
        rseed = record_seed(seed, i)
        family = pick_family(cfg, rseed)
        rec = sample_part(family, rseed, cfg)
        return split_of_seed(rseed), rec

    try:
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(one, range(count)))
        else:
            results = [one(i) for i in range(count)]

        counts_by_family: dict[str, int] = {}
        counts_by_split: dict[str, int] = {s: 0 for s in SPLITS}
        lines: dict[str, list[str]] = {s: [] for s in SPLITS}
        for split, rec in results:
            counts_by_family[rec.family] = counts_by_family.get(rec.family, 0) + 1
            counts_by_split[split] += 1
            lines[split].append(record_to_json(rec, split))

        shards = []
        for split in SPLITS:
            rows = lines[split]
            for shard_idx in range(0, max(len(rows), 0), shard_size):
                chunk = rows[shard_idx : shard_idx + shard_size]
                name = f"parts-{split}-{shard_idx // shard_size:04d}.jsonl"
                path = out / name
                blob = ("\n".join(chunk) + "\n") if chunk else ""
                path.write_text(blob, encoding="utf-8", newline="\n")
                produced.append(path)
                shards.append(
                    {
                        "path": name,
                        "split": split,
                        "lines": len(chunk),
                        "sha256": hashlib.sha256(blob.encode("utf-8")).hexdigest(),
                    }
                )

        if materialize:
            from ..geometry.execute import execute_program
            from ..geometry.mesh import merge_meshes

            mesh_dir = out / "meshes"
            cloud_dir = out / "clouds"
            if "meshes" in materialize:
                mesh_dir.mkdir(exist_ok=True)
            if "clouds" in materialize:
                cloud_dir.mkdir(exist_ok=True)
            for _, rec in results:
                mesh = merge_meshes([m for _, m in execute_program(rec.program)])
                tag = f"{rec.seed & 0xFFFFFFFFFFFFFFFF:016x}"
                if "meshes" in materialize:
                    p = mesh_dir / f"{tag}.ply"
                    save_ply_mesh(p, mesh, comments=[f"seed {rec.seed}", f"family {rec.family}"])
                    produced.append(p)
                if "clouds" in materialize:
                    cloud = sample_surface(
                        mesh, cfg.cloud_points, rec.seed, source_id=rec.program.object_name
                    )
                    p = cloud_dir / f"{tag}.ply"
                    save_cloud(p, cloud)
                    produced.append(p)

        manifest = DatasetManifest(
            format_version=FORMAT_VERSION,
            count=count,
            master_seed=seed,
            config_hash=cfg.config_hash(),
            counts_by_family=dict(sorted(counts_by_family.items())),
            counts_by_split=counts_by_split,
            shards=shards,
            created_at=datetime.now(timezone.utc).isoformat(),
        )
        (out / "manifest.json").write_text(
            json.dumps(manifest.to_dict(), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
        return manifest
    except BaseException:
        for p in produced:
            p.unlink(missing_ok=True)
        for sub in ("meshes", "clouds"):
            d = out / sub
            if d.exists() and not any(d.iterdir()):
                d.rmdir()
        raise


def load_records(dataset_dir, split: str | None = None) -> list[dict]:
    """Read shard records back (optionally filtered by split)."""
    out = []
    root = Path(dataset_dir)
    manifest = DatasetManifest.load(root / "manifest.json")
    for shard in manifest.shards:
        if split and shard["split"] != split:
            continue
        text = (root / shard["path"]).read_text(encoding="utf-8")
        for line in text.splitlines():
            if line.strip():
                out.append(json.loads(line))
    return out
