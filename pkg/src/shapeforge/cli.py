"""Command-line pipeline: generate | exec | assemble | eval | export.

Exit codes are stable API: 0 ok, 2 config error, 3 I/O error, 4 execution
failure, 5 acceptance failure (strict assemble). All runs with identical
config and seed produce byte-identical artifacts; manifest hashes exclude
the creation timestamp.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .assembly import (
    PartInstance,
    accept_part_fit,
    assemble_object_program,
    object_bbox_of,
    object_record,
    order_parts,
    canonicalize_part,
)
from .dsl import parse_program, parse_statement, print_program
from .errors import (
    ConfigError,
    ExecutionError,
    ParseError,
    ShapeForgeError,
    ValidationError,
)
from .geometry.execute import execute_program
from .geometry.io import load_mesh, save_mesh
from .geometry.mesh import merge_meshes
from .metrics import PROTOCOLS, EvalProtocol, aggregate_csv, evaluate_reconstruction
from .pointcloud import AugmentConfig, sample_surface
from .sampler import SamplerConfig, generate_dataset

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_EXEC = 4
EXIT_ACCEPT = 5

MESH_SUFFIXES = (".obj", ".ply")


@dataclass
class RunConfig:
    """Single versioned run configuration, hashed into dataset manifests."""

    seed: int = 0
    count: int = 100
    sampler: SamplerConfig = field(default_factory=SamplerConfig)
    augment: AugmentConfig = field(default_factory=AugmentConfig)
    protocol: str = "default"
    threads: int = 1
    materialize: tuple[str, ...] = ()

    @staticmethod
    def from_file(path) -> "RunConfig":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        return RunConfig.from_dict(data)

    @staticmethod
    def from_dict(data: dict) -> "RunConfig":
        cfg = RunConfig()
        if "sampler" in data:
            cfg.sampler = SamplerConfig.from_dict(data["sampler"])
        if "family_weights" in data:
            weights = data["family_weights"]
            if not isinstance(weights, dict) or not weights:
                raise ConfigError("family_weights must be a non-empty mapping")
            from .sampler import FamilyConfig

            cfg.sampler.families = [
                FamilyConfig(name, float(w)) for name, w in sorted(weights.items())
            ]
        try:
            cfg.sampler.validate()
        except ConfigError:
            raise
        if "augment" in data:
            try:
                cfg.augment = AugmentConfig(**data["augment"])
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad augment config: {exc}") from exc
        for key in ("seed", "count", "threads"):
            if key in data:
                cfg = dataclasses.replace(cfg, **{key: int(data[key])})
        if "protocol" in data:
            if data["protocol"] not in PROTOCOLS:
                raise ConfigError(f"unknown protocol {data['protocol']!r}")
            cfg.protocol = data["protocol"]
        if "materialize" in data:
            mats = tuple(data["materialize"])
            for m in mats:
                if m not in ("meshes", "clouds"):
                    raise ConfigError(f"unknown materialization target {m!r}")
            cfg.materialize = mats
        if cfg.count < 0:
            raise ConfigError("count must be >= 0")
        return cfg


def _default_threads() -> int:
    env = os.environ.get("SHAPEFORGE_THREADS", "")
    try:
        return max(int(env), 1)
    except ValueError:
        return 1


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="shapeforge",
        description="Generate, execute, assemble, and evaluate shape programs.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate a paired program/mesh dataset")
    g.add_argument("--config", type=Path, help="JSON run configuration")
    g.add_argument("--count", type=int, help="number of records")
    g.add_argument("--seed", type=int, help="master seed")
    g.add_argument("--out", type=Path, required=True, help="output directory")
    g.add_argument(
        "--materialize",
        action="append",
        choices=["meshes", "clouds"],
        default=None,
        help="also write per-record PLY files",
    )
    g.add_argument("--threads", type=int, default=None)

    e = sub.add_parser("exec", help="execute a program and export meshes")
    e.add_argument("program", type=Path)
    e.add_argument("--export", choices=["obj", "ply"], default="obj")
    e.add_argument("--per-part", action="store_true", help="one file per part")
    e.add_argument("--out-dir", type=Path, default=Path("."))

    a = sub.add_parser("assemble", help="assemble labeled parts into an object program")
    a.add_argument("parts_dir", type=Path, help="directory with parts.json")
    a.add_argument("--out", type=Path, required=True, help="output program path")
    a.add_argument("--report", type=Path, help="acceptance report JSON path")
    a.add_argument("--strict", action="store_true", help="fail when any part is rejected")
    a.add_argument("--object-name", default="object")
    a.add_argument("--category", default="")
    a.add_argument("--mode", choices=["aabb", "pca"], default="aabb")
    a.add_argument("--points", type=int, default=16384, help="acceptance cloud size")
    a.add_argument("--seed", type=int, default=0)

    v = sub.add_parser("eval", help="evaluate predicted programs against meshes")
    v.add_argument("--gt", type=Path, required=True, help="mesh file or directory")
    v.add_argument("--pred", type=Path, required=True, help="program file or directory")
    v.add_argument("--out-dir", type=Path, required=True)
    v.add_argument("--protocol", choices=sorted(PROTOCOLS), default="default")

    x = sub.add_parser("export", help="convert a mesh between OBJ and PLY")
    x.add_argument("input", type=Path)
    x.add_argument("output", type=Path)
    return p


def _cmd_generate(args) -> int:
    cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
    if args.count is not None:
        cfg.count = args.count
    if args.seed is not None:
        cfg.seed = args.seed
    if args.materialize is not None:
        cfg.materialize = tuple(args.materialize)
    threads = args.threads if args.threads is not None else (
        cfg.threads if cfg.threads > 1 else _default_threads()
    )
    manifest = generate_dataset(
        cfg.sampler,
        cfg.count,
        cfg.seed,
        args.out,
        materialize=cfg.materialize,
        threads=threads,
    )
    print(f"wrote {manifest.count} records to {args.out}")
    for fam, n in manifest.counts_by_family.items():
        print(f"  {fam}: {n}")
    print(f"splits: {manifest.counts_by_split}")
    print(f"manifest hash: {manifest.stable_hash()}")
    return EXIT_OK


def _cmd_exec(args) -> int:
    if not args.program.exists():
        print(f"error: program file not found: {args.program}", file=sys.stderr)
        return EXIT_IO
    text = args.program.read_text(encoding="utf-8")
    program = parse_program(text)
    parts = execute_program(program)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    stem = args.program.stem
    suffix = f".{args.export}"
    written = []
    if args.per_part:
        for i, (name, mesh) in enumerate(parts):
            path = args.out_dir / f"{stem}_part{i}_{name}{suffix}"
            save_mesh(path, mesh)
            written.append(path)
    else:
        path = args.out_dir / f"{stem}{suffix}"
        save_mesh(path, merge_meshes([m for _, m in parts]))
        written.append(path)
    for w in written:
        print(w)
    return EXIT_OK


def _cmd_assemble(args) -> int:
    spec_path = args.parts_dir / "parts.json"
    if not spec_path.exists():
        print(f"error: {spec_path} not found", file=sys.stderr)
        return EXIT_IO
    entries = json.loads(spec_path.read_text(encoding="utf-8"))
    instances: list[PartInstance] = []
    results = []
    for entry in entries:
        label = entry["label"]
        mesh = load_mesh(args.parts_dir / entry["mesh"])
        if "code" in entry:
            code_text = entry["code"]
        else:
            code_text = (args.parts_dir / entry["code_file"]).read_text(encoding="utf-8")
        op = parse_statement(code_text)
        canonical_mesh, t = canonicalize_part(mesh, mode=args.mode)
        gt_cloud = sample_surface(canonical_mesh, args.points, args.seed)
        fit = accept_part_fit(gt_cloud, op)
        results.append(
            {"label": label, "accepted": fit.accepted, "cd": fit.cd, "reason": fit.reason}
        )
        if fit.accepted:
            instances.append(PartInstance(mesh, label, op, t))
        else:
            print(f"rejected part {label!r}: {fit.reason}", file=sys.stderr)

    rejected = [r for r in results if not r["accepted"]]
    report = {
        "object_name": args.object_name,
        "parts_total": len(entries),
        "parts_accepted": len(instances),
        "results": results,
    }
    if args.report:
        args.report.write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    if rejected and args.strict:
        print(
            f"error: {len(rejected)} part(s) rejected in strict mode: "
            + ", ".join(r["label"] for r in rejected),
            file=sys.stderr,
        )
        return EXIT_ACCEPT
    if not instances:
        print("error: no parts accepted", file=sys.stderr)
        return EXIT_ACCEPT
    bbox = object_bbox_of(instances)
    ordered = [instances[i] for i in order_parts(instances, bbox)]
    program = assemble_object_program(ordered, args.object_name, args.category)
    args.out.write_text(print_program(program), encoding="utf-8", newline="\n")
    record_path = args.out.with_suffix(args.out.suffix + ".json")
    record_path.write_text(
        json.dumps(object_record(ordered, program), indent=2) + "\n", encoding="utf-8"
    )
    print(args.out)
    return EXIT_OK


def _eval_pairs(gt: Path, pred: Path):
    if gt.is_dir() != pred.is_dir():
        raise ConfigError("--gt and --pred must both be files or both be directories")
    if not gt.is_dir():
        return [(gt, pred)]
    pairs = []
    for mesh_path in sorted(gt.iterdir()):
        if mesh_path.suffix.lower() not in MESH_SUFFIXES:
            continue
        prog = pred / (mesh_path.stem + ".sfp")
        if not prog.exists():
            raise FileNotFoundError(f"missing prediction for {mesh_path.name}: {prog}")
        pairs.append((mesh_path, prog))
    if not pairs:
        raise FileNotFoundError(f"no meshes found under {gt}")
    return pairs


def _cmd_eval(args) -> int:
    if not args.gt.exists() or not args.pred.exists():
        missing = args.gt if not args.gt.exists() else args.pred
        print(f"error: not found: {missing}", file=sys.stderr)
        return EXIT_IO
    protocol: EvalProtocol = PROTOCOLS[args.protocol]
    pairs = _eval_pairs(args.gt, args.pred)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    reports = []
    for mesh_path, prog_path in pairs:
        mesh = load_mesh(mesh_path)
        program = parse_program(prog_path.read_text(encoding="utf-8"))
        report = evaluate_reconstruction(mesh, program, protocol, object_id=mesh_path.stem)
        reports.append(report)
        out = args.out_dir / f"{mesh_path.stem}.json"
        out.write_text(json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8")
        print(f"{mesh_path.stem}: status={report.status} cd={report.cd:.6g} iou={report.iou:.4f}")
    (args.out_dir / "summary.csv").write_text(aggregate_csv(reports), encoding="utf-8")
    return EXIT_OK


def _cmd_export(args) -> int:
    if not args.input.exists():
        print(f"error: not found: {args.input}", file=sys.stderr)
        return EXIT_IO
    mesh = load_mesh(args.input)
    save_mesh(args.output, mesh)
    print(args.output)
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "generate":
            return _cmd_generate(args)
        if args.command == "exec":
            return _cmd_exec(args)
        if args.command == "assemble":
            return _cmd_assemble(args)
        if args.command == "eval":
            return _cmd_eval(args)
        if args.command == "export":
            return _cmd_export(args)
        return EXIT_CONFIG
    except ParseError as exc:
        d = exc.diagnostic
        (line, col), _ = d.span
        print(f"parse error at line {line}, column {col}: {d.message}", file=sys.stderr)
        return EXIT_CONFIG
    except ValidationError as exc:
        for d in exc.diagnostics:
            print(f"invalid program: {d}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ExecutionError as exc:
        print(f"execution error: {exc}", file=sys.stderr)
        return EXIT_EXEC
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ShapeForgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EXEC


if __name__ == "__main__":
    sys.exit(main())
