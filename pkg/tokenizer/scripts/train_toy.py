#!/usr/bin/env python3
"""Train the toy tokenizer + decoder on a shapeforge dataset and report results."""

import argparse

from shapetok import TrainConfig, train_toy


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dataset", required=True, help="dataset dir with clouds/ materialized")
    ap.add_argument("--out", default="runs/toy")
    ap.add_argument("--samples", type=int, default=32)
    ap.add_argument("--steps", type=int, default=4000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    cfg = TrainConfig(
        dataset_dir=args.dataset,
        out_dir=args.out,
        sample_count=args.samples,
        max_steps=args.steps,
        seed=args.seed,
    )
    result = train_toy(cfg)
    drop = 100 * (1 - result.final_loss / result.initial_loss)
    print(
        f"loss {result.initial_loss:.4f} -> {result.final_loss:.4f} ({drop:.1f}% drop), "
        f"memorized {result.memorized}/{result.sample_count}, "
        f"checkpoint at {result.checkpoint}"
    )


if __name__ == "__main__":
    main()
