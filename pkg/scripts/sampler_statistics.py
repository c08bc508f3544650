#!/usr/bin/env python3
"""Reproduce the primitive-sampler statistics at a chosen scale.

Draws N primitive parts, then reports the KS test of the raw log10 scale
draws against U[-2, 2], the containment rate in [-1, 1]^3, and the
longest-bbox-edge range.
"""

import argparse

import numpy as np
from scipy import stats

from shapeforge.sampler import sample_part


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=300_000)
    args = ap.parse_args()

    logs = []
    contained = 0
    edges = []
    for i in range(args.count):
        rec = sample_part("primitive", args.seed + i)
        logs.extend(rec.metadata["log10_scale"])
        lo, hi = np.asarray(rec.bbox[0]), np.asarray(rec.bbox[1])
        if np.all(lo >= -1.0) and np.all(hi <= 1.0):
            contained += 1
        edges.append(float((hi - lo).max()))

    ks = stats.kstest(np.asarray(logs), stats.uniform(loc=-2, scale=4).cdf)
    edges = np.asarray(edges)
    print(f"draws                 : {args.count}")
    print(f"KS p-value (log scale): {ks.pvalue:.4f}")
    print(f"containment rate      : {contained / args.count:.4%}")
    print(f"longest edge range    : [{edges.min():.4f}, {edges.max():.4f}]")


if __name__ == "__main__":
    main()
