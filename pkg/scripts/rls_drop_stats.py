#!/usr/bin/env python3
"""Print empirical part-drop frequencies for a seed and partition.

    python3 scripts/rls_drop_stats.py --seed 42 --draws 10000
"""
from __future__ import annotations

import argparse
from pathlib import Path

from mimickit import RlsConfig, default_partition, load_partition, sample_mask


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--partition", type=Path, default=None)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--draws", type=int, default=10_000)
    parser.add_argument("--drop-prob", type=float, default=0.5)
    args = parser.parse_args()

    partition = (
        load_partition(args.partition.read_bytes()) if args.partition else default_partition()
    )
    cfg = RlsConfig(drop_prob=args.drop_prob, seed=args.seed)
    drops = {name: 0 for name in partition.parts}
    for i in range(args.draws):
        mask = sample_mask(partition, cfg, i)
        for name, kept in mask.kept.items():
            drops[name] += 0 if kept else 1

    width = max(len(n) for n in drops)
    print(f"seed={args.seed} draws={args.draws} target={args.drop_prob}")
    for name, count in drops.items():
        print(f"  {name:<{width}}  {count / args.draws:.4f}")


if __name__ == "__main__":
    main()
