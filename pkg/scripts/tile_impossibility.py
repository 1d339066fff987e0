#!/usr/bin/env python3
"""Tile chemistry: exact self-replication never happens, shape replication does.

Collides random polyominoes, checks that every product outgrows both
reactants, then searches the products for block-scaled copies of a reactant.
"""
import argparse
import collections

import numpy as np

from protolife import tile_chem


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--collisions", type=int, default=100_000)
    ap.add_argument("--max-area", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    fits = same = 0
    scaled = collections.Counter()
    for _ in range(args.collisions):
        a = tile_chem.random_tile(rng, int(rng.integers(1, args.max_area + 1)))
        b = tile_chem.random_tile(rng, int(rng.integers(1, args.max_area + 1)))
        p = tile_chem.collide_tiles(a, b, rng)
        if p is None:
            continue
        fits += 1
        assert p.area == a.area + b.area
        same += tile_chem.same_shape_and_size(p, a, True, True)
        same += tile_chem.same_shape_and_size(p, b, True, True)
        for r in (a, b):
            k = tile_chem.same_shape_ignoring_size(r, p, True, True)
            if k:
                scaled[(r.key, k)] += 1

    print(f"{args.collisions} collisions, {fits} fitted, "
          f"{same} products identical in shape and size to a reactant")
    print("products that are scaled copies of a reactant:")
    for (key, k), n in scaled.most_common():
        print(f"  {n:6d}x  scale {k}  of  {key}")

    block = tile_chem.scale(tile_chem.SQUARE, 2)
    opts = tile_chem.placements(tile_chem.L_TROMINO, tile_chem.SQUARE)
    print(f"\nsquare + L-tromino: {len(opts)} distinct products, "
          f"2x2 block among them: {block in opts}")


if __name__ == "__main__":
    main()
