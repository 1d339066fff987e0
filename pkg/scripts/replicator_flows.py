#!/usr/bin/env python3
"""Replicator dynamics for a few classic payoff matrices, with a check against
the closed-form two-species solution."""
import numpy as np

from protolife.replicator_ode import integrate

GAMES = {
    "hawk-dove (V=2, C=4)": ([[-1.0, 2.0], [0.0, 1.0]], [0.9, 0.1]),
    "rock-paper-scissors": ([[0.0, -1.0, 1.0], [1.0, 0.0, -1.0], [-1.0, 1.0, 0.0]],
                            [0.5, 0.3, 0.2]),
    "coordination": ([[2.0, 0.0], [0.0, 1.0]], [0.4, 0.6]),
}


def main():
    for name, (W, x0) in GAMES.items():
        times, xs = integrate(x0, W, 30.0, 0.01)
        picks = [0, len(times) // 3, 2 * len(times) // 3, len(times) - 1]
        print(name)
        for i in picks:
            print(f"  t={times[i]:5.1f}  x={np.array2string(xs[i], precision=4)}")

    x1 = 0.2
    _, xs = integrate([x1, 1 - x1], [[1.0, 1.0], [0.0, 0.0]], 5.0, 1e-3)
    exact = x1 * np.exp(5) / (x1 * np.exp(5) + 1 - x1)
    print(f"\nf=(1,0): x1(5) numeric {xs[-1, 0]:.12f}  closed form {exact:.12f}  "
          f"error {abs(xs[-1, 0] - exact):.2e}")


if __name__ == "__main__":
    main()
