"""Store a few patterns, corrupt one, and watch the network fall back.

Demonstrates the associative-memory side of the package: Hebbian storage,
asynchronous updates, and the non-increasing energy trace on the way to an
attractor.
"""

import numpy as np

from membank import BIPOLAR, Pattern, hebbian_store, recall, total_energy

GLYPHS = {1.0: "#", -1.0: "."}


def show(values, width=16):
    rows = values.reshape(-1, width)
    for row in rows:
        print("   " + "".join(GLYPHS[v] for v in row))


def main():
    rng = np.random.default_rng(7)
    n = 128

    stored = [Pattern(rng.choice([-1.0, 1.0], n), BIPOLAR) for _ in range(4)]
    weights = hebbian_store(stored)
    print(f"stored {len(stored)} random patterns in a {n}-neuron network")
    print(f"energy at the first stored pattern: {total_energy(weights, stored[0]):.2f}")

    probe = stored[0].values.copy()
    flips = rng.choice(n, size=n // 5, replace=False)  # 20% corruption
    probe[flips] *= -1.0
    probe = Pattern(probe, BIPOLAR)
    print(f"\nprobe: stored pattern 0 with {len(flips)} flipped components")
    print(f"energy at the probe: {total_energy(weights, probe):.2f}")
    show(probe.values)

    result = recall(weights, probe, max_sweeps=50, seed=1)
    print(f"\nconverged: {result.converged} after {result.sweeps_used} sweep(s)")
    print("energy after each sweep:", ", ".join(f"{e:.2f}" for e in result.energy_trace))
    print(f"recovered the original: {result.final_state == stored[0]}")
    show(result.final_state.values)

    # the sign-flipped twin of every stored pattern is an attractor too
    mirrored = recall(weights, -stored[0], max_sweeps=50, seed=1)
    print(f"\nantipodal probe is already stable: {mirrored.sweeps_used == 1}")


if __name__ == "__main__":
    main()
