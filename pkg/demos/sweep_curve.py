"""How many core patterns per class are worth keeping?

Builds a dataset where every class is secretly three separate sub-clusters,
then sweeps the per-class core-pattern count. One center per class straddles
the sub-clusters; three resolve them.
"""

import numpy as np

from membank import FeatureTable, sweep_core_patterns


def subcluster_tables(rng, n_classes=3, subs_per_class=3, dim=16, spread=6.0, sigma=0.3):
    centers = {c: [rng.normal(0, 1, dim) * spread for _ in range(subs_per_class)]
               for c in range(n_classes)}

    def emit(per_sub, tag):
        ids, labels, vals = [], [], []
        for c in range(n_classes):
            for s in range(subs_per_class):
                for j in range(per_sub):
                    ids.append(f"{tag}-{c}-{s}-{j}")
                    labels.append(f"class{c}")
                    vals.append(centers[c][s] + rng.normal(0, sigma, dim))
        return FeatureTable(ids, labels, np.array(vals))

    return emit(30, "train"), emit(15, "test")


def main():
    rng = np.random.default_rng(2)
    train, test = subcluster_tables(rng)
    print(f"{len(train)} train / {len(test)} test rows, 3 sub-clusters per class\n")

    curve = sweep_core_patterns(train, test, k_list=[1, 2, 3, 4, 6, 8], mode="real", seed=0)
    print("k,accuracy")
    for k, acc in curve:
        bar = "#" * int(round(acc * 40))
        print(f"{k},{acc:.4f}  {bar}")

    best_k, best_acc = max(curve, key=lambda pair: pair[1])
    print(f"\nbest: k={best_k} at {best_acc:.4f}")


if __name__ == "__main__":
    main()
