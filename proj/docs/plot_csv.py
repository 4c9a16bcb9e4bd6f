#!/usr/bin/env python3
"""Render regret/convergence CSVs from the CLI. Convenience only."""
import csv
import sys

import matplotlib.pyplot as plt


def main(path: str) -> None:
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    if not rows:
        sys.exit("empty csv")

    if "policy" in rows[0]:  # regret schema
        by_policy = {}
        for r in rows:
            by_policy.setdefault(r["policy"], []).append(
                (float(r["param"]), float(r["mean_regret"]), float(r["stderr"]))
            )
        for policy, pts in sorted(by_policy.items()):
            pts.sort()
            xs, ys, es = zip(*pts)
            plt.errorbar(xs, ys, yerr=[2 * e for e in es], label=policy, capsize=2)
        plt.xlabel("environment parameter")
        plt.ylabel("mean pseudo-regret")
    else:  # convergence schema
        by_grid = {}
        for r in rows:
            key = f"N={r['N']}, f={r['f_family']}" if r["N"] else f"f={r['f_family']}"
            by_grid.setdefault(key, []).append((int(r["n"]), float(r["e_w"])))
        for key, pts in sorted(by_grid.items()):
            pts.sort()
            xs, ys = zip(*pts)
            plt.loglog(xs, ys, marker="o", label=key)
        plt.xlabel("horizon n")
        plt.ylabel("value gap e_w")
    plt.legend()
    plt.tight_layout()
    out = path.rsplit(".", 1)[0] + ".png"
    plt.savefig(out, dpi=150)
    print(out)


if __name__ == "__main__":
    if len(sys.argv) != 2:
        sys.exit(f"usage: {sys.argv[0]} <csv>")
    main(sys.argv[1])
