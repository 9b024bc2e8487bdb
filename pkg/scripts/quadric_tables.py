"""Print the quadric ring multiplication tables and their relation checks.

    python3 scripts/quadric_tables.py --n 3 --beta-bound 16 --specialize 0
"""
import argparse
from dataclasses import dataclass

from ckpfaffian.quadric import build_quadric_ring, verify_relations


@dataclass(frozen=True)
class QuadricConfig:
    n_max: int = 3
    beta_bound: int = 16
    specialize: int | None = None


def run(cfg: QuadricConfig):
    for n in range(1, cfg.n_max + 1):
        ring = build_quadric_ring(n, cfg.beta_bound)
        if cfg.specialize is not None:
            ring = ring.specialize(cfg.specialize)
        labels = ring.labels()
        print(f"n={n}  basis: {', '.join(labels)}")
        for (i, j), coords in sorted(ring.table.items()):
            if i <= j:
                print(f"  {labels[i]} * {labels[j]} = {ring.element(coords)!r}")
        report = verify_relations(ring)
        print(f"  ok={report.ok} stable={report.stable} failures={report.failures}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=3)
    ap.add_argument("--beta-bound", type=int, default=16)
    ap.add_argument("--specialize", type=int, default=None)
    args = ap.parse_args()
    run(QuadricConfig(args.n, args.beta_bound, args.specialize))


if __name__ == "__main__":
    main()
