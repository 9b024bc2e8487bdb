"""Tabulate locus classes for every strict partition and compare the two pipelines.

    python3 scripts/tabulate_classes.py --n 3 --trunc 6 --beta zero
"""
import argparse
import time
from dataclasses import dataclass

from ckpfaffian.cli import BETA_MODES, make_provider
from ckpfaffian.loci import class_via_pfaffian, class_via_product, strict_partitions


@dataclass(frozen=True)
class TableConfig:
    n: int = 3
    trunc: int = 6
    beta: str = "symbolic"
    model: str = "point"


def run(cfg: TableConfig):
    rows = []
    for lam in strict_partitions(cfg.n):
        provider = make_provider(cfg.model, cfg.n, max(lam.r, 1), cfg.trunc, cfg.beta)
        start = time.perf_counter()
        prod = class_via_product(lam, provider)
        pf = class_via_pfaffian(lam, provider)
        rows.append((str(lam), prod == pf, len(prod.terms), time.perf_counter() - start, prod))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=3)
    ap.add_argument("--trunc", type=int, default=6)
    ap.add_argument("--beta", choices=list(BETA_MODES), default="symbolic")
    ap.add_argument("--model", choices=["point", "free"], default="point")
    ap.add_argument("--show", action="store_true", help="print the classes themselves")
    args = ap.parse_args()
    cfg = TableConfig(args.n, args.trunc, args.beta, args.model)
    print(f"{'lambda':>10} {'equal':>6} {'terms':>6} {'seconds':>8}")
    for lam, equal, terms, secs, value in run(cfg):
        print(f"{lam:>10} {str(equal):>6} {terms:>6} {secs:8.3f}")
        if args.show:
            print(f"    {value!r}")


if __name__ == "__main__":
    main()
