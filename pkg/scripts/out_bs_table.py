"""Table of Out(BS(1,n)): finiteness, order (k = 1) and free rank, checked against 2l|n-1|."""

import argparse
from dataclasses import dataclass

from farhull import bsaut


@dataclass
class TableConfig:
    max_abs_n: int = 30
    cap: int = 1_000_000


def run(cfg: TableConfig) -> None:
    print(f"{'n':>5} {'primes':<14} {'finite':>6} {'order':>6} {'2l|n-1|':>8} {'rank':>5}")
    for n in range(-cfg.max_abs_n, cfg.max_abs_n + 1):
        if abs(n) < 2:
            continue
        primes = bsaut.bs_primes(n)
        out = bsaut.out_structure(n, cap=cfg.cap)
        formula = ""
        if len(primes) == 1:
            _, ell = bsaut.inn_generator_data(n)
            formula = str(2 * ell[0] * abs(n - 1))
        order = "" if out.order is None else str(out.order)
        print(f"{n:>5} {str(list(primes)):<14} {str(out.finite):>6} {order:>6} {formula:>8} {out.free_rank:>5}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-abs-n", type=int, default=30)
    ap.add_argument("--cap", type=int, default=1_000_000)
    args = ap.parse_args()
    run(TableConfig(args.max_abs_n, args.cap))
