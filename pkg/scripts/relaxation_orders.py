"""Relaxation value and optimum as the order k grows, for a built-in fixture.

    python3 scripts/relaxation_orders.py --fixture merge --orders 1 2 3 4
    python3 scripts/relaxation_orders.py --fixture golden-merge --beta 0.5

The target is the equilibrium state of beta * 1[y_0 = 1] on the image; the
domain potential is zero. On finite-to-one fixtures the value is compared
with the entropy of the unique lift.
"""

import argparse
import time
from dataclasses import dataclass

from factorcodes.blockcode import FactorTriple, normalize_code
from factorcodes.fixtures import FIXTURES, fixture
from factorcodes.fto import is_finite_to_one
from factorcodes.relopt import build_relaxation, solve_relaxation, support_report
from factorcodes.thermo import Potential, entropy, tuncel_lift


@dataclass(frozen=True)
class OrderConfig:
    fixture: str = "merge"
    orders: tuple = (1, 2, 3)
    beta: float = 0.0
    seeds: int = 10


def run(cfg: OrderConfig) -> None:
    code = fixture(cfg.fixture)
    Y = FactorTriple.of(code).Y
    if cfg.beta and "1" in Y.alphabet:
        psi = Potential.indicator(Y, "1", cfg.beta)
    else:
        psi = Potential.constant(Y)
    # on a finite-to-one code the fiber is the single lift, so every order returns its entropy
    lift_entropy = None
    if is_finite_to_one(normalize_code(code).pi)[0]:
        lift_entropy = entropy(tuncel_lift(code, psi).lift)
    print(f"fixture {cfg.fixture}; image alphabet {list(Y.alphabet)}; beta {cfg.beta}")
    print(f"{'k':>2} {'value':>20} {'seed spread':>12} {'min prob':>10} {'support':>8} {'s':>6}")
    prev = None
    for k in cfg.orders:
        t = time.perf_counter()
        r = solve_relaxation(build_relaxation(code, psi, None, k), seeds=cfg.seeds)
        v = support_report(r)
        drop = "" if prev is None else f"  drop {prev - r.value:.2e}"
        print(f"{k:>2} {r.value:>20.15f} {r.max_pairwise_distance:>12.1e} {v.min_probability:>10.4f} "
              f"{'full' if v.full_support else 'partial':>8} {time.perf_counter() - t:>6.2f}{drop}")
        prev = r.value
    if lift_entropy is not None:
        print(f"finite-to-one: entropy of the unique lift {lift_entropy:.15f}, "
              f"gap {abs(prev - lift_entropy):.1e}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--fixture", default=OrderConfig.fixture, choices=sorted(FIXTURES))
    ap.add_argument("--orders", type=int, nargs="+", default=list(OrderConfig.orders))
    ap.add_argument("--beta", type=float, default=OrderConfig.beta)
    ap.add_argument("--seeds", type=int, default=OrderConfig.seeds)
    a = ap.parse_args()
    run(OrderConfig(a.fixture, tuple(a.orders), a.beta, a.seeds))


if __name__ == "__main__":
    main()
