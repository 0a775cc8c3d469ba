"""Degree, class degree and decomposition checks over a seeded random corpus.

    python3 scripts/corpus_sweep.py --seeds 0 1 2 --count 20 --out sweep.json
"""

import argparse
import json
import time
from dataclasses import asdict, dataclass, field

from factorcodes.blockcode import normalize_code
from factorcodes.classdeg import class_degree_upper
from factorcodes.decomp import build_decomposition
from factorcodes.fixtures import random_corpus
from factorcodes.fto import degree


@dataclass(frozen=True)
class SweepConfig:
    seeds: tuple = (0, 1, 2, 3, 4, 5)
    count: int = 10
    max_symbols: int = 5
    max_states: int = 5


@dataclass
class Row:
    name: str
    domain_symbols: int
    finite_to_one: bool
    degree: int | None
    class_degree: int
    trace: list = field(default_factory=list)
    decomposition_ok: bool = False
    confirmed: bool = False
    seconds: float = 0.0


def sweep(cfg: SweepConfig) -> list:
    rows = []
    for s in cfg.seeds:
        for name, code in random_corpus(s, cfg.count, cfg.max_symbols, cfg.max_states):
            t = time.perf_counter()
            n = normalize_code(code).pi
            deg = degree(n, strict=False)
            cd = class_degree_upper(n)
            v = build_decomposition(code).verification
            rows.append(Row(name, len(n.domain.alphabet), deg.finite_to_one,
                            deg.degree if deg.finite_to_one else None, cd.value,
                            [x for x in cd.trace if x is not None], v.ok,
                            v.stabilization_confirmed, round(time.perf_counter() - t, 4)))
    return rows


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, nargs="+", default=list(SweepConfig.seeds))
    ap.add_argument("--count", type=int, default=SweepConfig.count)
    ap.add_argument("--max-symbols", type=int, default=SweepConfig.max_symbols)
    ap.add_argument("--max-states", type=int, default=SweepConfig.max_states)
    ap.add_argument("--out", help="write the rows as JSON here")
    a = ap.parse_args()
    cfg = SweepConfig(tuple(a.seeds), a.count, a.max_symbols, a.max_states)
    rows = sweep(cfg)
    print(f"{'code':<12} {'|A|':>3} {'fto':>3} {'deg':>3} {'cd':>3} {'ok':>3} {'s':>7}  trace")
    for r in rows:
        print(f"{r.name:<12} {r.domain_symbols:>3} {'y' if r.finite_to_one else 'n':>3} "
              f"{r.degree if r.degree is not None else '-':>3} {r.class_degree:>3} "
              f"{'y' if r.decomposition_ok else 'n':>3} {r.seconds:>7.3f}  {r.trace}")
    good = sum(r.decomposition_ok and r.confirmed for r in rows)
    print(f"{good}/{len(rows)} decompositions verified and confirmed")
    if a.out:
        with open(a.out, "w", encoding="utf-8") as fh:
            json.dump({"config": asdict(cfg), "rows": [asdict(r) for r in rows]}, fh, indent=2)


if __name__ == "__main__":
    main()
