"""Sweep random stochastic maps and compare the three Markov conditions.

    python3 scripts/markov_sweep.py --count 50 --seed 1
"""
from __future__ import annotations

import argparse
from dataclasses import dataclass

import numpy as np

from markovfactor.channel import markov_check
from markovfactor.fixtures import centralizer_mixture, random_flip_average


@dataclass
class SweepConfig:
    count: int = 20
    seed: int = 0
    terms: int = 3


def sweep(cfg: SweepConfig) -> dict:
    rng = np.random.default_rng(cfg.seed)
    rows = []
    for k in range(cfg.count):
        for family, build in (("mixture", lambda: centralizer_mixture(rng, cfg.terms)), ("flip", lambda: random_flip_average(rng))):
            rep = markov_check(build(), strict=False)
            rows.append((family, k, rep.consistent, rep.markov, rep.residuals()))
    return {"rows": rows}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=SweepConfig.count, help="maps per family")
    ap.add_argument("--seed", type=int, default=SweepConfig.seed)
    ap.add_argument("--terms", type=int, default=SweepConfig.terms, help="unitaries per mixture")
    cfg = SweepConfig(**vars(ap.parse_args(argv)))
    rows = sweep(cfg)["rows"]
    print(f"{'family':<8}{'#':>4}  {'markov':<7}{'agree':<6}{'(i)':>10}{'(ii)':>10}{'(iii)':>10}")
    for family, k, agree, markov, res in rows:
        r = list(res.values())
        print(f"{family:<8}{k:>4}  {str(markov):<7}{str(agree):<6}{r[0]:>10.2e}{r[1]:>10.2e}{r[2]:>10.2e}")
    agree = sum(r[2] for r in rows)
    good = [max(r[4].values()) for r in rows if r[3]]
    bad = [min(r[4].values()) for r in rows if not r[3]]
    print(f"\nagreement {agree}/{len(rows)}")
    if good and bad:
        print(f"largest Markov residual {max(good):.2e}, smallest non-Markov residual {min(bad):.2e}")


if __name__ == "__main__":
    main()
