"""Factorization certificates and conditional expectations for every named fixture.

    python3 scripts/factor_gallery.py
"""
from __future__ import annotations

import argparse
from dataclasses import dataclass

from markovfactor.channel import require_markov
from markovfactor.factorize import certify, jhat_abelian, jhat_deterministic
from markovfactor.fixtures import FIXTURES
from markovfactor.gce import gce_factorization
from markovfactor.stinespring import dilate, verify_relations


@dataclass
class GalleryConfig:
    only: str | None = None


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--only", default=None, help="run a single fixture")
    cfg = GalleryConfig(**vars(ap.parse_args(argv)))
    print(f"{'fixture':<18}{'dim L':>6}{'relations':>11}{'dim R':>7}{'valid':>7}{'minimal':>9}{'CCE':>10}")
    for name, f in sorted(FIXTURES.items()):
        if cfg.only and name != cfg.only:
            continue
        phi = f.build()
        D = dilate(require_markov(phi))
        rel = max(verify_relations(dilate(phi)).values())
        if not (f.deterministic or f.abelian):
            print(f"{name:<18}{D.L_dim:>6}{rel:>11.1e}{'-':>7}{'-':>7}{'-':>9}{'-':>10}")
            continue
        jh = jhat_deterministic(phi) if f.deterministic else jhat_abelian(phi)
        C = certify(phi, jh, D=D)
        rep = gce_factorization(phi, jh)
        cce = max(rep.residuals["CCE-1"], rep.residuals["CCE-2"])
        print(f"{name:<18}{D.L_dim:>6}{rel:>11.1e}{C.R.dim:>7}{str(C.valid):>7}{str(C.minimal):>9}{cce:>10.1e}")


if __name__ == "__main__":
    main()
