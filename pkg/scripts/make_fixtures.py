"""Write the shipped problem-file corpus into fixtures/.

    python3 scripts/make_fixtures.py [outdir]
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np

from markovfactor.fixtures import HADAMARD, SYMMETRIC_T, rotation, PAULI_X


def enc(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[float(x.real) if x.imag == 0 else [float(x.real), float(x.imag)] for x in row] for row in m]


def units(n):
    for i in range(n):
        for j in range(n):
            e = np.zeros((n, n))
            e[i, j] = 1
            yield e


def action(f, n):
    return [enc(f(e)) for e in units(n)]


def space(density, kind="full", generators=None):
    rec = {"ambient_dim": len(density), "density": enc(density), "kind": kind}
    if generators is not None:
        rec["generators"] = [enc(g) for g in generators]
    return rec


def corpus() -> dict:
    rho = np.diag([2 / 3, 1 / 3])
    half = np.eye(2) / 2
    out = {}
    out["minimal"] = {"spaces": {"point": space(np.eye(1))}}
    out["identity"] = {
        "spaces": {"m2": space(rho)},
        "maps": {"id": {"from": "m2", "to": "m2", "action": action(lambda a: a, 2)}},
        "tasks": [{"kind": k, "map": "id"} for k in ("validate", "markov", "dilate", "factorize_deterministic", "gce")],
    }
    T = SYMMETRIC_T
    out["abelian"] = {
        "spaces": {"source": space(half, "diagonal"), "target": space(half, "diagonal")},
        "maps": {"chain": {"from": "source", "to": "target", "action": [enc(np.diag(T[:, j])) for j in range(2)]}},
        "tasks": [{"kind": k, "map": "chain"} for k in ("markov", "dilate", "factorize_abelian")],
    }
    out["deterministic"] = {
        "spaces": {
            "m2": space(half),
            "m4": space(np.eye(4) / 4),
            "m2_generated": space(half, "generated", [np.array([[0, 1], [0, 0]])]),
        },
        "maps": {
            "hadamard": {"from": "m2", "to": "m2", "kraus": [enc(HADAMARD)]},
            "ampliation": {"from": "m2", "to": "m4", "action": action(lambda a: np.kron(a, np.eye(2)), 2)},
            "generated_id": {"from": "m2_generated", "to": "m2", "action": action(lambda a: a, 2)},
        },
        "tasks": [
            {"kind": "factorize_deterministic", "map": "hadamard"},
            {"kind": "gce", "map": "hadamard"},
            {"kind": "factorize_deterministic", "map": "ampliation"},
            {"kind": "gce", "map": "ampliation"},
            {"kind": "dilate", "map": "generated_id"},
        ],
    }
    w = rotation(0.4)
    y = w @ PAULI_X @ w.conj().T
    out["non_markov"] = {
        "spaces": {"m2": space(half), "tilted": space(w @ np.diag([0.8, 0.2]) @ w.conj().T)},
        "maps": {"flip": {"from": "m2", "to": "tilted", "action": action(lambda a: (a + y @ a @ y) / 2, 2)}},
        "tasks": [{"kind": "validate", "map": "flip"}, {"kind": "markov", "map": "flip"}],
    }
    dep = lambda a: 0.5 * a + 0.5 * np.trace(a) / 2 * np.eye(2)  # noqa: E731
    out["wrong_jhat"] = {
        "spaces": {"m2": space(half)},
        "maps": {"depolarizing": {"from": "m2", "to": "m2", "action": action(dep, 2)}},
        "tasks": [
            {"kind": "dilate", "map": "depolarizing"},
            {"kind": "certify_jhat", "map": "depolarizing", "jhat": {"convention": "plain-conjugation"}},
            {"kind": "gce", "map": "depolarizing", "jhat": {"convention": "plain-conjugation"}},
        ],
    }
    return out


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    outdir = Path(argv[0]) if argv else Path(__file__).resolve().parent.parent / "fixtures"
    outdir.mkdir(parents=True, exist_ok=True)
    for name, prob in corpus().items():
        (outdir / f"{name}.json").write_text(json.dumps(prob, indent=1) + "\n")
        print(f"wrote {outdir / name}.json")


if __name__ == "__main__":
    main()
