"""Acceptance criteria, each at its stated tolerance.

Every test records one pass/fail line, printed in the terminal summary.
Run alone with ``pytest tests/test_acceptance.py -v``.
"""
import subprocess
import sys
import time
from pathlib import Path

import numpy as np

from markovfactor.algebra import full_algebra, generate
from markovfactor.channel import markov_check, require_markov, tensor_state_factorization
from markovfactor.factorize import JHat, certify, deterministic_factorize, jhat_abelian, jhat_deterministic
from markovfactor.fixtures import (
    FIXTURES,
    centralizer_mixture,
    coupling,
    depolarizing,
    random_classical,
    random_flip_average,
)
from markovfactor.gce import gce_factorization
from markovfactor.linalg import AntilinearOp
from markovfactor.space import ProbabilitySpace, modular_residuals
from markovfactor.stinespring import dilate, verify_relations

from conftest import record_criterion

CORPUS = Path(__file__).resolve().parent.parent / "fixtures"


def test_criterion_1_markov_conditions_agree():
    start = time.perf_counter()
    rng = np.random.default_rng(2024)
    good = [markov_check(centralizer_mixture(rng), strict=False) for _ in range(10)]
    bad = [markov_check(random_flip_average(rng), strict=False) for _ in range(10)]
    elapsed = time.perf_counter() - start
    agree = all(r.consistent for r in good + bad)
    verdicts = all(r.markov for r in good) and not any(r.markov for r in bad)
    gaps = []
    for key in ("prop1-i", "prop1-ii", "prop1-iii"):
        gaps.append(min(r.residuals()[key] for r in bad) - max(r.residuals()[key] for r in good))
    gap = min(gaps)
    ok = agree and verdicts and gap >= 1e-3 and elapsed <= 5.0
    record_criterion(1, "Markov condition agreement", ok,
                     f"agreement {'100%' if agree else '<100%'}, gap {gap:.3g}, {elapsed:.2f}s")
    assert agree and verdicts
    assert gap >= 1e-3
    assert elapsed <= 5.0


def test_criterion_2_dilation_relations():
    names = ["identity-trace", "identity-diag", "depolarizing-1/4", "depolarizing-1/2", "depolarizing-1",
             "hadamard", "diagonal-unitary", "ampliation", "symmetric-chain"]
    start = time.perf_counter()
    worst, where = 0.0, ""
    for name in names:
        res = verify_relations(dilate(FIXTURES[name].build()))
        assert res["st5"] is not None, name
        k = max(res, key=res.get)
        if res[k] >= worst:
            worst, where = res[k], f"{name}:{k}"
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-8 and elapsed <= 10.0
    record_criterion(2, "dilation relation suite", ok, f"max residual {worst:.3g} ({where}), {elapsed:.2f}s")
    assert worst <= 1e-8
    assert elapsed <= 10.0


def test_criterion_3_deterministic_factorization():
    lines, ok = [], True
    for name in ("hadamard", "diagonal-unitary", "ampliation"):
        phi = FIXTURES[name].build()
        C1 = deterministic_factorize(phi)
        jh = jhat_deterministic(phi)
        C2 = certify(phi, jh)
        sigma_dim = generate(C1.R.n, list(C1.dilation.sigma)).dim
        recon = max(C1.reconstruction_residual, C2.reconstruction_residual)
        inv = jh.residuals["jhat-involution"]
        good = C1.valid and C2.valid and recon <= 1e-8 and inv <= 1e-9 and C1.R.dim == C2.R.dim == sigma_dim
        ok &= good
        lines.append(f"{name} recon {recon:.2g} inv {inv:.2g} dim R {C2.R.dim}/{sigma_dim}")
    record_criterion(3, "deterministic factorization", ok, "; ".join(lines))
    assert ok


def test_criterion_4_abelian_coupling():
    cases = [("symmetric T", FIXTURES["symmetric-chain"].build()), ("random 3x3", random_classical(3, seed=0))]
    lines, ok = [], True
    for label, phi in cases:
        T = np.real(np.stack([np.diag(img) for img in phi.images], axis=1))
        p2 = np.real(np.diag(phi.target.prob.density))
        C = certify(phi, jhat_abelian(phi))
        pi = coupling(T, p2)
        n2, n1 = pi.shape
        e2 = [np.diag(r) for r in np.eye(n2)]
        e1 = [np.diag(r) for r in np.eye(n1)]
        moments = np.array([[C.moment(f, g) for g in e1] for f in e2])
        err = float(np.abs(moments - pi).max())
        good = C.valid and C.minimal and err <= 1e-10
        ok &= good
        lines.append(f"{label} valid={C.valid} minimal={C.minimal} moment error {err:.2g}")
    record_criterion(4, "abelian coupling oracle", ok, "; ".join(lines))
    assert ok


def test_criterion_5_tensor_state():
    f = tensor_state_factorization(ProbabilitySpace(full_algebra(2), np.diag([2 / 3, 1 / 3])))
    worst = max(f.residuals["beta-sharp-alpha"], f.residuals["alpha-sharp-beta"])
    ok = worst <= 1e-12
    record_criterion(5, "tensor-state factorization", ok, f"max residual {worst:.3g}")
    assert ok


def test_criterion_6_conditional_expectations():
    canonical = [n for n, f in sorted(FIXTURES.items()) if f.deterministic or f.abelian]
    cce = grids = cor = 0.0
    both_ways = True
    certified = True
    for name in canonical:
        phi = FIXTURES[name].build()
        jh = jhat_deterministic(phi) if FIXTURES[name].deterministic else jhat_abelian(phi)
        rep = gce_factorization(phi, jh)
        r = rep.residuals
        cce = max(cce, r["CCE-1"], r["CCE-2"])
        grids = max(grids, r.get("prop5-adjoint-1", np.inf), r.get("prop5-adjoint-2", np.inf))
        cor = max(cor, r.get("cor1-sharp", np.inf))
        both_ways &= rep.remark1["remark1-fwd"] and rep.remark1["remark1-bwd"]
        certified &= rep.ok
    phi = depolarizing(0.5)
    D = dilate(require_markov(phi))
    wrong = gce_factorization(phi, JHat(AntilinearOp(np.eye(D.L_dim)), "user-supplied"))
    wrong_cce = max(wrong.residuals["CCE-1"], wrong.residuals["CCE-2"])
    control = wrong_cce >= 1e-3 and wrong.certificate is None
    both_ways &= wrong.remark1["remark1-fwd"] and wrong.remark1["remark1-bwd"]
    ok = cce <= 1e-9 and grids <= 1e-8 and cor <= 1e-8 and both_ways and certified and control
    record_criterion(6, "conditional-expectation route", ok,
                     f"{len(canonical)} fixtures: CCE {cce:.2g}, adjointness {grids:.2g}, sharp via E_1 {cor:.2g}, "
                     f"both directions {both_ways}; wrong Jhat CCE {wrong_cce:.3g}, certificate {wrong.certificate is not None}")
    assert ok


def test_criterion_7_modular_suite():
    worst, where = 0.0, ""
    count = 0
    for name, f in sorted(FIXTURES.items()):
        phi = f.build()
        for side, S in (("source", phi.source), ("target", phi.target)):
            for label, space in ((side, S), (side + "-commutant", S.commutant_space)):
                res = modular_residuals(space)
                count += 1
                k = max(res, key=res.get)
                if res[k] >= worst:
                    worst, where = res[k], f"{name}/{label}:{k}"
    ok = worst <= 1e-9
    record_criterion(7, "modular theory suite", ok, f"{count} spaces, max residual {worst:.3g} ({where})")
    assert ok


def test_criterion_8_cli_determinism():
    files = sorted(CORPUS.glob("*.json"))
    start = time.perf_counter()
    outputs = {p.name: set() for p in files}
    for _ in range(3):
        for p in files:
            proc = subprocess.run([sys.executable, "-m", "markovfactor", str(p)], capture_output=True, check=False)
            assert proc.returncode in (0, 1), proc.stderr.decode()
            outputs[p.name].add(proc.stdout)
    elapsed = time.perf_counter() - start
    identical = all(len(v) == 1 for v in outputs.values())
    ok = identical and elapsed <= 60.0
    record_criterion(8, "CLI determinism", ok,
                     f"{len(files)} files x 3 runs byte-identical={identical}, {elapsed:.1f}s")
    assert ok
