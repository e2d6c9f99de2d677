"""Batch verification of problem files.

    verify problem.json [--tol X] [--format json|text] [--out PATH] [--timing]

Exit status: 0 when every task is green, 1 when some residual exceeds the
tolerance (or a task could not run), 2 on input errors.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import jsonschema
import numpy as np

from .algebra import diagonal_algebra, full_algebra, generate
from .channel import StochasticMap, make_map, map_from_kraus, markov_check, require_markov
from .factorize import JHat, certify, deterministic_factorize, jhat_abelian, jhat_deterministic, sufficient_check
from .gce import gce_factorization
from .linalg import DEFAULT_TOL, AntilinearOp, Tolerance, matrix_units
from .relations import RELATIONS
from .space import ProbabilitySpace, StandardSpace, gns, modular_residuals
from .stinespring import dilate, verify_relations

TASK_KINDS = ("validate", "markov", "dilate", "factorize_deterministic", "factorize_abelian", "certify_jhat", "gce")
CONVENTIONS = ("mat_conj", "conj_mat", "plain-conjugation")

_SCALAR = {
    "oneOf": [
        {"type": "number"},
        {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
    ]
}
_MATRIX = {"type": "array", "minItems": 1, "items": {"type": "array", "minItems": 1, "items": _SCALAR}}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "spaces": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "additionalProperties": False,
                "required": ["ambient_dim", "density"],
                "properties": {
                    "kind": {"enum": ["full", "diagonal", "generated"]},
                    "ambient_dim": {"type": "integer", "minimum": 1},
                    "generators": {"type": "array", "items": _MATRIX},
                    "density": _MATRIX,
                },
            },
        },
        "maps": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "additionalProperties": False,
                "required": ["from", "to"],
                "properties": {
                    "from": {"type": "string"},
                    "to": {"type": "string"},
                    "action": {"type": "array", "items": _MATRIX},
                    "kraus": {"type": "array", "minItems": 1, "items": _MATRIX},
                },
                "oneOf": [{"required": ["action"]}, {"required": ["kraus"]}],
            },
        },
        "tasks": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["kind", "map"],
                "properties": {
                    "kind": {"enum": list(TASK_KINDS)},
                    "map": {"type": "string"},
                    "jhat": {
                        "type": "object",
                        "additionalProperties": False,
                        "required": ["convention"],
                        "properties": {"matrix": _MATRIX, "convention": {"enum": list(CONVENTIONS)}},
                    },
                },
            },
        },
        "tolerances": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "rank_cut": {"type": "number", "exclusiveMinimum": 0},
                "residual_pass": {"type": "number", "exclusiveMinimum": 0},
            },
        },
    },
}


class ProblemError(ValueError):
    """Input error: malformed file, schema violation or unresolved reference."""


@dataclass(frozen=True)
class Task:
    kind: str
    map: str
    jhat: Optional[dict] = None


@dataclass
class ProblemFile:
    spaces: dict
    maps: dict
    tasks: list
    tol: Tolerance
    raw: dict = field(repr=False, default_factory=dict)


def _path(parts) -> str:
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def _matrix(rows, where: str) -> np.ndarray:
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ProblemError(f"{where}: rows have different lengths {sorted(widths)}")
    return np.array([[complex(x[0], x[1]) if isinstance(x, list) else complex(x) for x in r] for r in rows])


def _square(m: np.ndarray, n: int, where: str) -> np.ndarray:
    if m.shape != (n, n):
        raise ProblemError(f"{where}: expected a {n}x{n} matrix, got {m.shape[0]}x{m.shape[1]}")
    return m


def _tolerance(raw: dict, override: Optional[float]) -> Tolerance:
    values = dict(raw.get("tolerances", {}))
    env = os.environ.get("VERIFY_TOL")
    if env is not None:
        try:
            values["residual_pass"] = float(env)
        except ValueError:
            raise ProblemError(f"VERIFY_TOL is not a number: {env!r}") from None
    if override is not None:
        values["residual_pass"] = override
    try:
        return Tolerance(**{**{"rank_cut": DEFAULT_TOL.rank_cut, "residual_pass": DEFAULT_TOL.residual_pass}, **values})
    except ValueError as exc:
        raise ProblemError(str(exc)) from None


def _build_space(name: str, rec: dict, tol: Tolerance) -> StandardSpace:
    where = f"$.spaces.{name}"
    n = rec["ambient_dim"]
    kind = rec.get("kind", "full")
    if kind == "full":
        alg = full_algebra(n)
    elif kind == "diagonal":
        alg = diagonal_algebra(n)
    else:
        gens = [_square(_matrix(g, f"{where}.generators[{i}]"), n, f"{where}.generators[{i}]")
                for i, g in enumerate(rec.get("generators", []))]
        alg = generate(n, gens, tol)
    rho = _square(_matrix(rec["density"], f"{where}.density"), n, f"{where}.density")
    try:
        return gns(ProbabilitySpace(alg, rho, tol), tol)
    except ValueError as exc:
        raise ProblemError(f"{where}: {exc}") from None


def _build_map(name: str, rec: dict, spaces: dict, tol: Tolerance) -> StochasticMap:
    where = f"$.maps.{name}"
    for side in ("from", "to"):
        if rec[side] not in spaces:
            raise ProblemError(f"{where}.{side}: unknown space {rec[side]!r}")
    S1, S2 = spaces[rec["from"]], spaces[rec["to"]]
    n1, n2 = S1.algebra.n, S2.algebra.n
    try:
        if "kraus" in rec:
            ks = [_matrix(k, f"{where}.kraus[{i}]") for i, k in enumerate(rec["kraus"])]
            for i, k in enumerate(ks):
                if k.shape != (n1, n2):
                    raise ProblemError(f"{where}.kraus[{i}]: expected {n1}x{n2}, got {k.shape[0]}x{k.shape[1]}")
            return map_from_kraus(S1, S2, ks, tol)
        imgs = [_square(_matrix(m, f"{where}.action[{i}]"), n2, f"{where}.action[{i}]")
                for i, m in enumerate(rec["action"])]
        diagonal_source = all(np.allclose(b, np.diag(np.diag(b))) for b in S1.algebra.basis)
        if len(imgs) == n1 * n1:
            units = matrix_units(n1)
        elif len(imgs) == n1 and diagonal_source:
            units = np.stack([np.diag(e) for e in np.eye(n1)])
        else:
            raise ProblemError(
                f"{where}.action: expected {n1 * n1} images of matrix units"
                + (f" or {n1} images of diagonal units" if diagonal_source else "")
            )
        table = np.stack(imgs)

        def action(x):
            return np.einsum("k,kij->ij", np.array([np.vdot(u, x) for u in units]), table)

        return make_map(S1, S2, action, tol)
    except ProblemError:
        raise
    except ValueError as exc:
        raise ProblemError(f"{where}: {exc}") from None


def parse_problem(path, tol_override: Optional[float] = None) -> ProblemFile:
    """Read, validate and build a problem file."""
    text = Path(path).read_text()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return build_problem(raw, tol_override)


def build_problem(raw: dict, tol_override: Optional[float] = None) -> ProblemFile:
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(raw), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        raise ProblemError(f"{_path(err.absolute_path)}: {err.message}")
    tol = _tolerance(raw, tol_override)
    spaces = {k: _build_space(k, v, tol) for k, v in sorted(raw.get("spaces", {}).items())}
    maps = {k: _build_map(k, v, spaces, tol) for k, v in sorted(raw.get("maps", {}).items())}
    tasks = []
    for i, t in enumerate(raw.get("tasks", [])):
        if t["map"] not in maps:
            raise ProblemError(f"$.tasks[{i}].map: unknown map {t['map']!r}")
        if t["kind"] == "certify_jhat" and "jhat" not in t:
            raise ProblemError(f"$.tasks[{i}]: certify_jhat needs a jhat")
        jh = t.get("jhat")
        if jh and jh["convention"] != "plain-conjugation" and "matrix" not in jh:
            raise ProblemError(f"$.tasks[{i}].jhat: convention {jh['convention']!r} needs a matrix")
        tasks.append(Task(t["kind"], t["map"], jh))
    return ProblemFile(spaces, maps, tasks, tol, raw)


def _user_jhat(entry: dict, L_dim: int) -> JHat:
    conv = entry["convention"]
    if conv == "plain-conjugation":
        mat = np.eye(L_dim, dtype=complex)
    else:
        mat = _matrix(entry["matrix"], "jhat.matrix")
        if mat.shape != (L_dim, L_dim):
            raise ValueError(f"jhat must be {L_dim}x{L_dim}, got {mat.shape[0]}x{mat.shape[1]}")
        if conv == "conj_mat":
            mat = np.conj(mat)
    return JHat(AntilinearOp(mat), "user-supplied")


def _canonical_jhat(phi: StochasticMap, tol: Tolerance) -> JHat:
    if phi.deterministic:
        return jhat_deterministic(phi, tol)
    return jhat_abelian(phi, tol)


def _certificate_summary(C) -> dict:
    out = {"valid": C.valid, "dim_R": C.R.dim, "omega_separating": C.omega_separating,
           "reconstruction": _clean(C.reconstruction_residual), "provenance": C.provenance}
    out["minimal"] = C.minimal if C.valid else None
    return out


def _run_task(task: Task, phi: StochasticMap, tol: Tolerance) -> dict:
    rec: dict = {"residuals": {}, "flags": {}}
    res = rec["residuals"]
    if task.kind == "validate":
        res.update({"unital": phi.unital.residual, "cp": phi.cp.residual, "state-preserving": phi.state_preserving.residual})
        for side, S in (("source", phi.source), ("target", phi.target)):
            for k, v in modular_residuals(S).items():
                res[k] = max(res.get(k, 0.0), v)
        rec["flags"] = {"stochastic": phi.stochastic, "deterministic": phi.deterministic}
    elif task.kind == "markov":
        rep = markov_check(phi, tol, strict=False)
        res.update(rep.residuals())
        rec["flags"] = {"markov": rep.markov, "consistent": rep.consistent,
                        "cond_adjoint": bool(rep.cond_adjoint.value), "cond_modular": bool(rep.cond_modular.value),
                        "cond_J": bool(rep.cond_J.value)}
        rec["informational"] = rep.consistent
    elif task.kind == "dilate":
        D = dilate(phi, tol)
        res.update({k: v for k, v in verify_relations(D, tol).items() if v is not None})
        rec["flags"] = {"L_dim": D.L_dim}
    elif task.kind == "factorize_deterministic":
        C = deterministic_factorize(phi, tol)
        res.update(C.residuals)
        rec["certificate"] = _certificate_summary(C)
    elif task.kind in ("factorize_abelian", "certify_jhat"):
        if task.kind == "factorize_abelian":
            jh = jhat_abelian(phi, tol)
            res.update(jh.residuals)
            C = certify(phi, jh, tol)
        else:
            D = dilate(require_markov(phi, tol), tol)
            jh = _user_jhat(task.jhat, D.L_dim)
            C = certify(phi, jh, tol, D=D)
        res.update(C.residuals)
        suff = sufficient_check(C.dilation, jh, C.beta_images, tol, certificate=C)
        rec["flags"] = {"sufficient": suff.holds}
        rec["certificate"] = _certificate_summary(C)
    elif task.kind == "gce":
        if task.jhat is not None:
            D = dilate(require_markov(phi, tol), tol)
            jh = _user_jhat(task.jhat, D.L_dim)
        else:
            jh = _canonical_jhat(phi, tol)
        rep = gce_factorization(phi, jh, tol)
        res.update(rep.residuals)
        res["remark1-fwd"] = 0.0 if rep.remark1["remark1-fwd"] else 1.0
        res["remark1-bwd"] = 0.0 if rep.remark1["remark1-bwd"] else 1.0
        rec["flags"] = {"cce": rep.cce_pass, "certificate_emitted": rep.certificate is not None}
        if rep.certificate is not None:
            rec["certificate"] = _certificate_summary(rep.certificate)
    return rec


def _clean(v):
    v = float(v)
    if not math.isfinite(v):
        return None
    return float(f"{v:.3g}")


def run(problem: ProblemFile, timing: bool = False) -> dict:
    """Execute every task; a failing task never stops the others."""
    tol = problem.tol
    records = []
    for i, task in enumerate(problem.tasks):
        start = time.perf_counter()
        base = {"index": i, "kind": task.kind, "map": task.map, "tolerance": tol.residual_pass}
        try:
            rec = _run_task(task, problem.maps[task.map], tol)
        except Exception as exc:  # noqa: BLE001 -- reported per task
            base.update({"status": "error", "error": f"{type(exc).__name__}: {exc}", "residuals": {}, "failing": []})
            records.append(base)
            continue
        residuals = {}
        failing = []
        for k, v in rec["residuals"].items():
            if k not in RELATIONS:
                raise KeyError(f"unregistered relation name {k!r}")
            c = _clean(v)
            residuals[k] = c
            if c is None or float(v) > tol.residual_pass:
                failing.append(k)
        if rec.get("informational"):
            # three agreeing conditions are a verdict (Markov or not), not a failure
            failing = [k for k in failing if not k.startswith("prop1-")]
        base.update({k: v for k, v in rec.items() if k not in ("residuals", "informational")})
        base["residuals"] = residuals
        base["failing"] = sorted(failing)
        cert = rec.get("certificate")
        green = not failing and (cert is None or cert["valid"])
        base["status"] = "pass" if green else "fail"
        if timing:
            base["wall_time"] = round(time.perf_counter() - start, 4)
        records.append(base)
    if not records:
        return {}
    return {"tasks": records, "summary": {"tasks": len(records), "pass": sum(r["status"] == "pass" for r in records)}}


def emit(report: dict, fmt: str = "json") -> bytes:
    if fmt == "json":
        return (json.dumps(report, sort_keys=True, indent=2) + "\n").encode()
    if not report:
        return b""
    lines = []
    for rec in report["tasks"]:
        head = f"[{rec['index']}] {rec['kind']}  map={rec['map']}  {rec['status'].upper()}"
        lines.append(head)
        if rec["status"] == "error":
            lines.append(f"    {rec['error']}")
            lines.append("")
            continue
        tol = rec["tolerance"]
        lines.append(f"    {'relation':<24}{'residual':>12}{'tol':>10}  ok")
        for k in sorted(rec["residuals"]):
            v = rec["residuals"][k]
            shown = "n/a" if v is None else f"{v:.3g}"
            ok = "no" if k in rec["failing"] else "yes"
            lines.append(f"    {k:<24}{shown:>12}{tol:>10.0e}  {ok}")
        for k, v in sorted(rec.get("flags", {}).items()):
            lines.append(f"    flag {k} = {v}")
        if rec.get("certificate"):
            c = rec["certificate"]
            lines.append("    certificate " + ", ".join(f"{k}={c[k]}" for k in sorted(c)))
        lines.append("")
    s = report["summary"]
    lines.append(f"{s['pass']}/{s['tasks']} tasks green")
    return ("\n".join(lines) + "\n").encode()


def exit_code(report: dict) -> int:
    if not report:
        return 0
    return 0 if all(r["status"] == "pass" for r in report["tasks"]) else 1


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="verify", description="Verify Markov maps and factorization certificates.")
    ap.add_argument("problem", help="problem file (JSON)")
    ap.add_argument("--tol", type=float, default=None, help="residual tolerance (overrides file and VERIFY_TOL)")
    ap.add_argument("--format", choices=("json", "text"), default="json")
    ap.add_argument("--out", default=None, help="write the report here instead of stdout")
    ap.add_argument("--timing", action="store_true", help="include per-task wall time (breaks byte identity)")
    args = ap.parse_args(argv)
    try:
        problem = parse_problem(args.problem, args.tol)
    except (ProblemError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    report = run(problem, timing=args.timing)
    data = emit(report, args.format)
    if args.out:
        Path(args.out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
    return exit_code(report)


if __name__ == "__main__":
    raise SystemExit(main())
