"""Batch command-line front end.

Every invocation writes one JSON ``RunReport`` (to ``--out`` or stdout) and
exits 0 on pass, 1 on a violated check and 2 on usage or input errors.
Per-record results sit in ``payload["records"]``.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict, dataclass

import numpy as np

from . import exotic, io, lounesto, rim
from .bilinears import ZERO_TOL, compute_bilinears, fierz_residuals, fpk_defect
from .clifford import build_gamma_basis, random_spinors

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
CONVENTION_FLAGS = {"dirac": "standard-Dirac", "chiral": "chiral"}
FIERZ_TOL = 1e-10
PREDICT_TOL = 1e-8
DEFAULT_A, DEFAULT_B, DEFAULT_M = "0.5+1j", "0.5-0.5j", 1.0


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    convention: str
    tolerance: float
    seed: int
    trials: int
    output_path: str | None
    options: dict

    def __post_init__(self):
        if not self.tolerance > 0:
            raise InputError("--tol must be positive")
        if self.trials < 1:
            raise InputError("--trials must be at least 1")


@dataclass
class RunReport:
    command: str
    config: RunConfig
    outcome: str
    payload: dict
    wall_time: float

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=1, default=_jsonable)


def _jsonable(x):
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, complex):
        return [x.real, x.imag]
    raise TypeError(f"not JSON serialisable: {type(x).__name__}")


def _violation(invariant: str, where, **detail) -> dict:
    return {"invariant": invariant, "input": where, **detail}


def _records(args):
    if not args.inp:
        raise InputError(f"{args.command} needs --in PATH (spinor JSONL)")
    try:
        return io.read_spinors(args.inp)
    except OSError as exc:
        raise InputError(f"cannot read {args.inp}: {exc.strerror}") from None


def _input_errors(recs):
    return [{"line": r.line, "error": r.error} for r in recs if not r.ok]


def _params(args) -> rim.RimParams:
    try:
        return rim.validate_params(complex(args.a.replace(" ", "")), complex(args.b.replace(" ", "")), args.mass)
    except ValueError as exc:
        raise InputError(f"bad RIM parameters: {exc}") from None


def _grid(args) -> exotic.GridSpec:
    try:
        n0, n1 = (int(v) for v in args.grid.lower().split("x"))
        return exotic.GridSpec((n0, n1), args.spacing)
    except ValueError as exc:
        raise InputError(f"bad --grid/--spacing: {exc}") from None


# -- verbs ------------------------------------------------------------------------
# each returns (payload, violations, input_errors)

def cmd_classify(args, cfg, basis):
    recs = _records(args)
    out, bad = [], []
    for r in recs:
        if not r.ok:
            continue
        entry = {"line": r.line, "label": r.label}
        try:
            entry.update(lounesto.classify_spinor(r.psi, basis, cfg.tolerance).to_dict())
        except (lounesto.ClassificationError, ValueError) as exc:
            entry["error"] = str(exc)
            bad.append(_violation("classifiable spinor", r.line, error=str(exc)))
        out.append(entry)
    return {"records": out}, bad, _input_errors(recs)


def cmd_bilinears(args, cfg, basis):
    recs = _records(args)
    out, bad = [], []
    for r in recs:
        if not r.ok:
            continue
        try:
            b = compute_bilinears(r.psi, basis)
        except (ValueError, ArithmeticError) as exc:
            bad.append(_violation("bilinears defined", r.line, error=str(exc)))
            continue
        out.append({"line": r.line, "label": r.label, **b.to_dict()})
    return {"records": out}, bad, _input_errors(recs)


def cmd_fierz(args, cfg, basis):
    tol = args.tol if args.tol is not None else FIERZ_TOL
    if args.inp:
        recs = _records(args)
        good = [r for r in recs if r.ok]
        psis = np.array([r.psi for r in good]).reshape(-1, 4)
        where = [r.line for r in good]
        errors = _input_errors(recs)
    else:
        psis = random_spinors(np.random.default_rng(cfg.seed), cfg.trials)
        where = list(range(cfg.trials))
        errors = []
    if len(psis) == 0:
        return {"records": []}, [], errors or [{"line": None, "error": "no spinors"}]
    rep = fierz_residuals(psis, basis)
    fpk = np.abs(fpk_defect(compute_bilinears(psis, basis)))
    bad = []
    for k in np.flatnonzero((rep.residuals.max(axis=-1) >= tol) | (fpk >= tol)):
        bad.append(_violation("Fierz identities", where[k], residuals=rep.residuals[k].tolist(), fpk=float(fpk[k])))
    payload = {
        "count": len(psis),
        "max_residuals": rep.residuals.max(axis=0).tolist(),
        "max_fpk_defect": float(fpk.max()),
        "tolerance": tol,
    }
    if args.inp:
        payload["records"] = [
            {"line": w, **io.FierzReport(rep.residuals[i], rep.sigma[i], rep.omega[i]).to_dict()}
            for i, w in enumerate(where)
        ]
    return payload, bad, errors


def cmd_rim_build(args, cfg, basis):
    recs = _records(args)
    p = _params(args)
    out, bad = [], []
    for r in recs:
        if not r.ok:
            continue
        try:
            psi_D = rim.build_dirac_from_rim(r.psi, p, basis, cfg.tolerance)
        except rim.RimError as exc:
            bad.append(_violation("admissible RIM seed", r.line, error=str(exc)))
            continue
        out.append({"line": r.line, **io.spinor_to_record(psi_D, r.label)})
    if args.spinors_out:
        with open(args.spinors_out, "w", encoding="utf-8") as fh:
            for rec in out:
                fh.write(json.dumps({k: rec[k] for k in ("re", "im", "label") if rec.get(k) is not None}) + "\n")
    return {"params": p.to_dict(), "records": out}, bad, _input_errors(recs)


def cmd_rim_verify_lemma1(args, cfg, basis):
    res = rim.lemma1_sweep(cfg.trials, cfg.seed, cfg.tolerance, basis.convention, args.workers)
    bad = [_violation("Dirac spinor is class 1", v["trial"], found_class=v["class"]) for v in res["violations"]]
    bad += [_violation("|A + J +- B| > tol", t) for t in res["side_assertion_failures"]]
    res["violations"] = len(res["violations"])
    return res, bad, []


def cmd_rim_predict(args, cfg, basis):
    recs = _records(args)
    p = _params(args)
    out, bad = [], []
    for r in recs:
        if not r.ok:
            continue
        try:
            psi_D = rim.build_dirac_from_rim(r.psi, p, basis, cfg.tolerance)
            pred = rim.predicted_dirac_bilinears(r.psi, basis, cfg.tolerance)
        except rim.RimError as exc:
            bad.append(_violation("admissible RIM seed", r.line, error=str(exc)))
            continue
        direct = rim.direct_dirac_bilinears(psi_D, basis)
        c, mismatch = rim.fit_global_constant(pred, direct)
        _, re_mis = rim.fit_global_constant(rim.rederived_dirac_bilinears(compute_bilinears(r.psi, basis)), direct)
        out.append({
            "line": r.line, "predicted": pred.to_dict(), "direct": direct.to_dict(),
            "fitted_constant": [c.real, c.imag], "relative_mismatch": mismatch,
            "rederived_relative_mismatch": re_mis,
        })
        if mismatch >= PREDICT_TOL:
            bad.append(_violation("closed forms match direct bilinears", r.line, relative_mismatch=mismatch))
    consts = np.array([complex(*o["fitted_constant"]) for o in out])
    spread = float(np.abs(consts - consts.mean()).max()) if len(consts) else 0.0
    return {"params": p.to_dict(), "constant_spread": spread, "records": out}, bad, _input_errors(recs)


def cmd_exotic_demo(args, cfg, basis):
    grid = _grid(args)
    try:
        exotic.ThetaField.parse(args.theta, grid)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    p = _params(args) if args.a != DEFAULT_A or args.b != DEFAULT_B else exotic.DEMO_PARAMS
    try:
        res = exotic.lemma2_demo(args.theta, grid.dims, grid.spacing, p, cfg.seed, basis, refinements=args.refinements)
    except (exotic.IntegrationError, ValueError) as exc:
        return {"theta": args.theta}, [_violation("bounded regular integration", args.theta, error=str(exc))], []
    bad = [_violation(name, args.theta) for name, ok in res["checks"].items() if not ok]
    if args.field_out or args.theta_out:
        theta = exotic.ThetaField.parse(args.theta, grid)
        if args.field_out:
            fld = exotic.integrate_rim_field(grid, theta, p, exotic.demo_seed(cfg.seed, basis), basis)
            io.write_spinor_grid(args.field_out, fld)
        if args.theta_out:
            io.write_theta_grid(args.theta_out, grid, theta.theta, theta.label)
    return res, bad, []


def cmd_exotic_witness(args, cfg, basis):
    grid = _grid(args)
    try:
        kappa = float(args.theta.partition(":")[2]) if args.theta.startswith("linear:") else 0.0
        mom = [float(v) for v in args.momentum.split(",")]
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if len(mom) == 3:
        mom = [float(np.sqrt(args.mass**2 + sum(v * v for v in mom)))] + mom
    if len(mom) != 4:
        raise InputError("--momentum takes px,py,pz or E,px,py,pz")
    try:
        res = exotic.witness_convergence(mom, args.mass, [0.0, kappa, 0.0, 0.0], grid, args.levels, basis,
                                         args.min_order)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    res["momentum"] = mom
    bad = []
    for r in ("r1", "r2"):
        if not res[f"{r}_second_order"]:
            bad.append(_violation(f"second-order convergence of {r}", args.theta, orders=res[f"order_{r}"]))
    return res, bad, []


def cmd_sample(args, cfg, basis):
    out, bad = [], []
    for k in range(cfg.trials):
        try:
            psi = lounesto.sample_class(args.klass, cfg.seed + k, basis)
        except lounesto.SampleNotFound as exc:
            bad.append(_violation(f"class-{args.klass} representative found", cfg.seed + k, error=str(exc)))
            continue
        out.append(io.spinor_to_record(psi, f"class{args.klass}-seed{cfg.seed + k}"))
    if args.spinors_out:
        with open(args.spinors_out, "w", encoding="utf-8") as fh:
            fh.writelines(json.dumps(r) + "\n" for r in out)
    return {"class": args.klass, "found": len(out), "records": out}, bad, []


COMMANDS = {
    "classify": cmd_classify,
    "bilinears": cmd_bilinears,
    "fierz": cmd_fierz,
    "rim-build": cmd_rim_build,
    "rim-verify-lemma1": cmd_rim_verify_lemma1,
    "rim-predict": cmd_rim_predict,
    "exotic-demo": cmd_exotic_demo,
    "exotic-witness": cmd_exotic_witness,
    "sample": cmd_sample,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--convention", choices=sorted(CONVENTION_FLAGS), default="dirac")
    common.add_argument("--tol", type=float, default=None, help=f"zero threshold (default {ZERO_TOL:g})")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=int, default=1)
    common.add_argument("--in", dest="inp", default=None)
    common.add_argument("--out", default=None)

    rimp = argparse.ArgumentParser(add_help=False)
    rimp.add_argument("--a", default=DEFAULT_A, help="complex a, e.g. 0.5+1j")
    rimp.add_argument("--b", default=DEFAULT_B)
    rimp.add_argument("--mass", type=float, default=DEFAULT_M)

    def grid(dims="64x64", spacing=exotic.DEMO_SPACING):
        # a fresh parent each time: parents share action objects, hence defaults
        gp = argparse.ArgumentParser(add_help=False)
        gp.add_argument("--theta", default="linear:0.1")
        gp.add_argument("--grid", default=dims)
        gp.add_argument("--spacing", type=float, default=spacing)
        return gp

    ap = argparse.ArgumentParser(prog="rimspinor", description="Spinor bilinear and RIM verification tools")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("classify", parents=[common])
    sub.add_parser("bilinears", parents=[common])
    sub.add_parser("fierz", parents=[common])
    s = sub.add_parser("rim-build", parents=[common, rimp])
    s.add_argument("--spinors-out", default=None)
    s = sub.add_parser("rim-verify-lemma1", parents=[common, rimp])
    s.add_argument("--workers", type=int, default=1)
    sub.add_parser("rim-predict", parents=[common, rimp])
    s = sub.add_parser("exotic-demo", parents=[common, rimp, grid()])
    s.add_argument("--refinements", type=int, default=1)
    s.add_argument("--field-out", default=None)
    s.add_argument("--theta-out", default=None)
    s = sub.add_parser("exotic-witness", parents=[common, grid("16x16", 0.05)])
    s.add_argument("--momentum", default="0.6,0.3,0", help="px,py,pz or E,px,py,pz")
    s.add_argument("--mass", type=float, default=1.0)
    s.add_argument("--levels", type=int, default=3)
    s.add_argument("--min-order", type=float, default=1.8)
    s = sub.add_parser("sample", parents=[common])
    s.add_argument("--class", dest="klass", type=int, choices=range(1, 7), required=True)
    s.add_argument("--spinors-out", default=None)
    return ap


def run(argv) -> tuple[RunReport | None, int]:
    """Parse ``argv``, execute, write the report; returns ``(report, exit code)``."""
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return None, EXIT_USAGE if exc.code else EXIT_PASS

    t0 = time.perf_counter()
    options = {k: v for k, v in sorted(vars(args).items())
               if k not in ("command", "convention", "tol", "seed", "trials", "out")}
    try:
        cfg = RunConfig(
            convention=CONVENTION_FLAGS[args.convention],
            tolerance=args.tol if args.tol is not None else ZERO_TOL,
            seed=args.seed, trials=args.trials, output_path=args.out, options=options,
        )
        basis = build_gamma_basis(cfg.convention)
        payload, violations, input_errors = COMMANDS[args.command](args, cfg, basis)
        code = EXIT_USAGE if input_errors else (EXIT_FAIL if violations else EXIT_PASS)
    except InputError as exc:
        cfg = cfg if "cfg" in locals() else None
        payload, violations, input_errors, code = {}, [], [{"line": None, "error": str(exc)}], EXIT_USAGE
        print(f"rimspinor {args.command}: {exc}", file=sys.stderr)

    payload = dict(payload)
    payload["violations_detail"] = violations
    if input_errors:
        payload["input_errors"] = input_errors
        payload["violations_detail"] = violations + [_violation("well-formed input", e["line"], error=e["error"]) for e in input_errors]
    report = RunReport(args.command, cfg, "pass" if code == EXIT_PASS else "fail", payload,
                       round(time.perf_counter() - t0, 6))
    text = report.to_json()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return report, code


def main(argv=None) -> int:
    _, code = run(sys.argv[1:] if argv is None else argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
