"""Command-line entry point.

Exit codes: 0 success or verdict yes, 1 verdict no / inconclusive /
violation, 2 usage or input error, 3 numerical non-convergence.
"""
import argparse
import dataclasses
import json
import sys
from pathlib import Path

from ._config import make_rng, seed_from_env
from .classify import Verdict, classify, classify_tn, classify_tp
from .dynamics import SimulationError, certify_odts_order, detect_period, simulate
from .io import RunManifest, dumps, load_matrix, load_vector, write_json
from .lineintegral import (BUILTINS, DEFAULT_QUAD, GridMatFn, NonConvergentError, QuadConfig,
                           direct_certificate, envelope_checkerboard_certificate,
                           hankel_certificate, integrate)
from .matrix import DEFAULT_TOL, Tolerance
from .models import build_model
from .reproduce import EXPERIMENTS, reproduce
from .selftest import format_table, selftest
from .signvar import profile, sample_low_variation, vdp_tn_check, vdp_tp_check


EXIT_OK, EXIT_NO, EXIT_USAGE, EXIT_NONCONV = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _verdict_exit(v):
    return EXIT_OK if v is Verdict.YES else EXIT_NO


def _tol(text):
    try:
        return Tolerance.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"--tol expects pos_eps,zero_eps: {exc}") from None


def _orders(text):
    try:
        return [int(s) for s in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError("--orders expects comma-separated integers") from None


def _emit(report, out):
    """Write the report to ``out`` (a file) or stdout; returns the artifact name."""
    if out is None:
        sys.stdout.write(dumps(report))
        return None
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_json(out, report)
    return out.name


def _manifest(argv, tol, extra=None):
    return RunManifest(command=["oscidyn", *argv], seed=seed_from_env(),
                       tolerance={**dataclasses.asdict(tol), **(extra or {})})


# -- subcommands --------------------------------------------------------------


def cmd_classify(args, man):
    A = load_matrix(args.matrix)
    c = classify(A, args.tol, args.orders)
    name = _emit(c, args.out)
    man.artifacts += [name] if name else []
    man.verdicts = {"is_TP": c.is_tp.verdict.value, "is_TN": c.is_tn.verdict.value,
                    "exponent": c.exponent}
    return _verdict_exit(c.is_tn.verdict), Path(args.out).parent if args.out else None


def cmd_signvar(args, man):
    p = profile(load_vector(args.vector), args.tol)
    name = _emit(p, args.out)
    man.artifacts += [name] if name else []
    man.verdicts = p.to_dict()
    return EXIT_OK, Path(args.out).parent if args.out else None


def cmd_vdp(args, man):
    A = load_matrix(args.matrix)
    rng = make_rng()
    if classify_tp(A, args.tol).verdict is Verdict.YES:
        kind, check = "TP", vdp_tp_check
    elif classify_tn(A, args.tol).verdict is Verdict.YES:
        kind, check = "TN", vdp_tn_check
    else:
        kind, check = None, None
    violations = []
    if check is not None:
        for _ in range(args.samples):
            x = sample_low_variation(A.shape[1], A.shape[1] - 1, rng)
            if not check(A, x, args.tol):
                violations.append(x.tolist())
    report = {"matrix_class": kind, "samples": args.samples if check else 0,
              "violations": len(violations), "first_violation": violations[0] if violations else None,
              "hypothesis_met": check is not None}
    name = _emit(report, args.out)
    man.artifacts += [name] if name else []
    man.verdicts = {"matrix_class": kind, "violations": len(violations)}
    code = EXIT_OK if check is not None and not violations else EXIT_NO
    return code, Path(args.out).parent if args.out else None


def _load_fn(spec):
    kind, _, name = spec.partition(":")
    if kind == "builtin":
        if name not in BUILTINS:
            raise UsageError(f"unknown builtin {name!r}; choose from {sorted(BUILTINS)}")
        return BUILTINS[name]
    if kind == "grid":
        obj = json.loads(Path(name).read_text())
        from .io import mat_from_json
        return GridMatFn(obj["ts"], [mat_from_json(m) for m in obj["mats"]])
    raise UsageError("--fn expects builtin:<name> or grid:<file.json>")


def cmd_integrate(args, man):
    fn = _load_fn(args.fn)
    q = QuadConfig(rule=args.quad, refine_tol=args.tol, initial_panels=args.panels)
    tol = args.class_tol
    if args.certify == "checkerboard":
        cert = envelope_checkerboard_certificate(fn, grid=args.grid, tol=tol)
    elif args.certify == "hankel":
        cert = hankel_certificate(fn, args.grid, q, tol)
    else:
        cert = direct_certificate(fn, q, tol)
    integral = integrate(fn, q)
    report = {"integral": integral.tolist(), "certificate": cert.to_dict(),
              "integral_TP": classify_tp(integral, tol).to_dict(),
              "integral_TN": classify_tn(integral, tol).to_dict()}
    name = _emit(report, args.out)
    man.artifacts += [name] if name else []
    man.verdicts = {"certificate": cert.verdict.value, "kind": cert.kind.value}
    return _verdict_exit(cert.verdict), Path(args.out).parent if args.out else None


def cmd_simulate(args, man):
    params = json.loads(Path(args.params).read_text()) if args.params else None
    system = build_model(args.model, params)
    x0 = load_vector(args.x0)
    traj = simulate(system, x0, args.steps)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    traj.to_csv(out / "traj.csv")
    man.artifacts.append("traj.csv")
    code = EXIT_OK
    man.verdicts = {"left_omega_at": traj.exit_step}
    if args.detect_period:
        rep = detect_period(traj, args.detect_period, args.res_tol)
        write_json(out / "period.json", rep)
        man.artifacts.append("period.json")
        man.verdicts["detected_period"] = rep.detected_period
        code = EXIT_OK if rep.detected_period is not None else EXIT_NO
    h = args.order or (args.detect_period // system.period
                       if args.detect_period and args.detect_period % system.period == 0 else 1)
    cert = certify_odts_order(system, h, trials=args.trials, tol=args.tol, rng=make_rng())
    write_json(out / "certificate.json", cert)
    man.artifacts.append("certificate.json")
    man.verdicts["certificate"] = cert.verdict.value
    if cert.verdict is not Verdict.YES:
        code = EXIT_NO
    return code, out


def cmd_reproduce(args, man):
    run = reproduce(args.example, seed=seed_from_env())
    out = Path(args.out or Path("oscidyn-runs") / args.example)
    man.artifacts += run.write(out)
    man.verdicts = run.summary()
    sys.stdout.write(dumps(run.summary()))
    return (EXIT_OK if run.ok else EXIT_NO), out


def cmd_selftest(args, man):
    rows = selftest(args.tol, trials=args.trials, seed=seed_from_env())
    print(format_table(rows))
    failed = [r.name for r in rows if not r.passed]
    man.verdicts = {"passed": len(rows) - len(failed), "failed": failed}
    if args.out:
        man.artifacts.append(_emit([dataclasses.asdict(r) for r in rows], args.out))
    return (EXIT_NO if failed else EXIT_OK), Path(args.out).parent if args.out else None


# -- parser -------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="oscidyn", description=(
        "Total positivity classification, sign variation, matrix line integrals and "
        "periodic discrete-time dynamics."))
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def tol_arg(sp, flag="--tol"):
        sp.add_argument(flag, type=_tol, default=DEFAULT_TOL, metavar="POS,ZERO",
                        help="sign-decision tolerances pos_eps,zero_eps (default 1e-9,1e-12)")

    sp = sub.add_parser("classify", help="TP/TN/SSR/oscillatory classification")
    sp.add_argument("matrix", help="matrix JSON or CSV")
    tol_arg(sp)
    sp.add_argument("--orders", type=_orders, default=None, help="SSR orders, e.g. 1,2")
    sp.add_argument("--out", help="report JSON path (default stdout)")
    sp.set_defaults(run=cmd_classify)

    sp = sub.add_parser("signvar", help="sign-variation profile of a vector")
    sp.add_argument("vector", help="vector JSON/CSV file or comma-separated numbers")
    tol_arg(sp)
    sp.add_argument("--out")
    sp.set_defaults(run=cmd_signvar)

    sp = sub.add_parser("vdp", help="sampled variation-diminishing check")
    sp.add_argument("--matrix", required=True)
    sp.add_argument("--samples", type=int, default=1000)
    tol_arg(sp)
    sp.add_argument("--out")
    sp.set_defaults(run=cmd_vdp)

    sp = sub.add_parser("integrate", help="integral over [0,1] of a matrix function")
    sp.add_argument("--fn", required=True, help="builtin:<name> or grid:<file.json>")
    sp.add_argument("--quad", choices=["gauss5", "simpson"], default=DEFAULT_QUAD.rule)
    sp.add_argument("--tol", type=float, default=DEFAULT_QUAD.refine_tol,
                    help="panel-doubling tolerance")
    sp.add_argument("--panels", type=int, default=DEFAULT_QUAD.initial_panels)
    sp.add_argument("--certify", choices=["checkerboard", "hankel", "none"], default="none")
    sp.add_argument("--grid", type=int, default=257, help="sample points for certificates")
    tol_arg(sp, "--class-tol")
    sp.add_argument("--out")
    sp.set_defaults(run=cmd_integrate)

    sp = sub.add_parser("simulate", help="simulate a registered model")
    sp.add_argument("--model", required=True)
    sp.add_argument("--params", help="model parameter JSON")
    sp.add_argument("--x0", required=True, help="comma-separated initial state or file")
    sp.add_argument("--steps", type=int, default=200)
    sp.add_argument("--detect-period", type=int, default=None, metavar="U")
    sp.add_argument("--res-tol", type=float, default=1e-6)
    sp.add_argument("--order", type=int, default=None, help="ODTS order h (default U/T)")
    sp.add_argument("--trials", type=int, default=50)
    tol_arg(sp)
    sp.add_argument("--out", required=True, help="output directory")
    sp.set_defaults(run=cmd_simulate)

    sp = sub.add_parser("reproduce", help="rerun a registered experiment")
    sp.add_argument("example", choices=sorted(EXPERIMENTS))
    sp.add_argument("--out", help="output directory (default oscidyn-runs/<example>)")
    sp.set_defaults(run=cmd_reproduce, tol=DEFAULT_TOL)

    sp = sub.add_parser("selftest", help="golden table and randomized properties")
    sp.add_argument("--trials", type=int, default=100)
    tol_arg(sp)
    sp.add_argument("--out")
    sp.set_defaults(run=cmd_selftest)
    return p


def dispatch(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    tol = getattr(args, "tol", DEFAULT_TOL)
    man = _manifest(argv, tol if isinstance(tol, Tolerance) else
                    getattr(args, "class_tol", DEFAULT_TOL))
    try:
        code, out_dir = args.run(args, man)
    except (NonConvergentError, SimulationError) as exc:
        print(f"oscidyn: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NONCONV
    except (UsageError, ValueError, IndexError, KeyError, OSError) as exc:
        print(f"oscidyn: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    man.verdicts["exit_code"] = code
    man.write(out_dir)
    return code


def main():
    sys.exit(dispatch())
