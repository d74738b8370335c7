"""Command-line interface: ``medkit solve|certify|oracle|simulate|scan``.

Exit codes: 0 success, 1 input error, 2 certification failure, 3 oracle
did not converge.  The certificate tolerance profile comes from the
``MEDKIT_TOL`` environment variable (``default`` or ``strict``).
"""

from __future__ import annotations

import argparse
import csv
import io as _stdio
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import closedform, io
from .blochdirac import dirac_gammas
from .certify import certificate, success_probability
from .closedform.special import solve_special_case
from .errors import (
    CoefficientMismatch,
    ConditionAmbiguous,
    ConvergenceFailure,
    Infeasible,
    InvalidEnsemble,
    MedkitError,
    NoBranchCertifies,
    SchemaError,
    SingularL,
)
from .oracle import med_fixed_point, random_restart_ascent
from .simulate import monte_carlo_success

EXIT_OK, EXIT_INPUT, EXIT_CERT, EXIT_ORACLE = 0, 1, 2, 3

SCAN_HELP = """\
Sweep one parameter of an ensemble file and tabulate the optimum.

Parameters:
  eta                 first-set prior; eta' is recomputed as (1 - n*eta)/n'
                      so the priors stay normalised
  b, b_prime          Bloch radius of a seed given in bloch form
  nz, nz_prime        last Bloch component of a seed; the other components
                      are rescaled to keep the direction a unit vector
  angle:K, angle_prime:K
                      K-th entry (1-based) of a z_angles list

Output is CSV with 12 significant digits, one row per point in sweep order.
"""

log = logging.getLogger("medkit")


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, (ConvergenceFailure, SingularL)):
        return EXIT_ORACLE
    if isinstance(exc, (NoBranchCertifies, Infeasible, ConditionAmbiguous, CoefficientMismatch)):
        return EXIT_CERT
    return EXIT_INPUT


def _gammas(d: int):
    m = int(round(np.log2(d)))
    return dirac_gammas(m) if 2**m == d and 1 <= m <= 4 else None


def _solve(e, solver: str, on_ambiguous: str = "raise"):
    if solver.startswith("special"):
        return solve_special_case(int(solver[-1]), e, on_ambiguous=on_ambiguous)
    return closedform.solve(e, solver)


def _povm_lines(P, G) -> list[str]:
    lines = []
    comps = P.bloch_components(G) if G is not None else None
    for j, w in enumerate(P.weights):
        tag = f"Pi_{j + 1}" if j < P.n else f"Pi'_{j - P.n + 1}"
        line = f"  {tag:<7} weight = {w:.9f}"
        if comps is not None:
            line += "  bloch = [" + ", ".join(f"{c:+.6f}" for c in comps[j]) + "]"
        lines.append(line)
    return lines


def cmd_solve(args) -> int:
    e, solver = io.load_ensemble(args.ensemble)
    solver = args.solver or solver
    rep = _solve(e, solver, args.on_ambiguous)
    G = _gammas(e.d)
    if args.json:
        text = rep.to_json(G)
    else:
        lines = [f"p_opt = {rep.p_opt:.6f}, branch = {rep.label}", f"status = {rep.status}",
                 "measurement:"]
        lines += _povm_lines(rep.povm, G)
        lines.append("residuals:")
        lines += [f"  {k} = {v:.3e}" for k, v in rep.certificate.residuals.items()]
        if rep.quadratic is not None:
            q = rep.quadratic
            lines.append(f"quadratic: A = {q.A:.12g}, B = {q.B:.12g}, C = {q.C:.12g}, root = {q.root:.12g}")
        lines += [f"finding: {f}" for f in rep.findings]
        lines += [f"tie: {c.summary()}" for c in rep.alternatives]
        text = "\n".join(lines)
    print(text)
    if args.out:
        Path(args.out).write_text(text + "\n")
    if args.povm_out:
        io.save_povm(rep.povm, args.povm_out)
    return EXIT_OK if rep.certificate.certified else EXIT_CERT


def cmd_certify(args) -> int:
    e, _ = io.load_ensemble(args.ensemble)
    P = io.load_povm(args.povm)
    p = success_probability(e, P) if args.p is None else args.p
    cert = certificate(e, P, p, G=_gammas(e.d))
    print(cert.to_json() if args.json else cert.report())
    return EXIT_OK if cert.certified else EXIT_CERT


def cmd_oracle(args) -> int:
    e, _ = io.load_ensemble(args.ensemble)
    if args.method == "ascent":
        res = random_restart_ascent(e, restarts=args.restarts, seed=args.seed,
                                    max_iters=args.max_iters, gap=args.gap)
    else:
        res = med_fixed_point(e, max_iters=args.max_iters, gap=args.gap, seed=args.seed)
    if args.json:
        print(json.dumps(res.to_dict(), indent=2))
    else:
        print(f"p_lower = {res.p_lower:.12f}")
        print(f"p_upper = {res.p_upper:.12f}")
        print(f"gap = {res.gap:.3e}")
        print(f"iterations = {res.iterations}")
        print(f"converged = {str(res.converged).lower()}")
    if args.povm_out:
        io.save_povm(res.povm, args.povm_out)
    return EXIT_OK if res.converged else EXIT_ORACLE


def cmd_simulate(args) -> int:
    e, solver = io.load_ensemble(args.ensemble)
    ref = None
    if args.povm:
        P = io.load_povm(args.povm)
        ref = success_probability(e, P)
    else:
        rep = _solve(e, args.solver or solver)
        P, ref = rep.povm, rep.p_opt
    res = monte_carlo_success(e, P, args.trials, seed=args.seed, shards=args.shards)
    out = res.to_dict()
    out["p_exact"] = ref
    out["z"] = (res.p_hat - ref) / res.stderr if res.stderr > 0 else 0.0
    if args.json:
        print(json.dumps(out, indent=2))
    else:
        for k in ("trials", "successes", "seed", "shards"):
            print(f"{k} = {out[k]}")
        print(f"p_hat = {res.p_hat:.9f}")
        print(f"stderr = {res.stderr:.3e}")
        print(f"p_exact = {ref:.9f}")
        print(f"z = {out['z']:+.3f}")
    return EXIT_OK


# scan ---------------------------------------------------------------------

def _set_param(doc: dict, name: str, value: float) -> None:
    if name == "eta":
        n = _count(doc, "unitaries")
        n_p = _count(doc, "unitaries_prime")
        doc["eta"] = value
        doc["eta_prime"] = (1.0 - n * value) / n_p
        if doc["eta_prime"] < 0:
            raise InvalidEnsemble(f"eta = {value:.12g} leaves a negative eta'")
        return
    if name.startswith("angle"):
        key, _, k = name.partition(":")
        ukey = "unitaries" if key == "angle" else "unitaries_prime"
        angles = doc[ukey].get("z_angles")
        if angles is None:
            raise SchemaError(f"{name}: {ukey} has no z_angles list")
        angles[int(k) - 1] = value
        return
    skey = "seed_prime" if name.endswith("_prime") else "seed"
    bloch = doc[skey].get("bloch")
    if bloch is None:
        raise SchemaError(f"{name}: {skey} must be in bloch form to sweep it")
    if name.startswith("b"):
        bloch["a"] = value
        return
    if abs(value) > 1:
        raise InvalidEnsemble(f"{name} = {value:.12g} is outside [-1, 1]")
    n = np.array([float(io.real_value(v)) for v in bloch["n"]])
    n /= np.linalg.norm(n)
    rest = n[:-1]
    norm = np.linalg.norm(rest)
    if norm == 0:
        rest = np.zeros_like(rest)
        rest[0], norm = 1.0, 1.0
    n[:-1] = rest / norm * np.sqrt(1 - value**2)
    n[-1] = value
    bloch["n"] = n.tolist()


def _count(doc: dict, key: str) -> int:
    body = doc[key]
    for kind in ("z_angles", "matrices", "spinor_thetas"):
        if kind in body:
            return len(body[kind])
    raise SchemaError(f"{key}: no unitaries given")


PARAMS = ("eta", "b", "b_prime", "nz", "nz_prime")


def _check_param(name: str) -> str:
    if name in PARAMS:
        return name
    key, sep, k = name.partition(":")
    if sep and key in ("angle", "angle_prime") and k.isdigit() and int(k) >= 1:
        return name
    raise argparse.ArgumentTypeError(
        f"unknown parameter {name!r}; use one of {', '.join(PARAMS)}, angle:K, angle_prime:K")


def _g(x) -> str:
    return "" if x is None else f"{x:.12g}"


def cmd_scan(args) -> int:
    if args.steps < 2:
        raise SchemaError("--steps must be at least 2")
    if not args.start < args.stop:
        raise SchemaError("--start must be smaller than --stop")
    text = Path(args.ensemble).read_text()
    _, file_solver = io.parse_ensemble(text, args.ensemble)
    base = json.loads(text)
    solver = args.solver or file_solver
    values = np.linspace(args.start, args.stop, args.steps)

    def row(value):
        doc = json.loads(json.dumps(base))
        try:
            _set_param(doc, args.param, float(value))
            e, _ = io.parse_ensemble(json.dumps(doc), f"{args.ensemble}[{args.param}={value:.12g}]")
            rep = _solve(e, solver, args.on_ambiguous)
            out = {"p_opt": rep.p_opt, "branch": rep.label, "status": rep.status}
            if args.oracle:
                res = med_fixed_point(e, gap=args.gap, max_iters=args.max_iters)
                out["oracle_p"] = res.p_lower
                out["gap"] = abs(rep.p_opt - res.p_lower)
                if not res.converged:
                    out["status"] = "OracleNotConverged"
            return value, out, None
        except (MedkitError, ValueError) as exc:
            return value, {"status": type(exc).__name__}, exc

    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        rows = list(pool.map(row, values))

    cols = [args.param, "p_opt", "branch"] + (["oracle_p", "gap"] if args.oracle else []) + ["status"]
    buf = _stdio.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    code = EXIT_OK
    for value, out, exc in rows:
        if exc is not None:
            if not args.keep_going:
                print(f"error at {args.param} = {value:.12g}: {exc}", file=sys.stderr)
                return _exit_code(exc)
            code = max(code, _exit_code(exc))
        w.writerow([_g(value), _g(out.get("p_opt")), out.get("branch", "")]
                   + ([_g(out.get("oracle_p")), _g(out.get("gap"))] if args.oracle else [])
                   + [out["status"]])
        if out["status"] == "OracleNotConverged":
            code = max(code, EXIT_ORACLE)
    if args.out:
        Path(args.out).write_text(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return code


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="medkit", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)
    solvers = ", ".join(closedform.SOLVERS)

    p = sub.add_parser("solve", help="closed-form optimum with certificate")
    p.add_argument("ensemble")
    p.add_argument("--solver", help=f"override the file's solver ({solvers})")
    p.add_argument("--on-ambiguous", choices=("raise", "certify"), default="raise",
                   help="special families: what to do when several printed conditions hold")
    p.add_argument("--json", action="store_true")
    p.add_argument("--out", help="also write the report to this file")
    p.add_argument("--povm-out", help="write the optimal measurement as a POVM file")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("certify", help="check optimality conditions for a given measurement")
    p.add_argument("ensemble")
    p.add_argument("povm")
    p.add_argument("--p", type=float, help="claimed optimum (default: success probability of the POVM)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("oracle", help="numerical optimum with a dual bound")
    p.add_argument("ensemble")
    p.add_argument("--method", choices=("fixed-point", "ascent"), default="fixed-point")
    p.add_argument("--gap", type=float, default=1e-7)
    p.add_argument("--max-iters", type=int, default=200_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=4, help="ascent restarts")
    p.add_argument("--json", action="store_true")
    p.add_argument("--povm-out")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("simulate", help="Monte Carlo estimate of the success probability")
    p.add_argument("ensemble")
    p.add_argument("povm", nargs="?", help="POVM file (default: the solver's optimal measurement)")
    p.add_argument("--solver")
    p.add_argument("--trials", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--shards", type=int, default=1)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("scan", help="parameter sweep to CSV", description=SCAN_HELP,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("ensemble")
    p.add_argument("--param", required=True, type=_check_param)
    p.add_argument("--start", type=float, required=True)
    p.add_argument("--stop", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--solver")
    p.add_argument("--on-ambiguous", choices=("raise", "certify"), default="raise")
    p.add_argument("--oracle", action="store_true", help="add oracle_p and gap = |p_opt - oracle_p|")
    p.add_argument("--gap", type=float, default=1e-7, help="oracle dual gap target")
    p.add_argument("--max-iters", type=int, default=200_000)
    p.add_argument("--keep-going", action="store_true",
                   help="emit failing points as rows with a status instead of aborting")
    p.add_argument("--jobs", type=int, default=1, help="points evaluated concurrently")
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_scan)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (MedkitError, ValueError, OSError) as exc:
        print(f"medkit {args.command}: {exc}", file=sys.stderr)
        return _exit_code(exc)


if __name__ == "__main__":
    sys.exit(main())
