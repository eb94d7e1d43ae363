"""Command-line entry point ``cstar-inv``.

Exit codes: 0 success, 1 a property suite failed, 2 unreadable or invalid
input, 3 an unknown name or a failed precondition.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass

from . import equations, spectral
from .algebra import ToleranceConfig
from .errors import ParseError, PreconditionFailed, UnknownName, ValidationError
from .io import ProblemFile, emit_report, encode_complex, encode_vector, parse_problem
from .operators import moore_penrose, penrose_residuals
from .properties import run_suites
from .report import Report
from .submodules import (assemble_from_blocks, block_decompose, invariance_residual, reducing_residual)

__all__ = ["Options", "execute", "main", "resolve_seed"]

SEED_ENV = "CSTAR_INV_SEED"

# subcommand -> (operator names, submodule names, optional submodule names)
_SIGNATURES = {
    "analyze": (["T"], ["W"], []),
    "decompose": (["T"], ["W"], []),
    "solve-sts": (["T"], ["W"], []),
    "solve-douglas": (["T", "S"], [], []),
    "spectrum": (["K"], [], []),
    "hyperinvariant": (["K"], [], []),
    "numrange": (["T"], [], []),
    "mp": (["T"], [], ["W"]),
    "check-properties": ([], [], []),
}


@dataclass
class Options:
    seed: int = 0
    cases: int = 100
    Z: str | None = None
    tol: ToleranceConfig = ToleranceConfig()


def resolve_seed(cli_seed: int | None, problem: ProblemFile | None, env=None) -> int:
    """``--seed`` wins, then the problem file, then ``CSTAR_INV_SEED``, then 0."""
    if cli_seed is not None:
        return cli_seed
    if problem is not None and "seed" in problem.tolerances:
        return int(problem.tolerances["seed"])
    env = os.environ if env is None else env
    raw = env.get(SEED_ENV)
    if raw:
        try:
            return int(raw)
        except ValueError as exc:
            raise ValidationError(f"{SEED_ENV} must be an integer, got {raw!r}", SEED_ENV) from exc
    return 0


def _lookup(table: dict, name: str, kind: str):
    try:
        return table[name]
    except KeyError:
        raise UnknownName(f"no {kind} named {name!r}; available: {sorted(table)}") from None


def _bind(command: str, names: list[str], problem: ProblemFile | None):
    ops, subs, optional = _SIGNATURES[command]
    required = len(ops) + len(subs)
    if not required <= len(names) <= required + len(optional):
        wanted = " ".join(ops + subs + [f"[{n}]" for n in optional])
        raise ValidationError(f"{command} expects names {wanted}, got {names}", "argv")
    if required and problem is None:
        raise ValidationError(f"{command} needs a problem file", "argv")
    bound = {}
    for role, name in zip(ops, names):
        bound[role] = _lookup(problem.operators, name, "operator")
    for role, name in zip(subs + optional, names[len(ops):]):
        bound[role] = _lookup(problem.submodules, name, "submodule")
    return bound


def _z(problem, options):
    return None if options.Z is None else _lookup(problem.operators, options.Z, "operator")


def execute(command: str, names: list[str], problem: ProblemFile | None, options: Options) -> Report:
    """Run one subcommand and collect its checks, values and objects."""
    if command not in _SIGNATURES:
        raise UnknownName(f"unknown command {command!r}")
    args = _bind(command, names, problem)
    tol = options.tol
    echo = [command, *names]
    if options.Z is not None:
        echo += ["--Z", options.Z]
    if command == "check-properties":
        echo += ["--cases", str(options.cases)]
    report = Report(echo, options.seed)
    if problem is not None and command != "check-properties":
        report.values["rank"] = problem.rank
        report.values["algebra"] = list(problem.shape.block_dims)
    handler = _HANDLERS[command]
    handler(report, args, problem, options, tol)
    return report


def _analyze(report, a, problem, options, tol):
    T, W = a["T"], a["W"]
    thr = tol.threshold(T.norm())
    inv = report.add("invariant", invariance_residual(T, W), thr)
    red = report.add("reducing", reducing_residual(T, W), thr)
    report.values["invariant"] = inv.passed
    report.values["reducing"] = red.passed
    report.values["block_norms"] = dict(zip("ABCD", (X.norm() for X in block_decompose(T, W))))
    report.values["block_ranks"] = W.block_ranks()


def _decompose(report, a, problem, options, tol):
    T, W = a["T"], a["W"]
    A, B, C, D = block_decompose(T, W)
    report.add("reassembly", (assemble_from_blocks(A, B, C, D, W, tol) - T).norm(), tol.threshold(T.norm()))
    report.objects.update(A=A, B=B, C=C, D=D)


def _solve_sts(report, a, problem, options, tol):
    T, W = a["T"], a["W"]
    S = equations.sts_solution(T, W, _z(problem, options), tol)
    sts = equations.verify_sts(S, T, tol)
    report.extend(sts.checks())
    report.values["nontrivial"] = sts.nontrivial
    report.objects["S"] = S
    if sts.submodule is not None:
        report.objects["ker_I_minus_S"] = sts.submodule


def _solve_douglas(report, a, problem, options, tol):
    T, S = a["T"], a["S"]
    X = equations.douglas_solution(T, S, _z(problem, options), tol)
    report.add("range_inclusion", equations.range_inclusion_residual(T, S), tol.threshold(S.norm()))
    report.add("douglas.residual", (T @ X - S).norm(), tol.threshold(T.norm() * X.norm(), S.norm()))
    report.objects["X"] = X


def _spectrum(report, a, problem, options, tol):
    K = a["K"]
    spec = spectral.spectrum(K)
    report.values["eigenvalues"] = [[encode_complex(z), m] for z, m in spec.eigenvalues]
    report.values["contains_zero"] = spec.contains_zero
    report.values["nilpotent_blocks"] = spec.nilpotent_blocks
    report.values["zero_forced_by_infinite_generation"] = "not applicable"
    for j, lam in enumerate(spec.nonzero()):
        W = spectral.eigen_submodule(K, lam, tol, spec)
        report.add(f"eigen_submodule[{j}].norm_deficit", max(0.0, 1.0 - W.projection.norm()), 1e-9)
        report.add(f"eigen_submodule[{j}].invariance", invariance_residual(K, W), tol.threshold(K.norm()))


def _hyperinvariant(report, a, problem, options, tol):
    K = a["K"]
    W, kind = spectral.find_hyperinvariant(K, tol)
    report.add("invariance", invariance_residual(K, W), tol.threshold(K.norm()))
    report.values["kind"] = kind
    report.values["block_ranks"] = W.block_ranks()
    report.values["commutant_dimension"] = len(spectral.commutant_basis(K))
    report.objects["W"] = W


def _numrange(report, a, problem, options, tol):
    T = a["T"]
    cert = spectral.zero_exclusion_certificate(T, tol.replace(seed=options.seed))
    report.values["kind"] = cert.kind
    report.values["bound"] = cert.bound
    if cert.witness is not None:
        report.values["witness"] = encode_vector(cert.witness)
        report.values["objective"] = cert.objective
        report.values["witness_is_approximate"] = True


def _mp(report, a, problem, options, tol):
    T = a["T"]
    X = moore_penrose(T)
    thr = tol.threshold(T.norm())
    for name, res in penrose_residuals(T, X).items():
        report.add(f"penrose[{name}]", res, thr)
    report.objects["T_pinv"] = X
    if "W" in a:
        rep = spectral.mp_reducing_verify(T, a["W"], tol, require_hypotheses=True)
        report.extend(rep.checks())
        report.values["invertible"] = rep.invertible


def _check_properties(report, a, problem, options, tol):
    suites = run_suites(options.seed, options.cases, tol)
    summary = {}
    for s in suites:
        for c in s.checks:
            report.add(f"{s.key}.{c.name}", c.residual, c.threshold)
        summary[s.key] = {"title": s.title, "instances": s.count, "passed": s.passed}
    report.values["cases"] = options.cases
    report.values["suites"] = summary


_HANDLERS = {
    "analyze": _analyze,
    "decompose": _decompose,
    "solve-sts": _solve_sts,
    "solve-douglas": _solve_douglas,
    "spectrum": _spectrum,
    "hyperinvariant": _hyperinvariant,
    "numrange": _numrange,
    "mp": _mp,
    "check-properties": _check_properties,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cstar-inv", description="Invariant submodules of operators on A^k.")
    p.add_argument("command", choices=sorted(_SIGNATURES))
    p.add_argument("problem", nargs="?", help="problem file (JSON); optional for check-properties")
    p.add_argument("names", nargs="*", help="operator and submodule names from the problem file")
    p.add_argument("--seed", type=int)
    p.add_argument("--cases", type=int, default=100)
    p.add_argument("--atol", type=float)
    p.add_argument("--rtol", type=float)
    p.add_argument("--format", choices=("human", "machine"), default="human")
    p.add_argument("--Z", dest="Z", metavar="NAME", help="operator used as the free parameter Z")
    return p


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    ns = build_parser().parse_args(argv)
    try:
        problem = parse_problem(ns.problem) if ns.problem is not None else None
        if ns.cases < 1:
            raise ValidationError("must be a positive integer", "--cases")
        base = problem.tol() if problem is not None else ToleranceConfig()
        try:
            tol = base.replace(atol=ns.atol, rtol=ns.rtol)
        except ValueError as exc:
            raise ValidationError(str(exc), "--atol/--rtol") from exc
        seed = resolve_seed(ns.seed, problem)
        options = Options(seed=seed, cases=ns.cases, Z=ns.Z, tol=tol.replace(seed=seed))
        report = execute(ns.command, ns.names, problem, options)
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    except (UnknownName, PreconditionFailed) as exc:
        print(f"error: {exc}", file=stderr)
        return 3
    stdout.write(emit_report(report, ns.format))
    if ns.command == "check-properties" and not report.passed:
        return 1
    return 0


def main(argv: list[str] | None = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
