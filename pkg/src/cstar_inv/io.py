"""JSON problem files and machine-readable reports.

Layout of a problem file::

    {
      "algebra": [1, 2],
      "rank": 2,
      "operators": {"T": GRID},
      "submodules": {"W": {"generators": [VECTOR, ...]}, "V": {"projection": GRID}},
      "tolerances": {"atol": 1e-9, "rtol": 1e-7, "seed": 0, "search_budget": 2000}
    }

An algebra element is a list with one row-major matrix per block, each entry
a ``[re, im]`` pair (a bare real number is accepted on input). A ``VECTOR``
is a list of ``k`` elements and a ``GRID`` a ``k x k`` list of lists of them.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .algebra import AlgebraElement, AlgebraShape, ToleranceConfig
from .errors import ParseError, ValidationError
from .module import ModuleVector
from .operators import Operator
from .report import Check, Report
from .submodules import Submodule, submodule_from_generators

__all__ = [
    "ProblemFile",
    "parse_problem",
    "load_problem",
    "dump_problem",
    "problem_to_dict",
    "report_to_dict",
    "emit_report",
    "parse_report",
    "encode_complex",
    "encode_vector",
    "decode_vector",
]

_TOL_FIELDS = ("atol", "rtol", "seed", "search_budget")


@dataclass
class ProblemFile:
    shape: AlgebraShape
    rank: int
    operators: dict[str, Operator] = field(default_factory=dict)
    submodules: dict[str, Submodule] = field(default_factory=dict)
    tolerances: dict[str, Any] = field(default_factory=dict)

    def tol(self) -> ToleranceConfig:
        return ToleranceConfig().replace(**self.tolerances)


# -- encoding ---------------------------------------------------------------

def encode_complex(z) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def _encode_matrix(m: np.ndarray) -> list:
    return [[encode_complex(z) for z in row] for row in m]


def encode_element(a: AlgebraElement) -> list:
    return [_encode_matrix(b) for b in a.blocks]


def encode_vector(x: ModuleVector) -> list:
    return [encode_element(e) for e in x.entries]


def encode_operator(T: Operator) -> list:
    return [[encode_element(a) for a in row] for row in T.to_grid()]


def encode_submodule(W: Submodule) -> dict:
    if W.generators:
        return {"generators": [encode_vector(g) for g in W.generators]}
    return {"projection": encode_operator(W.projection)}


def problem_to_dict(p: ProblemFile) -> dict:
    out = {
        "algebra": list(p.shape.block_dims),
        "rank": p.rank,
        "operators": {k: encode_operator(v) for k, v in p.operators.items()},
        "submodules": {k: encode_submodule(v) for k, v in p.submodules.items()},
    }
    if p.tolerances:
        out["tolerances"] = {k: p.tolerances[k] for k in _TOL_FIELDS if k in p.tolerances}
    return out


def dump_problem(p: ProblemFile) -> str:
    return json.dumps(problem_to_dict(p), indent=2) + "\n"


# -- decoding ---------------------------------------------------------------

def _decode_complex(v, path: str) -> complex:
    if isinstance(v, bool):
        raise ValidationError("expected a number or [re, im]", path)
    if isinstance(v, (int, float)):
        z = complex(v)
    elif isinstance(v, list) and len(v) == 2 and all(
            isinstance(c, (int, float)) and not isinstance(c, bool) for c in v):
        z = complex(v[0], v[1])
    else:
        raise ValidationError("expected a number or [re, im]", path)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValidationError("entries must be finite", path)
    return z


def _decode_matrix(v, n: int, path: str) -> np.ndarray:
    if not isinstance(v, list) or len(v) != n:
        raise ValidationError(f"expected {n} rows", path)
    out = np.zeros((n, n), dtype=complex)
    for r, row in enumerate(v):
        if not isinstance(row, list) or len(row) != n:
            raise ValidationError(f"expected {n} columns", f"{path}[{r}]")
        for c, z in enumerate(row):
            out[r, c] = _decode_complex(z, f"{path}[{r}][{c}]")
    return out


def decode_element(v, shape: AlgebraShape, path: str) -> AlgebraElement:
    if not isinstance(v, list) or len(v) != shape.num_blocks:
        raise ValidationError(f"expected {shape.num_blocks} blocks for algebra {shape}", path)
    return AlgebraElement(shape, [_decode_matrix(b, n, f"{path}[{i}]")
                                  for i, (n, b) in enumerate(zip(shape.block_dims, v))])


def decode_vector(v, shape: AlgebraShape, rank: int, path: str) -> ModuleVector:
    if not isinstance(v, list) or len(v) != rank:
        raise ValidationError(f"expected a vector with {rank} entries", path)
    return ModuleVector.from_entries([decode_element(e, shape, f"{path}[{j}]") for j, e in enumerate(v)])


def decode_operator(v, shape: AlgebraShape, rank: int, path: str) -> Operator:
    if not isinstance(v, list) or len(v) != rank:
        raise ValidationError(f"expected a {rank}x{rank} grid", path)
    rows = []
    for r, row in enumerate(v):
        if not isinstance(row, list) or len(row) != rank:
            raise ValidationError(f"expected {rank} entries", f"{path}[{r}]")
        rows.append([decode_element(a, shape, f"{path}[{r}][{c}]") for c, a in enumerate(row)])
    return Operator.from_grid(rows)


def _decode_submodule(v, shape, rank, tol: ToleranceConfig, path: str) -> Submodule:
    if not isinstance(v, dict) or len(set(v) & {"generators", "projection"}) != 1:
        raise ValidationError("a submodule needs exactly one of 'generators' or 'projection'", path)
    if "generators" in v:
        gens = v["generators"]
        if not isinstance(gens, list) or not gens:
            raise ValidationError("expected a nonempty list of generators", f"{path}.generators")
        return submodule_from_generators(
            [decode_vector(g, shape, rank, f"{path}.generators[{j}]") for j, g in enumerate(gens)])
    P = decode_operator(v["projection"], shape, rank, f"{path}.projection")
    try:
        return Submodule(P, tol=tol)
    except ValueError as exc:
        raise ValidationError(str(exc), path) from exc


def _decode_tolerances(v, path="tolerances") -> dict:
    if not isinstance(v, dict):
        raise ValidationError("expected an object", path)
    unknown = set(v) - set(_TOL_FIELDS)
    if unknown:
        raise ValidationError(f"unknown fields {sorted(unknown)}", path)
    out = {}
    for k in _TOL_FIELDS:
        if k not in v:
            continue
        val = v[k]
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise ValidationError("expected a number", f"{path}.{k}")
        out[k] = int(val) if k in ("seed", "search_budget") else float(val)
    try:
        ToleranceConfig().replace(**out)
    except ValueError as exc:
        raise ValidationError(str(exc), path) from exc
    return out


def problem_from_dict(doc: Any) -> ProblemFile:
    if not isinstance(doc, dict):
        raise ValidationError("problem must be a JSON object")
    unknown = set(doc) - {"algebra", "rank", "operators", "submodules", "tolerances"}
    if unknown:
        raise ValidationError(f"unknown fields {sorted(unknown)}")
    alg = doc.get("algebra")
    if isinstance(alg, int) and not isinstance(alg, bool):
        alg = [alg]
    if (not isinstance(alg, list) or not alg
            or not all(isinstance(n, int) and not isinstance(n, bool) and n >= 1 for n in alg)):
        raise ValidationError("expected a nonempty list of positive block sizes", "algebra")
    shape = AlgebraShape(tuple(alg))
    rank = doc.get("rank")
    if not isinstance(rank, int) or isinstance(rank, bool) or rank < 1:
        raise ValidationError("expected a positive integer", "rank")
    tolerances = _decode_tolerances(doc["tolerances"]) if "tolerances" in doc else {}
    tol = ToleranceConfig().replace(**tolerances)
    ops, subs = doc.get("operators", {}), doc.get("submodules", {})
    if not isinstance(ops, dict):
        raise ValidationError("expected an object", "operators")
    if not isinstance(subs, dict):
        raise ValidationError("expected an object", "submodules")
    return ProblemFile(
        shape=shape,
        rank=rank,
        operators={name: decode_operator(v, shape, rank, f"operators.{name}") for name, v in ops.items()},
        submodules={name: _decode_submodule(v, shape, rank, tol, f"submodules.{name}")
                    for name, v in subs.items()},
        tolerances=tolerances,
    )


def load_problem(text: str) -> ProblemFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    return problem_from_dict(doc)


def parse_problem(path) -> ProblemFile:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    return load_problem(text)


# -- reports ----------------------------------------------------------------

def report_to_dict(report: Report, shape: AlgebraShape | None = None, rank: int | None = None) -> dict:
    out = {
        "command": list(report.command),
        "seed": report.seed,
        "checks": [c.as_dict() for c in report.checks],
        "values": report.values,
    }
    if report.objects:
        ops = {k: v for k, v in report.objects.items() if isinstance(v, Operator)}
        subs = {k: v for k, v in report.objects.items() if isinstance(v, Submodule)}
        some = next(iter(report.objects.values()))
        out["objects"] = problem_to_dict(ProblemFile(
            shape=shape or some.shape, rank=rank or some.rank, operators=ops, submodules=subs))
    return out


def _fmt(x: float) -> str:
    return f"{x:.3e}"


def emit_report(report: Report, fmt: str = "human") -> str:
    """Render a report; ``machine`` output is JSON and re-parses with :func:`parse_report`."""
    if fmt == "machine":
        return json.dumps(report_to_dict(report), indent=2) + "\n"
    if fmt != "human":
        raise ValueError(f"unknown format {fmt!r}")
    lines = [f"# cstar-inv {' '.join(report.command)}  (seed {report.seed})"]
    if report.checks:
        width = max(24, max(len(c.name) for c in report.checks) + 2)
        lines.append(f"{'check':<{width}}{'residual':>12}  {'threshold':>12}  verdict")
        for c in report.checks:
            lines.append(f"{c.name:<{width}}{_fmt(c.residual):>12}  {_fmt(c.threshold):>12}  {c.verdict}")
    for k, v in report.values.items():
        lines.append(f"{k}: {json.dumps(v)}")
    for k, v in report.objects.items():
        kind = "operator" if isinstance(v, Operator) else "submodule"
        lines.append(f"object {k}: {kind} (use --format machine for entries)")
    return "\n".join(lines) + "\n"


def parse_report(text: str) -> Report:
    """Inverse of the machine format; verdicts are re-derived and cross-checked."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    try:
        checks = []
        for rec in doc["checks"]:
            c = Check(rec["name"], rec["residual"], rec["threshold"])
            if rec["verdict"] != c.verdict:
                raise ParseError(f"check {c.name}: verdict {rec['verdict']} does not follow "
                                 f"from residual and threshold")
            checks.append(c)
        report = Report(list(doc["command"]), int(doc["seed"]), checks, dict(doc["values"]))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed report: {exc}") from exc
    if "objects" in doc:
        objs = problem_from_dict(doc["objects"])
        report.objects.update(objs.operators)
        report.objects.update(objs.submodules)
    return report
