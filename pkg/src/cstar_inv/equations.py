"""The Douglas equation ``TX = S`` and the equation ``STS = TS``."""

from __future__ import annotations

from dataclasses import dataclass, field

from .algebra import DEFAULT_TOL, ToleranceConfig
from .errors import NotInvariant, NotSolvable, PreconditionFailed
from .operators import Operator, canonical_projections, kernel_projection, moore_penrose
from .report import Check
from .submodules import Submodule, invariance_residual

__all__ = [
    "range_inclusion_residual",
    "douglas_solution",
    "sts_solution",
    "sts_threshold",
    "verify_sts",
    "StsReport",
    "kernel_tower_invariance",
    "TowerReport",
]


def range_inclusion_residual(T: Operator, S: Operator) -> float:
    """``||(I - T T^+) S||``; zero exactly when ``Ran(S) ⊆ Ran(T)``."""
    range_proj, _ = canonical_projections(T)
    return ((T.identity() - range_proj) @ S).norm()


def douglas_solution(T: Operator, S: Operator, Z: Operator | None = None,
                     tol: ToleranceConfig = DEFAULT_TOL) -> Operator:
    """A solution ``X = T^+ S + (I - T^+ T) Z`` of ``TX = S``.

    Sweeping ``Z`` over all operators gives every solution. Raises
    :class:`NotSolvable` when ``Ran(S)`` is not contained in ``Ran(T)``.
    """
    residual = range_inclusion_residual(T, S)
    threshold = tol.threshold(S.norm())
    if residual > threshold:
        raise NotSolvable(f"Ran(S) is not contained in Ran(T): residual {residual:.3e} "
                          f"exceeds {threshold:.3e}", residual, threshold)
    Tp = moore_penrose(T)
    X = Tp @ S
    if Z is not None:
        X = X + (T.identity() - Tp @ T) @ Z
    return X


def sts_solution(T: Operator, W: Submodule, Z: Operator | None = None,
                 tol: ToleranceConfig = DEFAULT_TOL) -> Operator:
    """``S = Q + P Z (I - Q)`` with ``P = P_W`` and ``Q`` the projection onto ``Ran(TP)``.

    Requires ``W`` to be ``T``-invariant; then ``STS = TS``. With ``Z = 0``
    the solution is the projection ``Q`` itself.
    """
    residual = invariance_residual(T, W)
    threshold = tol.threshold(T.norm())
    if residual > threshold:
        raise NotInvariant(f"W is not T-invariant: ||PTP - TP|| = {residual:.3e} "
                           f"exceeds {threshold:.3e}", residual, threshold)
    P = W.projection
    Q, _ = canonical_projections(T @ P)
    if Z is None:
        return Q
    return Q + P @ Z @ (Q.identity() - Q)


def sts_threshold(S: Operator, T: Operator, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    s = max(S.norm(), 1.0)
    return tol.threshold(T.norm() * s * s)


@dataclass
class StsReport:
    residual: float
    threshold: float
    nonzero: bool
    not_identity: bool
    submodule: Submodule | None = None

    @property
    def solves(self) -> bool:
        return self.residual <= self.threshold

    @property
    def nontrivial(self) -> bool:
        return self.nonzero and self.not_identity

    def checks(self) -> list[Check]:
        return [Check("sts.residual", self.residual, self.threshold)]


def verify_sts(S: Operator, T: Operator, tol: ToleranceConfig = DEFAULT_TOL) -> StsReport:
    """Residual of ``STS = TS`` and, for a nontrivial solution, the ``T``-invariant ``Ker(I - S)``."""
    TS = T @ S
    residual = (S @ TS - TS).norm()
    guard = 10 * tol.atol
    report = StsReport(
        residual=residual,
        threshold=sts_threshold(S, T, tol),
        nonzero=S.norm() > guard,
        not_identity=(S.identity() - S).norm() > guard,
    )
    if report.solves and report.nontrivial:
        report.submodule = Submodule(kernel_projection(S.identity() - S))
    return report


@dataclass
class TowerReport:
    n_max: int
    checks: list[Check] = field(default_factory=list)
    kernels: list[Submodule] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def kernel_tower_invariance(T: Operator, S: Operator, n_max: int,
                            tol: ToleranceConfig = DEFAULT_TOL) -> TowerReport:
    """Check that ``T`` maps ``Ker((I - S)^n)`` into ``Ker(I - S)`` for ``n <= n_max``.

    ``S`` must solve ``STS = TS``. Each level contributes two checks: the
    mapping residual ``||(I - K_1) T K_n||`` and invariance of ``Ker((I - S)^n)``.
    """
    if n_max < 1:
        raise ValueError("n_max must be a positive integer")
    sts = verify_sts(S, T, tol)
    if not sts.solves:
        raise PreconditionFailed(f"S does not solve STS = TS: residual {sts.residual:.3e} "
                                 f"exceeds {sts.threshold:.3e}", sts.residual, sts.threshold)
    one = S.identity()
    L = one - S
    K1 = kernel_projection(L)
    report = TowerReport(n_max)
    threshold = tol.threshold(T.norm())
    power = L
    for n in range(1, n_max + 1):
        Kn = K1 if n == 1 else kernel_projection(power)
        Wn = Submodule(Kn)
        report.kernels.append(Wn)
        report.checks.append(Check(f"tower.maps_into_ker[n={n}]", ((one - K1) @ T @ Kn).norm(), threshold))
        report.checks.append(Check(f"tower.invariant[n={n}]", invariance_residual(T, Wn), threshold))
        power = power @ L
    return report
