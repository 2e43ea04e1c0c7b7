"""Lie-algebra/Lie-group layer for Riccati equations.

A Riccati coefficient triple is read as the traceless-matrix curve

    a(t) = b0(t)*M0 + b1(t)*M1 + b2(t)*M2 = [[b1/2, b0], [-b2, -b1/2]],

and the matrix initial-value problem dA/dt = a(t) A, A(t_a) = I is
integrated on SL(2,R).  Applying the homography of A(t) to the initial
point then reproduces the Riccati solution, which is the basis of every
reduction in this package.

Sign convention: the curve enters with a plus sign, a(t) = +sum of
b_alpha*M_alpha.  With the basis above and the Möbius action used here,
this is the choice under which the reconstruction solves the original
equation (b = (1,0,0) gives A = [[1,t],[0,1]] and x(t) = x0 + t, which
solves dx/dt = 1), and it makes the gauge law on algebra curves exactly
consistent with the coefficient transformation law.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .expr import Expr, Integral, as_expr, evaluate
from .projline import Mat2, mobius_apply, ext
from .riccati import RiccatiEquation, Trajectory

__all__ = [
    "AlgebraCurve", "GroupTrajectory", "OneDimensionalTarget",
    "AffineSolvableTarget", "TargetSubalgebra",
    "algebra_curve_from_riccati", "integrate_group_equation",
    "reconstruct_solution", "solve_one_dimensional_target",
    "expm_traceless",
]


@dataclass(frozen=True)
class AlgebraCurve:
    """Curve b0(t)*M0 + b1(t)*M1 + b2(t)*M2 of traceless 2x2 matrices."""

    b0: Expr
    b1: Expr
    b2: Expr

    def matrix_at(self, t: float) -> Mat2:
        b0 = evaluate(self.b0, t)
        b1 = evaluate(self.b1, t)
        b2 = evaluate(self.b2, t)
        return Mat2(0.5 * b1, b0, -b2, -0.5 * b1)


@dataclass
class GroupTrajectory:
    """Sampled curve in SL(2,R) starting at the identity."""

    ts: list[float]
    mats: list[Mat2]
    step: float

    def __len__(self) -> int:
        return len(self.ts)

    def to_csv_text(self) -> str:
        lines = ["t,a11,a12,a21,a22"]
        for t, A in zip(self.ts, self.mats):
            lines.append(f"{t:.17g},{A.a11:.17g},{A.a12:.17g},{A.a21:.17g},{A.a22:.17g}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class OneDimensionalTarget:
    """One-dimensional solvable target: the span of
    c0*M0 + c1*M1 + c2*M2, traversed at rate phi(t)."""

    c0: float
    c1: float
    c2: float
    rate: Expr

    def __post_init__(self):
        if self.c0 == 0.0 and self.c1 == 0.0 and self.c2 == 0.0:
            raise ValueError("direction vector must be nonzero")
        object.__setattr__(self, "rate", as_expr(self.rate))

    def direction(self) -> Mat2:
        return Mat2(0.5 * self.c1, self.c0, -self.c2, -0.5 * self.c1)

    def equation(self) -> RiccatiEquation:
        """The target written back as a Riccati equation
        dy/dt = phi(t)*(c0 + c1*y + c2*y^2)."""
        r = self.rate
        return RiccatiEquation(r * self.c0, r * self.c1, r * self.c2)


@dataclass(frozen=True)
class AffineSolvableTarget:
    """Two-dimensional solvable (affine) target: a Riccati equation with
    b2 identically zero (linear) or b0 identically zero (Bernoulli)."""

    equation: RiccatiEquation


TargetSubalgebra = OneDimensionalTarget | AffineSolvableTarget


def algebra_curve_from_riccati(eq: RiccatiEquation) -> AlgebraCurve:
    """The coefficient triple carried over verbatim into the matrix basis."""
    return AlgebraCurve(eq.b0, eq.b1, eq.b2)


def _steps(t_span, step: float) -> tuple[float, float, int, float]:
    ta, tb = float(t_span[0]), float(t_span[1])
    if step <= 0.0:
        raise ValueError("step must be positive")
    if tb <= ta:
        raise ValueError("t_span must be increasing")
    n = max(1, round((tb - ta) / step))
    return ta, tb, n, (tb - ta) / n


def integrate_group_equation(a: AlgebraCurve, t_span, step: float = 1e-3) -> GroupTrajectory:
    """Solve dA/dt = a(t) A, A(t_a) = I, by RK4 on the four entries.

    After each step A is rescaled by 1/sqrt(det A); the RK4 update
    drifts from unit determinant only at truncation order, so the square
    root stays positive and the projection keeps |det A - 1| at roundoff.
    """
    ta, tb, n, h = _steps(t_span, step)
    b0e, b1e, b2e = a.b0.ev, a.b1.ev, a.b2.ev

    def amat(t: float) -> np.ndarray:
        b0, b1, b2 = b0e(t), b1e(t), b2e(t)
        return np.array([[0.5 * b1, b0], [-b2, -0.5 * b1]])

    A = np.eye(2)
    ts = [ta]
    mats = [Mat2.identity()]
    for i in range(n):
        t = ta + i * h
        k1 = amat(t) @ A
        k2 = amat(t + 0.5 * h) @ (A + 0.5 * h * k1)
        k3 = amat(t + 0.5 * h) @ (A + 0.5 * h * k2)
        k4 = amat(t + h) @ (A + h * k3)
        A = A + (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
        d = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
        if not math.isfinite(d) or d <= 0.0:
            raise ArithmeticError(
                f"determinant collapsed to {d:.3g} at t={t + h:.6g}; "
                "reduce the step")
        A = A / math.sqrt(d)
        ts.append(ta + (i + 1) * h)
        mats.append(Mat2(float(A[0, 0]), float(A[0, 1]),
                         float(A[1, 0]), float(A[1, 1])))
    return GroupTrajectory(ts, mats, step=h)


def reconstruct_solution(G: GroupTrajectory, x0) -> Trajectory:
    """Pointwise Möbius application of the group trajectory to x0."""
    if len(G) == 0:
        raise ValueError("empty group trajectory")
    x0 = ext(x0)
    xs = [mobius_apply(A, x0) for A in G.mats]
    return Trajectory(list(G.ts), xs, step=G.step)


def expm_traceless(N: Mat2, tau: float = 1.0) -> Mat2:
    """Closed-form exponential of tau*N for traceless N.

    By Cayley-Hamilton N^2 = -det(N)*I, so with u = -det(N)*tau^2 the
    exponential is f(u)*I + g(u)*tau*N where f, g are the even/odd series
    (cosh/cos and sinh/sin branches depending on the sign of u).
    """
    d = N.det()
    u = -d * tau * tau
    if abs(u) < 1e-8:
        # Series keeps full accuracy through the branch point u = 0.
        f = 1.0 + u / 2.0 + u * u / 24.0
        g = 1.0 + u / 6.0 + u * u / 120.0
    elif u > 0.0:
        mu = math.sqrt(u)
        f = math.cosh(mu)
        g = math.sinh(mu) / mu
    else:
        om = math.sqrt(-u)
        f = math.cos(om)
        g = math.sin(om) / om
    gt = g * tau
    return Mat2(f + gt * N.a11, gt * N.a12, gt * N.a21, f + gt * N.a22)


def solve_one_dimensional_target(target: OneDimensionalTarget, t_span,
                                 step: float = 1e-3) -> GroupTrajectory:
    """Closed-form group solution A(t) = exp(tau(t) * N) for a
    one-dimensional target, N the direction matrix and tau the running
    integral of the rate (numeric quadrature, anchored at t_a)."""
    if not isinstance(target, OneDimensionalTarget):
        raise TypeError("expected a one-dimensional target")
    ta, tb, n, h = _steps(t_span, step)
    N = target.direction()
    node = Integral(target.rate)
    tau0 = node.ev(ta)
    ts = []
    mats = []
    for i in range(n + 1):
        t = ta + i * h
        tau = node.ev(t) - tau0
        ts.append(t)
        mats.append(expm_traceless(N, tau))
    return GroupTrajectory(ts, mats, step=h)
