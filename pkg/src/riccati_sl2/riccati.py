"""Riccati equations as data, and a chart-switching fixed-step RK4
integrator on the compactified line.

The integrator is the ground-truth oracle for everything else in the
package: fixed step, deterministic, and complete through blow-up.  When
|x| grows past 1 it switches to the chart w = -1/x, in which the
equation is again a Riccati equation (coefficients (b2, -b1, b0) read as
dw/dt = b0*w^2 - b1*w + b2), and switches back when |w| > 1.  A sample
with |w| <= 1e-12 is recorded as the point at infinity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .expr import Expr, EvalDomainError, QuadratureError, as_expr, evaluate
from .projline import INF, ExtReal, ext

__all__ = ["RiccatiEquation", "Trajectory", "rhs", "integrate_direct"]

# |w| at or below this in the inverse chart is recorded as infinity.
_BLOWUP_TOL = 1e-12


@dataclass(frozen=True)
class RiccatiEquation:
    """Coefficient triple of dx/dt = b0(t) + b1(t)*x + b2(t)*x^2."""

    b0: Expr
    b1: Expr
    b2: Expr

    @classmethod
    def of(cls, b0, b1, b2) -> "RiccatiEquation":
        """Build from expressions or plain numbers."""
        return cls(as_expr(b0), as_expr(b1), as_expr(b2))

    def coefficients_at(self, t: float) -> tuple[float, float, float]:
        return (evaluate(self.b0, t), evaluate(self.b1, t), evaluate(self.b2, t))


def rhs(eq: RiccatiEquation, t: float, x: float) -> float:
    """Right-hand side b0(t) + b1(t)*x + b2(t)*x^2 at a finite point."""
    b0, b1, b2 = eq.coefficients_at(t)
    return b0 + x * (b1 + x * b2)


@dataclass
class Trajectory:
    """Sampled solution curve on the compactified line.

    ``ts`` is strictly increasing; ``xs`` holds one point per sample.
    ``chart_switches`` records (t, from_chart, to_chart) events and
    ``error`` is set when integration was truncated by a coefficient
    domain error.
    """

    ts: list[float]
    xs: list[ExtReal]
    step: float
    chart_switches: list[tuple[float, str, str]] = field(default_factory=list)
    error: str | None = None

    def __len__(self) -> int:
        return len(self.ts)

    def to_csv_text(self) -> str:
        lines = ["t,x"]
        for t, x in zip(self.ts, self.xs):
            lines.append(f"{t:.17g},{x}")
        return "\n".join(lines) + "\n"


def _emit(chart: str, u: float) -> ExtReal:
    if chart == "x":
        return ExtReal(u)
    if abs(u) <= _BLOWUP_TOL:
        return INF
    return ExtReal(-1.0 / u)


def integrate_direct(eq: RiccatiEquation, x0, t_span, step: float = 1e-3) -> Trajectory:
    """Integrate the equation from x(t_a) = x0 over t_span = (t_a, t_b)
    with classical fixed-step RK4, continuing through blow-up via the
    w = -1/x chart."""
    ta, tb = float(t_span[0]), float(t_span[1])
    if step <= 0.0:
        raise ValueError("step must be positive")
    if tb <= ta:
        raise ValueError("t_span must be increasing")
    n = max(1, round((tb - ta) / step))
    h = (tb - ta) / n

    x0 = ext(x0)
    if x0.is_inf:
        chart, u = "w", 0.0
    elif abs(x0.value) > 1.0:
        chart, u = "w", -1.0 / x0.value
    else:
        chart, u = "x", x0.value

    b0e, b1e, b2e = eq.b0.ev, eq.b1.ev, eq.b2.ev

    def f(t: float, v: float, ch: str) -> float:
        b0, b1, b2 = b0e(t), b1e(t), b2e(t)
        if ch == "x":
            return b0 + v * (b1 + v * b2)
        return b2 + v * (-b1 + v * b0)

    ts = [ta]
    xs = [_emit(chart, u)]
    switches: list[tuple[float, str, str]] = []
    error = None
    for i in range(n):
        t = ta + i * h
        try:
            k1 = f(t, u, chart)
            k2 = f(t + 0.5 * h, u + 0.5 * h * k1, chart)
            k3 = f(t + 0.5 * h, u + 0.5 * h * k2, chart)
            k4 = f(t + h, u + h * k3, chart)
        except (EvalDomainError, QuadratureError, OverflowError) as exc:
            error = str(exc)
            break
        u = u + (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
        if not math.isfinite(u):
            error = f"state became non-finite at t={ta + (i + 1) * h:.6g}"
            break
        t_next = ta + (i + 1) * h
        if abs(u) > 1.0:
            new_chart = "w" if chart == "x" else "x"
            switches.append((t_next, chart, new_chart))
            u = -1.0 / u
            chart = new_chart
        ts.append(t_next)
        xs.append(_emit(chart, u))
    return Trajectory(ts, xs, step=h, chart_switches=switches, error=error)
