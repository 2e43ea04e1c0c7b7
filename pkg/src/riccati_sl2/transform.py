"""The group of SL(2,R)-valued curves and its actions.

A curve with entries (alpha, beta, gamma, delta) and unit determinant
acts on solutions pointwise by the homography
x'(t) = (alpha(t)*x(t) + beta(t)) / (gamma(t)*x(t) + delta(t)),
and on Riccati equations by the affine action

    b2' = delta^2*b2 - delta*gamma*b1 + gamma^2*b0
          + gamma*delta' - delta*gamma'
    b1' = -2*beta*delta*b2 + (alpha*delta + beta*gamma)*b1
          - 2*alpha*gamma*b0
          + delta*alpha' - alpha*delta' + beta*gamma' - gamma*beta'
    b0' = beta^2*b2 - alpha*beta*b1 + alpha^2*b0
          + alpha*beta' - beta*alpha'

(primes on curve entries are t-derivatives, produced symbolically).  The
same action on the matrix side is the gauge law
a'(t) = A(t) a(t) A(t)^-1 + dA/dt(t) A(t)^-1, and under the sign
convention of :mod:`riccati_sl2.sl2` the two are identical.

Curve entries are symbolic expressions by construction, so every
derivative term in the affine action is exact; numerically sampled
curves are not representable here.
"""

from __future__ import annotations

from dataclasses import dataclass

from .expr import (Expr, ZERO, ONE, Const, EvalDomainError, as_expr,
                   differentiate, evaluate, sqrt)
from .projline import ExtReal, Mat2, mobius_apply, ext
from .riccati import RiccatiEquation
from .sl2 import AlgebraCurve

__all__ = [
    "CurveSL2", "theta_apply", "transform_coefficients",
    "gauge_transform_algebra", "compose", "inverse",
    "normalize_negative_determinant", "NormalizationError",
]


class NormalizationError(ValueError):
    pass


@dataclass(frozen=True)
class CurveSL2:
    """Smooth SL(2,R)-valued curve with symbolic entries."""

    alpha: Expr
    beta: Expr
    gamma: Expr
    delta: Expr

    @classmethod
    def of(cls, alpha, beta, gamma, delta) -> "CurveSL2":
        return cls(as_expr(alpha), as_expr(beta), as_expr(gamma), as_expr(delta))

    @classmethod
    def identity(cls) -> "CurveSL2":
        return cls(ONE, ZERO, ZERO, ONE)

    @classmethod
    def translation(cls, c) -> "CurveSL2":
        """x -> x + c(t)."""
        return cls(ONE, as_expr(c), ZERO, ONE)

    @classmethod
    def scaling(cls, lam) -> "CurveSL2":
        """x -> lam(t)*x for positive lam."""
        lam = as_expr(lam)
        return cls(sqrt(lam), ZERO, ZERO, ONE / sqrt(lam))

    @classmethod
    def inversion(cls) -> "CurveSL2":
        """x -> -1/x."""
        return cls(ZERO, ONE, Const(-1.0), ZERO)

    def matrix_at(self, t: float) -> Mat2:
        return Mat2(evaluate(self.alpha, t), evaluate(self.beta, t),
                    evaluate(self.gamma, t), evaluate(self.delta, t))

    def det_expr(self) -> Expr:
        return self.alpha * self.delta - self.beta * self.gamma

    def max_det_deviation(self, grid) -> float:
        """max |det - 1| over the grid."""
        d = self.det_expr()
        return max(abs(evaluate(d, t) - 1.0) for t in grid)

    def entries(self) -> tuple[Expr, Expr, Expr, Expr]:
        return (self.alpha, self.beta, self.gamma, self.delta)


def theta_apply(c: CurveSL2, t: float, x) -> ExtReal:
    """Apply the curve's homography at time t to a point of the
    compactified line."""
    return mobius_apply(c.matrix_at(t), ext(x))


def transform_coefficients(eq: RiccatiEquation, c: CurveSL2) -> RiccatiEquation:
    """The affine action of the curve on the coefficient triple, with
    all derivative terms taken symbolically."""
    al, be, ga, de = c.entries()
    dal, dbe, dga, dde = (differentiate(al), differentiate(be),
                          differentiate(ga), differentiate(de))
    b0, b1, b2 = eq.b0, eq.b1, eq.b2
    nb2 = de * de * b2 - de * ga * b1 + ga * ga * b0 + ga * dde - de * dga
    nb1 = (-2.0 * be * de * b2 + (al * de + be * ga) * b1
           - 2.0 * al * ga * b0
           + de * dal - al * dde + be * dga - ga * dbe)
    nb0 = be * be * b2 - al * be * b1 + al * al * b0 + al * dbe - be * dal
    return RiccatiEquation(nb0, nb1, nb2)


def _mat_mul(P, Q):
    return [
        [P[0][0] * Q[0][0] + P[0][1] * Q[1][0], P[0][0] * Q[0][1] + P[0][1] * Q[1][1]],
        [P[1][0] * Q[0][0] + P[1][1] * Q[1][0], P[1][0] * Q[0][1] + P[1][1] * Q[1][1]],
    ]


def gauge_transform_algebra(a: AlgebraCurve, c: CurveSL2) -> AlgebraCurve:
    """Gauge transformation a' = A a A^-1 + dA/dt A^-1 of an algebra
    curve, expanded symbolically in the M-basis."""
    al, be, ga, de = c.entries()
    abar = [[al, be], [ga, de]]
    # Inverse of a unit-determinant curve.
    ainv = [[de, -be], [-ga, al]]
    adot = [[differentiate(al), differentiate(be)],
            [differentiate(ga), differentiate(de)]]
    amat = [[0.5 * a.b1, a.b0], [-a.b2, -0.5 * a.b1]]
    conj = _mat_mul(_mat_mul(abar, amat), ainv)
    inhom = _mat_mul(adot, ainv)
    p11 = conj[0][0] + inhom[0][0]
    p12 = conj[0][1] + inhom[0][1]
    p21 = conj[1][0] + inhom[1][0]
    p22 = conj[1][1] + inhom[1][1]
    # Read coefficients back off the basis: b0' = p12, b2' = -p21,
    # b1'/2 = p11 = -p22 (tracelessness holds up to det == 1, so the
    # difference is used for robustness).
    return AlgebraCurve(p12, p11 - p22, -p21)


def compose(c2: CurveSL2, c1: CurveSL2) -> CurveSL2:
    """Pointwise matrix product c2(t) * c1(t)."""
    a2, b2_, g2, d2 = c2.entries()
    a1, b1_, g1, d1 = c1.entries()
    return CurveSL2(
        a2 * a1 + b2_ * g1, a2 * b1_ + b2_ * d1,
        g2 * a1 + d2 * g1, g2 * b1_ + d2 * d1,
    )


def inverse(c: CurveSL2) -> CurveSL2:
    """Pointwise inverse, valid for unit-determinant curves."""
    return CurveSL2(c.delta, -c.beta, -c.gamma, c.alpha)


def normalize_negative_determinant(entries, grid) -> tuple[bool, CurveSL2]:
    """Factor a homography with negative determinant through the flip
    y -> -y.

    ``entries`` is a 4-tuple (alpha, beta, gamma, delta) of expressions.
    If the determinant is identically negative on the grid the map
    factors as h = c o flip, where c(y) = h(-y) has entries
    (-alpha, beta, -gamma, delta) rescaled by the positive square root
    of its determinant so that det(c) = +1; the flag True is returned
    together with c.  A positive determinant needs no flip: the entries
    are rescaled to unit determinant and the flag is False.  A
    determinant that changes sign (or vanishes) on the grid is an error.
    """
    al, be, ga, de = (as_expr(e) for e in entries)
    det = al * de - be * ga
    try:
        vals = [evaluate(det, t) for t in grid]
    except EvalDomainError as exc:
        raise NormalizationError(f"determinant not evaluable on grid: {exc}") from exc
    if all(v < 0.0 for v in vals):
        s = sqrt(-det)
        return True, CurveSL2(-al / s, be / s, -ga / s, de / s)
    if all(v > 0.0 for v in vals):
        if max(abs(v - 1.0) for v in vals) <= 1e-9:
            return False, CurveSL2(al, be, ga, de)
        s = sqrt(det)
        return False, CurveSL2(al / s, be / s, ga / s, de / s)
    raise NormalizationError(
        "determinant changes sign or vanishes on the grid; "
        "the homography does not normalize")
