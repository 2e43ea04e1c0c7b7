import math
import random

import pytest

from conftest import max_traj_dev, random_equation

from riccati_sl2 import (AlgebraCurve, INF, Mat2, ONE, OneDimensionalTarget,
                         RiccatiEquation, ZERO, algebra_curve_from_riccati,
                         expm_traceless, integrate_direct,
                         integrate_group_equation, reconstruct_solution,
                         solve_one_dimensional_target)


def _entry_dev(A: Mat2, B: Mat2) -> float:
    return max(abs(A.a11 - B.a11), abs(A.a12 - B.a12),
               abs(A.a21 - B.a21), abs(A.a22 - B.a22))


def test_algebra_curve_matrix_form():
    a = algebra_curve_from_riccati(RiccatiEquation.of(1, 2, 3))
    m = a.matrix_at(0.0)
    assert (m.a11, m.a12, m.a21, m.a22) == (1.0, 1.0, -3.0, -1.0)
    assert m.trace() == 0.0


def test_zero_curve_stays_identity():
    a = AlgebraCurve(ZERO, ZERO, ZERO)
    G = integrate_group_equation(a, (0.0, 1.0), 1e-2)
    assert all(_entry_dev(m, Mat2.identity()) == 0.0 for m in G.mats)


def test_constant_m1_diagonal_exponential():
    a = AlgebraCurve(ZERO, ONE, ZERO)
    G = integrate_group_equation(a, (0.0, 2.0), 1e-3)
    for t, m in zip(G.ts, G.mats):
        ref = Mat2(math.exp(t / 2.0), 0.0, 0.0, math.exp(-t / 2.0))
        assert _entry_dev(m, ref) <= 1e-8


def test_constant_m0_shear_and_sign_convention():
    # b = (1,0,0) must reconstruct x(t) = x0 + t (solves dx/dt = 1).
    a = AlgebraCurve(ONE, ZERO, ZERO)
    G = integrate_group_equation(a, (0.0, 2.0), 1e-3)
    assert _entry_dev(G.mats[-1], Mat2(1.0, 2.0, 0.0, 1.0)) <= 1e-9
    traj = reconstruct_solution(G, 3.0)
    oracle = integrate_direct(RiccatiEquation.of(1, 0, 0), 3.0, (0.0, 2.0), 1e-3)
    assert max_traj_dev(traj.xs, oracle.xs) <= 1e-9


def test_reconstruction_m1_exponential():
    a = AlgebraCurve(ZERO, ONE, ZERO)
    G = integrate_group_equation(a, (0.0, 1.0), 1e-3)
    traj = reconstruct_solution(G, 3.0)
    oracle = integrate_direct(RiccatiEquation.of(0, 1, 0), 3.0, (0.0, 1.0), 1e-3)
    assert max_traj_dev(traj.xs, oracle.xs) <= 1e-7


def test_reconstruction_m2_through_infinity():
    # exp(t*M2) = [[1,0],[-t,1]]; x = 1/(1-t) crosses infinity at t = 1.
    a = AlgebraCurve(ZERO, ZERO, ONE)
    G = integrate_group_equation(a, (0.0, 2.0), 1e-3)
    traj = reconstruct_solution(G, 1.0)
    crossing = [i for i, x in enumerate(traj.xs) if x.is_inf
                or (i > 0 and not traj.xs[i - 1].is_inf and not x.is_inf
                    and abs(x.value) > 5 and abs(traj.xs[i - 1].value) > 5
                    and (x.value > 0) != (traj.xs[i - 1].value > 0))]
    assert crossing and abs(traj.ts[min(crossing)] - 1.0) <= 2e-3
    assert abs(traj.xs[-1].value - (-1.0)) <= 1e-7


def test_unit_determinant_maintained():
    rng = random.Random(5150)
    for _ in range(5):
        eq = random_equation(rng)
        G = integrate_group_equation(algebra_curve_from_riccati(eq), (0.0, 1.0), 1e-3)
        assert max(abs(m.det() - 1.0) for m in G.mats) <= 1e-9


def test_pipeline_matches_direct_oracle():
    rng = random.Random(777)
    for _ in range(5):
        eq = random_equation(rng)
        x0 = rng.uniform(-0.8, 0.8)
        G = integrate_group_equation(algebra_curve_from_riccati(eq), (0.0, 1.0), 1e-3)
        rec = reconstruct_solution(G, x0)
        direct = integrate_direct(eq, x0, (0.0, 1.0), 1e-3)
        assert max_traj_dev(rec.xs, direct.xs) <= 1e-6


def test_crossings_within_one_step():
    # dx/dt = x^2 from 1 blows up at t=1; both routes must cross together.
    eq = RiccatiEquation.of(0, 0, 1)
    G = integrate_group_equation(algebra_curve_from_riccati(eq), (0.0, 2.0), 1e-3)
    rec = reconstruct_solution(G, 1.0)
    direct = integrate_direct(eq, 1.0, (0.0, 2.0), 1e-3)

    def crossing_index(xs):
        for i in range(1, len(xs)):
            if xs[i].is_inf or xs[i - 1].is_inf:
                return i
            if (abs(xs[i].value) > 5 and abs(xs[i - 1].value) > 5
                    and (xs[i].value > 0) != (xs[i - 1].value > 0)):
                return i
        return None

    ia, ib = crossing_index(rec.xs), crossing_index(direct.xs)
    assert ia is not None and ib is not None
    assert abs(ia - ib) <= 1


def test_expm_traceless_branches():
    # nilpotent: M0
    m = expm_traceless(Mat2(0.0, 1.0, 0.0, 0.0), 1.5)
    assert _entry_dev(m, Mat2(1.0, 1.5, 0.0, 1.0)) == 0.0
    # hyperbolic: M1 (det < 0)
    m = expm_traceless(Mat2(0.5, 0.0, 0.0, -0.5), 2.0)
    assert _entry_dev(m, Mat2(math.e, 0.0, 0.0, 1.0 / math.e)) <= 1e-12
    # trigonometric: M0 + M2 (det = 1)
    m = expm_traceless(Mat2(0.0, 1.0, -1.0, 0.0), math.pi / 2.0)
    assert _entry_dev(m, Mat2(0.0, 1.0, -1.0, 0.0)) <= 1e-12


def test_one_dimensional_target_nilpotent():
    target = OneDimensionalTarget(1.0, 0.0, 0.0, ONE)
    G = solve_one_dimensional_target(target, (0.0, 2.0), 0.5)
    assert _entry_dev(G.mats[-1], Mat2(1.0, 2.0, 0.0, 1.0)) <= 1e-12


def test_one_dimensional_target_matches_group_integration():
    target = OneDimensionalTarget(1.0, -0.5, 1.0, ONE)
    G1 = solve_one_dimensional_target(target, (0.0, 2.0), 1e-3)
    teq = target.equation()
    G2 = integrate_group_equation(algebra_curve_from_riccati(teq), (0.0, 2.0), 1e-3)
    assert max(_entry_dev(a, b) for a, b in zip(G1.mats, G2.mats)) <= 1e-8


def test_one_dimensional_rotation_closed_form():
    target = OneDimensionalTarget(1.0, 0.0, 1.0, ONE)
    G = solve_one_dimensional_target(target, (0.0, math.pi / 2.0), 1e-3)
    assert _entry_dev(G.mats[-1], Mat2(0.0, 1.0, -1.0, 0.0)) <= 1e-9
    G2 = integrate_group_equation(
        algebra_curve_from_riccati(target.equation()), (0.0, math.pi / 2.0), 1e-3)
    assert max(_entry_dev(a, b) for a, b in zip(G.mats, G2.mats)) <= 1e-9


def test_zero_direction_rejected():
    with pytest.raises(ValueError):
        OneDimensionalTarget(0.0, 0.0, 0.0, ONE)


def test_reconstruct_from_infinity():
    a = AlgebraCurve(ZERO, ZERO, ONE)
    G = integrate_group_equation(a, (0.0, 0.5), 1e-2)
    traj = reconstruct_solution(G, INF)
    assert traj.xs[0].is_inf
    # Phi([[1,0],[-t,1]], inf) = 1/(-t) = -1/t
    assert abs(traj.xs[-1].value - (-2.0)) <= 1e-9


def test_group_csv():
    a = AlgebraCurve(ZERO, ONE, ZERO)
    G = integrate_group_equation(a, (0.0, 1.0), 0.5)
    lines = G.to_csv_text().strip().split("\n")
    assert lines[0] == "t,a11,a12,a21,a22"
    assert len(lines) == len(G) + 1
