"""Shared helpers: relative comparisons on the compactified line and
seeded random instance generators."""

import random

from riccati_sl2 import (Const, CurveSL2, RiccatiEquation, T, as_expr,
                         compose, exp)

# Points with |x| above this sit next to a crossing through infinity and
# are excluded from relative comparisons.
CAP = 10.0


def rel_dev(a, b, cap=CAP):
    """Relative deviation between two ExtReal samples, or None when the
    pair is too close to a crossing to compare."""
    if a.is_inf or b.is_inf:
        return None
    if abs(a.value) > cap or abs(b.value) > cap:
        return None
    return abs(a.value - b.value) / (1.0 + max(abs(a.value), abs(b.value)))


def max_traj_dev(xs_a, xs_b, min_frac=0.5, cap=CAP):
    """Max relative deviation over comparable samples; fails if too few
    samples were comparable for the comparison to mean anything."""
    assert len(xs_a) == len(xs_b)
    devs = [rel_dev(a, b, cap) for a, b in zip(xs_a, xs_b)]
    kept = [d for d in devs if d is not None]
    assert len(kept) >= min_frac * len(devs), (
        f"only {len(kept)}/{len(devs)} samples comparable")
    return max(kept)


def traj_vs_fn(traj, fn, cap=CAP):
    """Max absolute deviation of a trajectory against a closed-form
    reference, skipping samples near crossings."""
    worst = 0.0
    compared = 0
    for t, x in zip(traj.ts, traj.xs):
        y = fn(t)
        if x.is_inf or abs(x.value) > cap or abs(y) > cap:
            continue
        compared += 1
        worst = max(worst, abs(x.value - y))
    assert compared > len(traj.ts) // 2
    return worst


def grid(ta=0.0, tb=1.0, n=101):
    return [ta + i * (tb - ta) / (n - 1) for i in range(n)]


def random_poly(rng: random.Random, degree=3, scale=1.0):
    e = as_expr(rng.uniform(-scale, scale))
    for p in range(1, degree + 1):
        e = e + Const(rng.uniform(-scale, scale)) * T ** p
    return e


def random_coefficient(rng: random.Random):
    if rng.random() < 0.5:
        return random_poly(rng)
    return Const(rng.uniform(-1.0, 1.0)) * exp(Const(rng.uniform(-1.0, 1.0)) * T)


def random_equation(rng: random.Random) -> RiccatiEquation:
    return RiccatiEquation(random_coefficient(rng), random_coefficient(rng),
                           random_coefficient(rng))


def random_elementary_curve(rng: random.Random) -> CurveSL2:
    kind = rng.choice(("translation", "scaling", "inversion"))
    if kind == "translation":
        return CurveSL2.translation(random_poly(rng, degree=2))
    if kind == "scaling":
        return CurveSL2.scaling(exp(random_poly(rng, degree=2, scale=0.5)))
    return CurveSL2.inversion()


def random_curve(rng: random.Random, n_min=2, n_max=4) -> CurveSL2:
    c = random_elementary_curve(rng)
    for _ in range(rng.randint(n_min, n_max) - 1):
        c = compose(random_elementary_curve(rng), c)
    return c
