"""Exact convex regions: 2D halfplane intersection and low-dimensional LP.

A halfplane (or halfspace) constraint is a coefficient tuple
``(a_1, ..., a_d, c)`` meaning ``a . y + c <= 0``.  Everything is computed
over Fractions; emptiness decisions are exact.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Optional, Sequence

from .errors import InputError

Point2 = tuple[Fraction, Fraction]


def box_polygon(bound: Fraction) -> list[Point2]:
    m = Fraction(bound)
    return [(-m, -m), (m, -m), (m, m), (-m, m)]


def clip_polygon(polygon: list[Point2], constraint: Sequence[Fraction]) -> list[Point2]:
    """Sutherland-Hodgman clip of a convex polygon by a.y + c <= 0."""
    a1, a2, c = constraint
    if not polygon:
        return []

    def value(p: Point2) -> Fraction:
        return a1 * p[0] + a2 * p[1] + c

    out: list[Point2] = []
    n = len(polygon)
    for i in range(n):
        p, q = polygon[i], polygon[(i + 1) % n]
        fp, fq = value(p), value(q)
        if fp <= 0:
            out.append(p)
        if (fp < 0 < fq) or (fq < 0 < fp):
            s = fp / (fp - fq)
            out.append((p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])))
    dedup: list[Point2] = []
    for p in out:
        if not dedup or dedup[-1] != p:
            dedup.append(p)
    if len(dedup) > 1 and dedup[0] == dedup[-1]:
        dedup.pop()
    return dedup


def intersect_halfplanes(
    constraints: Sequence[Sequence[Fraction]], bound: Fraction
) -> list[Point2]:
    """The (possibly degenerate) polygon of all constraints inside a box."""
    poly = box_polygon(bound)
    for con in constraints:
        poly = clip_polygon(poly, con)
        if not poly:
            return []
    return poly


def polygon_representative(polygon: list[Point2]) -> Optional[Point2]:
    """Deterministic point of a nonempty clipped region: lexmin vertex."""
    if not polygon:
        return None
    return min(polygon)


INFEASIBLE = "infeasible"


def _lp_recurse(
    constraints: list[tuple[tuple[Fraction, ...], Fraction]],
    objective: tuple[Fraction, ...],
    bound: Fraction,
    rng: random.Random,
):
    """Minimize objective . x over constraints a . x <= b inside |x_i| <= bound.

    Seidel-style randomized incremental LP; exact rationals; returns the
    optimal point (tuple) or INFEASIBLE.  The box keeps every subproblem
    bounded.
    """
    dims = len(objective)
    if dims == 1:
        lo, hi = -bound, bound
        for (a,), b in constraints:
            if a > 0:
                hi = min(hi, b / a)
            elif a < 0:
                lo = max(lo, b / a)
            elif b < 0:
                return INFEASIBLE
        if lo > hi:
            return INFEASIBLE
        return (lo,) if objective[0] >= 0 else (hi,)

    order = list(constraints)
    rng.shuffle(order)
    x = tuple(-bound if objective[i] >= 0 else bound for i in range(dims))
    seen: list[tuple[tuple[Fraction, ...], Fraction]] = []
    for a, b in order:
        seen.append((a, b))
        if sum(ai * xi for ai, xi in zip(a, x)) <= b:
            continue
        # optimum lies on a . x = b; eliminate the largest-coefficient variable
        piv = max(range(dims), key=lambda j: (abs(a[j]), -j))
        if a[piv] == 0:
            return INFEASIBLE
        sub: list[tuple[tuple[Fraction, ...], Fraction]] = []

        def reduce_row(row: tuple[Fraction, ...], rhs: Fraction):
            factor = row[piv] / a[piv]
            new_row = tuple(
                row[j] - factor * a[j] for j in range(dims) if j != piv
            )
            return new_row, rhs - factor * b

        for row, rhs in seen[:-1]:
            sub.append(reduce_row(row, rhs))
        # box constraints of the eliminated variable
        unit = [Fraction(0)] * dims
        unit[piv] = Fraction(1)
        sub.append(reduce_row(tuple(unit), bound))
        unit[piv] = Fraction(-1)
        sub.append(reduce_row(tuple(unit), bound))
        factor_obj = objective[piv] / a[piv]
        sub_obj = tuple(
            objective[j] - factor_obj * a[j] for j in range(dims) if j != piv
        )
        res = _lp_recurse(sub, sub_obj, bound, rng)
        if res == INFEASIBLE:
            return INFEASIBLE
        partial = list(res)
        rest = sum(
            a[j] * partial[k]
            for k, j in enumerate(j for j in range(dims) if j != piv)
        )
        x_piv = (b - rest) / a[piv]
        full = []
        it = iter(partial)
        for j in range(dims):
            full.append(x_piv if j == piv else next(it))
        x = tuple(full)
    return x


def lp_minimize(
    constraints: Sequence[Sequence[Fraction]],
    objective: Sequence[Fraction],
    bound: Fraction,
    seed: int = 0x5EED,
):
    """Exact LP inside a box; constraints are (a_1..a_d, c) rows for a.x + c <= 0."""
    dims = len(objective)
    rows = []
    for con in constraints:
        if len(con) != dims + 1:
            raise InputError("constraint arity mismatch")
        rows.append((tuple(Fraction(v) for v in con[:dims]), Fraction(-con[dims])))
    rng = random.Random(seed)
    return _lp_recurse(rows, tuple(Fraction(v) for v in objective), Fraction(bound), rng)


def lexmin_point(
    constraints: Sequence[Sequence[Fraction]], dims: int, bound: Fraction
) -> Optional[tuple[Fraction, ...]]:
    """Lexicographically smallest feasible point, or None if empty."""
    remaining = [list(map(Fraction, con)) for con in constraints]
    values: list[Fraction] = []
    for k in range(dims):
        sub_dims = dims - k
        objective = [Fraction(0)] * sub_dims
        objective[0] = Fraction(1)
        res = lp_minimize(remaining, objective, bound)
        if res == INFEASIBLE:
            return None
        v = res[0]
        values.append(v)
        next_rows = []
        for con in remaining:
            a0 = con[0]
            rest = con[1:sub_dims]
            c = con[sub_dims]
            next_rows.append(list(rest) + [c + a0 * v])
        remaining = next_rows
    return tuple(values)
