"""Exact search for deepest hyperplanes, Tukey medians, and center points.

Maximizers of regression depth are attained at hyperplanes through d pool
generators (distinct site classes augmented with the axis directions at
infinity): approaching such a hyperplane from any adjacent position can only
drop sites off it, and closed counting never rewards that.  Vertical bases
are rejected by regression depth itself, so the search additionally
evaluates perturbed nonvertical variants of each vertical base, obtained by
tilting it just enough to shed the incident sites ("shed variants").

Tukey medians are found by binary search on the depth level t: the set of
points with location depth at least t is the intersection of closed
halfspaces bounded by hyperplanes through d site classes, computed exactly
as a convex polygon in 2D and probed by rational LP in 3D.  The reported
point is re-certified through location_depth; a brute-force candidate scan
backs up degenerate configurations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .depth import (
    DepthCertificate,
    PencilEvaluator,
    SiteSet,
    location_depth,
)
from .errors import InputError, UnsupportedDimensionError, VerificationError
from .geometry import (
    HomoPoint,
    Hyperplane,
    ProjectiveTransform,
    side_of,
    sign,
    transform_point_to_vertical_infinity,
)
from .regions import intersect_halfplanes, lexmin_point, polygon_representative
from .depth import _between_direction, _primitive_pair, _sort_directions


def ceil_div(a: int, b: int) -> int:
    return -(-a // b)


@dataclass(frozen=True)
class FitResult:
    """A hyperplane with its certified depth and search bookkeeping."""

    hyperplane: Hyperplane
    depth: DepthCertificate
    candidates_examined: int
    exact: bool
    fallback: bool = False


def _pool_with_axes(sites: SiteSet) -> list[HomoPoint]:
    """Distinct site classes in first-occurrence order, then axis directions."""
    d = sites.dimension
    pool: list[HomoPoint] = []
    seen: set[tuple[int, ...]] = set()
    for p in sites.sites:
        if p.coords not in seen:
            seen.add(p.coords)
            pool.append(p)
    for axis in range(d):
        vec = [0] * (d + 1)
        vec[axis] = 1
        q = HomoPoint.from_coords(vec)
        if q.coords not in seen:
            seen.add(q.coords)
            pool.append(q)
    return pool


def _shed_variants_2d(base: Hyperplane, sites: SiteSet):
    """Nonvertical perturbed variants of a vertical 2D base line.

    The tilt space around the base is spanned by u1 = (0,1,0) (which makes
    the result nonvertical) and u2 = (0,0,1); sites on the base acquire the
    sign of their tilt functional.  Enumerating the angular cells of those
    functionals, keeping only cells with a nonzero u1 component, covers
    every nonvertical position adjacent to the base.
    """
    u1, u2 = (0, 1, 0), (0, 0, 1)
    base_sides = [side_of(base, p) for p in sites.sites]
    zero_pos = [i for i, s in enumerate(base_sides) if s == 0]
    dirs = {(0, 1), (0, -1)}  # kernel of the "stay vertical" functional
    funcs = {}
    for i in zero_pos:
        p = sites.sites[i].coords
        funcs[i] = (p[1], p[2])
        a, b = funcs[i]
        dirs.add(_primitive_pair((-b, a)))
        dirs.add(_primitive_pair((b, -a)))
    ordered = _sort_directions(dirs)
    k = 0
    for idx in range(len(ordered)):
        rep = _between_direction(ordered[idx], ordered[(idx + 1) % len(ordered)])
        if rep is None:
            continue
        alpha, beta = rep
        if alpha == 0:
            continue  # still vertical
        sides = list(base_sides)
        for i in zero_pos:
            a, b = funcs[i]
            sides[i] = sign(alpha * a + beta * b)
        tilt = (0, alpha, beta)
        yield (k, sides, [tilt])
        k += 1


def _shed_variants_3d(base: Hyperplane, sites: SiteSet):
    """Hierarchically tilted nonvertical variants of a vertical 3D base plane."""
    u1 = (0, 0, 1, 0)  # restores a nonzero z coefficient
    u2 = (0, 0, 0, 1)
    u3 = (1, 0, 0, 0) if base.coeffs[1] != 0 else (0, 1, 0, 0)
    base_sides = [side_of(base, p) for p in sites.sites]
    zero_pos = [i for i, s in enumerate(base_sides) if s == 0]
    funcs = {
        i: tuple(_dot(u, sites.sites[i].coords) for u in (u1, u2, u3))
        for i in zero_pos
    }
    k = 0
    for signs in itertools.product((1, -1), repeat=3):
        sides = list(base_sides)
        ok = True
        for i in zero_pos:
            s = 0
            for sg, f in zip(signs, funcs[i]):
                if f:
                    s = sg * sign(f)
                    break
            if s == 0:
                ok = False
                break
            sides[i] = s
        if not ok:
            continue
        tilts = [
            tuple(sg * c for c in u) for sg, u in zip(signs, (u1, u2, u3))
        ]
        yield (k, sides, tilts)
        k += 1


def _dot(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(x * y for x, y in zip(a, b))


def _materialize_tilts(base: Hyperplane, tilts, sites: SiteSet) -> Hyperplane:
    """Apply tilt vectors in order, each scaled to preserve settled signs."""
    cur = [Fraction(c) for c in base.coeffs]
    for t in tilts:
        eps = None
        for p in sites.sites:
            cv = sum(c * v for c, v in zip(cur, p.coords))
            tv = _dot(t, p.coords)
            if cv != 0 and tv != 0:
                bound = abs(cv) / abs(Fraction(tv))
                if eps is None or bound < eps:
                    eps = bound
        eps = Fraction(1) if eps is None else eps / 2
        cur = [c + eps * tv for c, tv in zip(cur, t)]
    return Hyperplane.from_coeffs(cur)


def _fit_candidates(sites: SiteSet) -> Iterator[tuple]:
    """Candidate hyperplanes for the deepest-fit search, deterministic order.

    Yields (generator_key, variant_rank, kind, payload): kind "plain" with a
    nonvertical base hyperplane, or "shed" with (base, sides, tilts).
    """
    d = sites.dimension
    pool = _pool_with_axes(sites)
    seen: set[tuple[int, ...]] = set()
    for combo in itertools.combinations(range(len(pool)), d):
        try:
            h = Hyperplane.through_points([pool[i] for i in combo])
        except InputError:
            continue
        key = h.canonical_key()
        if key in seen:
            continue
        seen.add(key)
        if not h.is_vertical:
            yield (combo, -1, "plain", h)
        elif key != Hyperplane.infinity(d).canonical_key():
            variants = (
                _shed_variants_2d(h, sites) if d == 2 else _shed_variants_3d(h, sites)
            )
            for rank, sides, tilts in variants:
                yield (combo, rank, "shed", (h, sides, tilts))


class _VerticalSweep2D:
    """Evaluates 2D regression depth by sweeping the vertical pencil once.

    Cells of the pencil are the gaps between distinct site x-coordinates
    (plus the two outer cells, which also realize the limits toward the line
    at infinity); within a cell the wedge counts are constant, so prefix
    sums over the sorted sites give the exact minimum.
    """

    def __init__(self, sites: SiteSet):
        self.sites = sites
        vinf = HomoPoint.vertical_infinity(2)
        self.b_positions = [
            i for i, p in enumerate(sites.sites) if p.coords == vinf.coords
        ]
        bset = set(self.b_positions)
        finite: list[tuple[Fraction, int]] = []
        self.infinite_rows: list[tuple[int, int]] = []
        for i, p in enumerate(sites.sites):
            if i in bset:
                continue
            if p.is_finite:
                finite.append((Fraction(p.coords[0], p.coords[2]), i))
            else:
                self.infinite_rows.append((i, sign(p.coords[0])))
        finite.sort()
        self.groups: list[list[int]] = []
        last = None
        for xval, i in finite:
            if xval != last:
                self.groups.append([])
                last = xval
            self.groups[-1].append(i)

    def value_from_sides(self, side_h: Sequence[int]) -> int:
        a_count = sum(1 for s in side_h if s == 0)
        # start with the cell left of every site: all finite sites are "above"
        plus = sum(1 for g in self.groups for i in g if side_h[i] > 0)
        minus = sum(1 for g in self.groups for i in g if side_h[i] < 0)
        inf_plus = inf_minus = 0
        for i, sg in self.infinite_rows:
            prod = side_h[i] * sg
            if prod > 0:
                inf_plus += 1
            elif prod < 0:
                inf_minus += 1
        best = min(plus + inf_plus, minus + inf_minus)
        for group in self.groups:
            for i in group:
                s = side_h[i]
                if s > 0:
                    plus -= 1
                    minus += 1
                elif s < 0:
                    minus -= 1
                    plus += 1
            best = min(best, plus + inf_plus, minus + inf_minus)
        return a_count + len(self.b_positions) + best


def _search_deepest(sites: SiteSet, value_of) -> tuple:
    best = None
    examined = 0
    for gens, rank, kind, payload in _fit_candidates(sites):
        examined += 1
        if kind == "plain":
            value = value_of(payload, None)
        else:
            _, sides, _ = payload
            value = value_of(None, sides)
        key = (-value, gens, rank)
        if best is None or key < best[0]:
            best = (key, kind, payload)
    if best is None:
        raise InputError("no candidate hyperplanes; need at least one site")
    return best, examined


def _finish_fit(sites: SiteSet, best, examined: int) -> FitResult:
    (neg_value, _, _), kind, payload = best
    predicted = -neg_value
    if kind == "plain":
        h = payload
    else:
        base, sides, tilts = payload
        h = _materialize_tilts(base, tilts, sites)
        realized = [side_of(h, p) for p in sites.sites]
        if realized != sides:
            raise VerificationError("materialized shed variant changed a site side")
    ev = PencilEvaluator(HomoPoint.vertical_infinity(sites.dimension), sites)
    cert = ev.certificate(h)
    if cert.value != predicted:
        raise VerificationError(
            f"search value {predicted} disagrees with certificate {cert.value}"
        )
    n = len(sites)
    bound = ceil_div(n, sites.dimension + 1)
    if cert.value < bound:
        raise VerificationError(
            f"deepest fit {cert.value} below the guaranteed bound {bound}"
        )
    return FitResult(h, cert, examined, exact=True)


def deepest_hyperplane(sites: SiteSet) -> FitResult:
    """Exact maximizer of regression depth over the candidate family."""
    if sites.dimension not in (2, 3):
        raise UnsupportedDimensionError("exact deepest-fit search needs d in {2, 3}")
    if len(sites) < 1:
        raise InputError("need at least one site")
    sites = sites.with_tags()
    ev = PencilEvaluator(HomoPoint.vertical_infinity(sites.dimension), sites)

    def value_of(h, side_vec):
        return ev.value(h, side_vec)

    best, examined = _search_deepest(sites, value_of)
    return _finish_fit(sites, best, examined)


def deepest_line_2d(sites: SiteSet) -> FitResult:
    """Exact deepest nonvertical line, evaluated by a vertical-pencil sweep."""
    if sites.dimension != 2:
        raise InputError("deepest_line_2d is planar only")
    if len(sites) < 1:
        raise InputError("need at least one site")
    sites = sites.with_tags()
    sweep = _VerticalSweep2D(sites)

    def value_of(h, side_vec):
        if h is not None:
            side_vec = [side_of(h, p) for p in sites.sites]
        return sweep.value_from_sides(side_vec)

    best, examined = _search_deepest(sites, value_of)
    return _finish_fit(sites, best, examined)


# -- Tukey medians -----------------------------------------------------------


def _affine_rank(points: list[HomoPoint]) -> tuple[int, list[int]]:
    """Affine rank of finite points and the pivot coordinate axes."""
    if not points:
        return 0, []
    base = points[0].affine()
    rows = []
    for p in points[1:]:
        pa = p.affine()
        rows.append([pa[j] - base[j] for j in range(len(base))])
    pivots: list[int] = []
    m = [list(r) for r in rows]
    rank = 0
    for col in range(len(base)):
        piv = next((r for r in range(rank, len(m)) if m[r][col] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for r in range(len(m)):
            if r != rank and m[r][col] != 0:
                f = m[r][col] / m[rank][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        pivots.append(col)
        rank += 1
    return rank, pivots


def _site_bound(sites: SiteSet) -> Fraction:
    worst = Fraction(1)
    for p in sites.sites:
        for c in p.affine():
            worst = max(worst, abs(c))
    return worst + 1


def _depth_constraint_planes(sites: SiteSet) -> list[tuple[tuple[int, ...], int, int]]:
    """(coeffs, strictly_positive, strictly_negative) for site-class d-subsets."""
    d = sites.dimension
    classes: list[HomoPoint] = []
    seen: set[tuple[int, ...]] = set()
    for p in sites.sites:
        if p.coords not in seen:
            seen.add(p.coords)
            classes.append(p)
    out = []
    plane_seen: set[tuple[int, ...]] = set()
    for combo in itertools.combinations(classes, d):
        try:
            h = Hyperplane.through_points(list(combo))
        except InputError:
            continue
        key = h.canonical_key()
        if key in plane_seen:
            continue
        plane_seen.add(key)
        pos = neg = 0
        for p in sites.sites:
            s = side_of(h, p)
            if s > 0:
                pos += 1
            elif s < 0:
                neg += 1
        out.append((h.coeffs, pos, neg))
    return out


def _region_constraints(planes, t: int):
    cons = []
    for coeffs, pos, neg in planes:
        if pos <= t - 1:
            cons.append([Fraction(c) for c in coeffs])
        if neg <= t - 1:
            cons.append([Fraction(-c) for c in coeffs])
    return cons


def depth_region_2d(sites: SiteSet, t: int):
    """The convex polygon of points with location depth >= t (2D, exact).

    Returns a (possibly degenerate) vertex list, empty when the region is.
    """
    if sites.dimension != 2:
        raise InputError("depth_region_2d is planar only")
    if t < 1:
        raise InputError("depth level must be at least 1")
    planes = _depth_constraint_planes(sites)
    cons = [[c[0], c[1], c[2]] for c in _region_constraints(planes, t)]
    return intersect_halfplanes(cons, _site_bound(sites))


def _tukey_bruteforce(
    sites: SiteSet, planes: list[Hyperplane]
) -> tuple[HomoPoint, DepthCertificate]:
    """Max location depth over sites and d-wise plane intersections.

    The caller passes a plane family known to contain every facet plane of
    the true maximum-depth region, so its vertices are all candidates.
    """
    d = sites.dimension
    candidates: dict[tuple[int, ...], HomoPoint] = {}
    for p in sites.sites:
        candidates.setdefault(p.coords, HomoPoint(p.coords))
    for combo in itertools.combinations(planes, d):
        pt = _planes_intersection_point(list(combo), d)
        if pt is not None and pt.is_finite:
            candidates.setdefault(pt.coords, pt)
    best: tuple[tuple, HomoPoint, DepthCertificate] | None = None
    for coords in sorted(candidates):
        p = candidates[coords]
        cert = location_depth(p, sites)
        key = (-cert.value, coords)
        if best is None or key < best[0]:
            best = (key, p, cert)
    assert best is not None
    return best[1], best[2]


def _planes_intersection_point(planes: list[Hyperplane], d: int) -> HomoPoint | None:
    rows = [list(h.coeffs) for h in planes]
    coords = [
        (-1) ** j
        * _det_frac([[row[k] for k in range(d + 1) if k != j] for row in rows])
        for j in range(d + 1)
    ]
    if all(c == 0 for c in coords):
        return None
    return HomoPoint.from_coords(coords)


def _det_frac(rows):
    n = len(rows)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    a, b, c = rows[0]
    d_, e, f = rows[1]
    g, h, i = rows[2]
    return a * (e * i - f * h) - b * (d_ * i - f * g) + c * (d_ * h - e * g)


def tukey_median(sites: SiteSet) -> tuple[HomoPoint, DepthCertificate]:
    """A point of maximum location depth, exact, with its certificate."""
    d = sites.dimension
    if d not in (2, 3):
        raise UnsupportedDimensionError("tukey_median needs d in {2, 3}")
    n = len(sites)
    if n < 1:
        raise InputError("need at least one site")
    if any(not p.is_finite for p in sites.sites):
        raise InputError("tukey_median requires finite sites")
    sites = sites.with_tags()
    rank, pivots = _affine_rank(list(sites.sites))
    if rank == 0:
        point = HomoPoint(sites.sites[0].coords)
        return point, location_depth(point, sites)
    if rank < d:
        return _tukey_median_low_rank(sites, pivots)

    planes = _depth_constraint_planes(sites)
    bound = _site_bound(sites)
    lo = ceil_div(n, d + 1)
    hi = n

    def region_point(t: int):
        cons = _region_constraints(planes, t)
        if d == 2:
            poly = intersect_halfplanes(cons, bound)
            return polygon_representative(poly)
        return lexmin_point(cons, 3, bound)

    # largest t whose constraint region is nonempty
    best_pt = region_point(lo)
    if best_pt is None:
        # cannot happen: the constraint region contains every center point
        raise VerificationError("center-level depth region unexpectedly empty")
    best_t = lo
    while lo < hi:
        mid = (lo + hi + 1) // 2
        pt = region_point(mid)
        if pt is not None:
            best_pt, best_t, lo = pt, mid, mid
        else:
            hi = mid - 1
    point = HomoPoint.from_coords(list(best_pt) + [1])
    cert = location_depth(point, sites)
    if cert.value != best_t:
        # the constraint region exceeded the true depth region (degenerate
        # input); fall back to scanning its candidate vertices, which still
        # contain every facet plane of the true region
        fallback_planes = _constraint_hyperplanes(planes, best_t)
        return _tukey_bruteforce(sites, fallback_planes)
    return point, cert


def _constraint_hyperplanes(planes, t: int) -> list[Hyperplane]:
    out = []
    seen = set()
    for coeffs, pos, neg in planes:
        if pos <= t - 1 or neg <= t - 1:
            h = Hyperplane(coeffs)
            key = h.canonical_key()
            if key not in seen:
                seen.add(key)
                out.append(h)
    return out


def _tukey_median_low_rank(sites: SiteSet, pivots: list[int]):
    """Sites span a lower-dimensional flat; solve there and lift back."""
    base = sites.sites[0].affine()
    d = sites.dimension
    rank = len(pivots)
    if rank == 1:
        j = pivots[0]
        ts = sorted(
            (p.affine()[j], i) for i, p in enumerate(sites.sites)
        )
        values = [t for t, _ in ts]
        best = None
        for t, i in ts:
            less = sum(1 for v in values if v < t)
            more = sum(1 for v in values if v > t)
            eq = len(values) - less - more
            depth = eq + min(less, more)
            key = (-depth, t)
            if best is None or key < best[0]:
                best = (key, i)
        point = HomoPoint(sites.sites[best[1]].coords)
        cert = location_depth(point, sites)
        return point, cert
    # rank 2 inside 3D: the sites span a plane that projects bijectively onto
    # the pivot coordinate axes; solve there and lift the answer back
    assert d == 3 and rank == 2
    p0, p1 = pivots
    proj = SiteSet.from_points(
        [[p.affine()[p0], p.affine()[p1]] for p in sites.sites]
    )
    ppoint, _ = tukey_median(proj)
    pa = ppoint.affine()
    u = v = None
    for p in sites.sites[1:]:
        diff = [p.affine()[k] - base[k] for k in range(d)]
        if u is None:
            if diff[p0] != 0 or diff[p1] != 0:
                u = diff
        elif u[p0] * diff[p1] - u[p1] * diff[p0] != 0:
            v = diff
            break
    if u is None or v is None:
        raise VerificationError("pivot axes do not span the site flat")
    det = u[p0] * v[p1] - u[p1] * v[p0]
    dx = pa[0] - base[p0]
    dy = pa[1] - base[p1]
    s = (dx * v[p1] - dy * v[p0]) / det
    t = (u[p0] * dy - u[p1] * dx) / det
    coords = [base[k] + s * u[k] + t * v[k] for k in range(d)]
    point = HomoPoint.finite(coords)
    cert = location_depth(point, sites)
    return point, cert


def certify_center_point(x: HomoPoint, sites: SiteSet) -> tuple[bool, DepthCertificate]:
    """Whether x has location depth at least ceil(n/(d+1)), with evidence."""
    if not x.is_finite:
        raise InputError("center point queries need a finite point")
    cert = location_depth(x, sites)
    bound = ceil_div(len(sites), sites.dimension + 1)
    return cert.value >= bound, cert


def reduce_location_to_regression(
    x: HomoPoint, sites: SiteSet
) -> tuple[Hyperplane, SiteSet, ProjectiveTransform]:
    """Map a location-depth query to an equivalent regression-depth query.

    Returns (h, image sites, transform) where the transform sends x to the
    point at vertical infinity and h is the image of the hyperplane at
    infinity; the regression depth of h in the image equals the location
    depth of x in the original sites, exactly.
    """
    if not x.is_finite:
        raise InputError("the reduction needs a finite query point")
    t = transform_point_to_vertical_infinity(x)
    h = t.apply_hyperplane(Hyperplane.infinity(sites.dimension))
    return h, sites.transformed(t), t
