"""Exact crossing distance and the depth notions it specializes to.

The crossing distance between a point x and a hyperplane H, with respect to
a multiset of sites, is the minimum number of sites in a closed double wedge
bounded by H and any hyperplane G through x.  Location depth is the special
case H = infinity; regression depth is the special case x = the point at
vertical infinity.

The computation splits the count as A + B + W:

* A: sites on H itself; they lie on the boundary of every wedge.
* B: sites projectively equal to x; they lie on every candidate G.
* W: the minimum, over candidate hyperplanes G and the two wedge selectors,
  of the number of remaining sites strictly inside the wedge.

Because wedges are closed, the minimum over the whole pencil of hyperplanes
through x equals the minimum over *generic* members of the pencil, and that
minimum is attained in the limit at "terminal" candidates spanned by x and
d-1 pool generators (site classes, augmented with axis directions at
infinity so sparse pencils still have representatives).  Sites lying on a
terminal candidate but not on H ("anchors") are assigned sides by tilting G
infinitesimally; enumerating the tilt cells exactly gives the minimum
number of anchors that any generic tilt is forced to keep inside the wedge.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import (
    DegenerateQueryError,
    InputError,
    UnsupportedDimensionError,
    VerificationError,
)
from .geometry import (
    HomoPoint,
    Hyperplane,
    side_of,
    sign,
)


@dataclass(frozen=True)
class SiteSet:
    """An indexed multiset of projective points in a fixed dimension.

    Site identity is the point's ``index`` tag, assigned positionally at
    construction and preserved by :meth:`subset`, so certificates computed
    on a subset still reference the original numbering.
    """

    dimension: int
    sites: tuple[HomoPoint, ...]

    def __post_init__(self) -> None:
        if self.dimension < 1:
            raise InputError("dimension must be at least 1")
        for p in self.sites:
            if p.dim != self.dimension:
                raise InputError(
                    f"site {p.coords} has dimension {p.dim}, expected {self.dimension}"
                )

    @classmethod
    def from_points(
        cls,
        rows: Iterable[Sequence[Union[str, int, Fraction]]],
        dimension: int | None = None,
    ) -> "SiteSet":
        """Build from affine coordinate rows; indices follow row order."""
        points = [HomoPoint.finite(row, index=i) for i, row in enumerate(rows)]
        if dimension is None:
            if not points:
                raise InputError("cannot infer dimension from an empty site list")
            dimension = points[0].dim
        return cls(dimension, tuple(points))

    @classmethod
    def from_homogeneous(
        cls,
        rows: Iterable[Sequence[Union[str, int, Fraction]]],
        dimension: int | None = None,
    ) -> "SiteSet":
        points = [HomoPoint.from_coords(row, index=i) for i, row in enumerate(rows)]
        if dimension is None:
            if not points:
                raise InputError("cannot infer dimension from an empty site list")
            dimension = points[0].dim
        return cls(dimension, tuple(points))

    def __len__(self) -> int:
        return len(self.sites)

    def indices(self) -> tuple[int, ...]:
        return tuple(p.index if p.index is not None else i for i, p in enumerate(self.sites))

    def subset(self, indices: Iterable[int]) -> "SiteSet":
        """Sites whose index tags are in ``indices``, tags preserved."""
        wanted = set(indices)
        picked = tuple(p for i, p in enumerate(self.sites) if (p.index if p.index is not None else i) in wanted)
        return SiteSet(self.dimension, picked)

    def with_tags(self) -> "SiteSet":
        """Ensure every site carries an index tag (positional by default)."""
        tagged = tuple(
            p if p.index is not None else p.with_index(i) for i, p in enumerate(self.sites)
        )
        return SiteSet(self.dimension, tagged)

    def transformed(self, t) -> "SiteSet":
        return SiteSet(self.dimension, tuple(t.apply_point(p) for p in self.sites))


@dataclass(frozen=True)
class DoubleWedge:
    """The closure of one of the two regions cut out by two hyperplanes.

    A point belongs to the wedge with selector s iff the product of its
    sides with respect to the two boundaries is s or zero; boundary points
    belong to both wedges.
    """

    boundary_a: Hyperplane
    boundary_b: Hyperplane
    selector: int

    def __post_init__(self) -> None:
        if self.selector not in (-1, 1):
            raise InputError("selector must be +1 or -1")

    def contains(self, p: HomoPoint) -> bool:
        s = side_of(self.boundary_a, p) * side_of(self.boundary_b, p)
        return s == 0 or s == self.selector


@dataclass(frozen=True)
class DepthCertificate:
    """A depth value with a witness wedge and the counted site indices."""

    value: int
    witness: DoubleWedge
    counted_site_indices: tuple[int, ...]

    def recount(self, sites: SiteSet) -> int:
        return sum(1 for p in sites.sites if self.witness.contains(p))

    def verify(self, sites: SiteSet) -> None:
        if self.value != len(self.counted_site_indices):
            raise VerificationError("certificate value disagrees with counted sites")
        tags = sites.indices()
        members = {
            tag
            for tag, p in zip(tags, sites.sites)
            if self.witness.contains(p)
        }
        if set(self.counted_site_indices) != members or self.recount(sites) != self.value:
            raise VerificationError("witness wedge does not reproduce the certificate")


def _axis_directions(dim: int) -> list[HomoPoint]:
    dirs = []
    for axis in range(dim):
        vec = [0] * (dim + 1)
        vec[axis] = 1
        dirs.append(HomoPoint.from_coords(vec))
    return dirs


def _pencil_basis(x: HomoPoint) -> list[tuple[int, ...]]:
    """An integer basis of the hyperplane coefficients vanishing on x."""
    n = len(x.coords)
    pivot = max(i for i, c in enumerate(x.coords) if c)
    basis = []
    for j in range(n):
        if j == pivot:
            continue
        vec = [0] * n
        vec[j] = x.coords[pivot]
        vec[pivot] = -x.coords[j]
        basis.append(tuple(vec))
    return basis


def _dot(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(u * v for u, v in zip(a, b))


@dataclass
class _Candidate:
    hyperplane: Hyperplane
    generator_key: tuple[int, ...]
    sides: list[int] = field(default_factory=list)
    zero_rows: list[int] = field(default_factory=list)
    # coordinate tuples of the spanning generators; anchors confined to these
    # classes can always be tilted out of the wedge simultaneously
    gen_classes: frozenset = frozenset()


class PencilEvaluator:
    """Minimizes closed double-wedge counts over hyperplanes through x.

    Precomputes, once per (x, sites) pair, the candidate hyperplanes and the
    side of every site with respect to each candidate, so that evaluating
    many reference hyperplanes H against the same pencil is cheap.
    """

    def __init__(self, x: HomoPoint, sites: SiteSet):
        d = sites.dimension
        if d not in (1, 2, 3):
            raise UnsupportedDimensionError(
                f"exact crossing distance supports d in {{1, 2, 3}}, got d={d}"
            )
        if x.dim != d:
            raise InputError("query point dimension mismatch")
        self.x = x
        self.sites = sites
        self.dimension = d
        self.b_positions = [i for i, p in enumerate(sites.sites) if p.coords == x.coords]
        pool: list[HomoPoint] = []
        seen = {x.coords}
        for p in sites.sites:
            if p.coords not in seen:
                seen.add(p.coords)
                pool.append(p)
        for direction in _axis_directions(d):
            if direction.coords not in seen:
                seen.add(direction.coords)
                pool.append(direction)
        self.pool = pool
        self.candidates = self._build_candidates()
        self._tilt_basis: list[tuple[int, ...]] | None = None

    # -- candidate construction -------------------------------------------

    def _build_candidates(self) -> list[_Candidate]:
        d = self.dimension
        x = self.x
        out: list[_Candidate] = []
        seen_keys: set[tuple[int, ...]] = set()

        bset = set(self.b_positions)

        def push(h: Hyperplane, gens: tuple[int, ...]) -> None:
            key = h.canonical_key()
            if key in seen_keys:
                return
            seen_keys.add(key)
            classes = frozenset(
                self.pool[g].coords for g in gens if g < len(self.pool)
            )
            cand = _Candidate(h, gens, gen_classes=classes)
            for i, p in enumerate(self.sites.sites):
                s = side_of(h, p)
                cand.sides.append(s)
                if s == 0 and i not in bset:
                    cand.zero_rows.append(i)
            out.append(cand)

        if d == 1:
            push(Hyperplane.from_coeffs((x.coords[1], -x.coords[0])), ())
        elif d == 2:
            for gi, q in enumerate(self.pool):
                try:
                    h = Hyperplane.through_points([x, q])
                except InputError:
                    continue
                push(h, (gi,))
        else:
            for gi in range(len(self.pool)):
                for gj in range(gi + 1, len(self.pool)):
                    try:
                        h = Hyperplane.through_points([x, self.pool[gi], self.pool[gj]])
                    except InputError:
                        continue
                    push(h, (gi, gj))
        if not x.is_finite:
            push(Hyperplane.infinity(d), (len(self.pool),))
        return out

    # -- tilt machinery ----------------------------------------------------

    def _tilt_space(self, cand: _Candidate) -> list[tuple[int, ...]]:
        """Integer spanning directions of the pencil transverse to the candidate."""
        basis = _pencil_basis(self.x)
        g = cand.hyperplane.coeffs
        pivot = max(i for i, c in enumerate(g) if c)
        out = []
        for vec in basis:
            reduced = tuple(v * g[pivot] - g[i] * vec[pivot] for i, v in enumerate(vec))
            # reduced kills the component along the candidate itself
            if any(reduced):
                out.append(reduced)
        # keep an independent subset of size d-1
        picked: list[tuple[int, ...]] = []
        for vec in out:
            trial = picked + [vec]
            if _rank_int([list(v) for v in trial]) == len(trial):
                picked.append(vec)
            if len(picked) == self.dimension - 1:
                break
        if len(picked) != self.dimension - 1:
            raise VerificationError("tilt space construction failed")
        return picked

    def _anchor_correction(
        self,
        cand: _Candidate,
        anchors: list[int],
        side_h: Sequence[int],
    ) -> tuple[dict[int, int], dict[int, tuple[tuple[int, ...], list[int]]]]:
        """Minimum anchors forced inside each wedge over all generic tilts.

        Returns ({selector: count}, {selector: (tilt_vector, anchors_in)}).
        """
        tilt = self._tilt_space(cand)
        sites = self.sites.sites
        if len(tilt) == 1:
            cells = [tilt[0], tuple(-v for v in tilt[0])]
        else:
            u1, u2 = tilt
            dirs: set[tuple[int, int]] = set()
            for i in anchors:
                a = _dot(u1, sites[i].coords)
                b = _dot(u2, sites[i].coords)
                # cell boundaries are the kernel directions of each functional
                dirs.add(_primitive_pair((-b, a)))
                dirs.add(_primitive_pair((b, -a)))
            ordered = _sort_directions(dirs)
            pairs2d = []
            for k in range(len(ordered)):
                mid = _between_direction(ordered[k], ordered[(k + 1) % len(ordered)])
                if mid is not None:
                    pairs2d.append(mid)
            cells = [
                tuple(a * u1[j] + b * u2[j] for j in range(len(u1))) for (a, b) in pairs2d
            ]
        best: dict[int, int] = {}
        witness: dict[int, tuple[tuple[int, ...], list[int]]] = {}
        for t in cells:
            tilted = {i: sign(_dot(t, sites[i].coords)) for i in anchors}
            if any(v == 0 for v in tilted.values()):
                continue  # not a generic tilt for these anchors
            for sel in (1, -1):
                inside = [i for i in anchors if side_h[i] * tilted[i] == sel]
                if sel not in best or len(inside) < best[sel]:
                    best[sel] = len(inside)
                    witness[sel] = (t, inside)
        if len(best) < 2:
            raise VerificationError("no generic tilt found for anchor correction")
        return best, witness

    # -- evaluation --------------------------------------------------------

    def side_vector(self, h: Hyperplane) -> list[int]:
        return [side_of(h, p) for p in self.sites.sites]

    def evaluate(
        self,
        h: Hyperplane | None = None,
        side_h: Sequence[int] | None = None,
    ) -> dict:
        """Exact minimum closed wedge count for boundaries (h, G through x).

        Returns a dict with the value decomposition and the data needed to
        materialize a witness.  ``h`` must not contain x.  Callers may pass a
        bare side vector instead of a hyperplane (used to evaluate perturbed
        variants of degenerate candidates symbolically); they then guarantee
        that some hyperplane avoiding x realizes those sides.
        """
        if side_h is None:
            if h is None:
                raise InputError("need a hyperplane or a side vector")
            if sum(c * v for c, v in zip(h.coeffs, self.x.coords)) == 0:
                raise DegenerateQueryError("query point lies on the reference hyperplane")
            side_h = self.side_vector(h)
        # sites equal to x can never lie on h (x does not), so A and B are disjoint
        a_positions = [i for i, s in enumerate(side_h) if s == 0]
        best = None
        for ci, cand in enumerate(self.candidates):
            strict_pos = 0
            strict_neg = 0
            for sh, sg in zip(side_h, cand.sides):
                prod = sh * sg
                if prod > 0:
                    strict_pos += 1
                elif prod < 0:
                    strict_neg += 1
            anchors = [i for i in cand.zero_rows if side_h[i] != 0]
            if anchors and not all(
                self.sites.sites[i].coords in cand.gen_classes for i in anchors
            ):
                corr, _ = self._anchor_correction(cand, anchors, side_h)
                options = ((strict_pos + corr[1], 1), (strict_neg + corr[-1], -1))
            else:
                # anchors confined to the independent generator classes can be
                # tilted out of either wedge simultaneously: correction 0
                options = ((strict_pos, 1), (strict_neg, -1))
            for value, sel in options:
                key = (value, cand.generator_key, -sel)
                if best is None or key < best[0]:
                    best = (key, ci, sel)
        if best is None:
            raise InputError("empty candidate pencil")
        (w_value, _, _), ci, sel = best
        return {
            "A": a_positions,
            "B": list(self.b_positions),
            "W": w_value,
            "candidate": ci,
            "selector": sel,
            "side_h": list(side_h),
        }

    def value(self, h: Hyperplane, side_h: Sequence[int] | None = None) -> int:
        r = self.evaluate(h, side_h)
        return len(r["A"]) + len(r["B"]) + r["W"]

    def certificate(self, h: Hyperplane, side_h: Sequence[int] | None = None) -> DepthCertificate:
        r = self.evaluate(h, side_h)
        cand = self.candidates[r["candidate"]]
        sel = r["selector"]
        side_h = r["side_h"]
        anchors = [i for i in cand.zero_rows if side_h[i] != 0]
        witness_g = cand.hyperplane
        anchors_in: list[int] = []
        if anchors:
            corr, witnesses = self._anchor_correction(cand, anchors, side_h)
            tilt_vec, anchors_in = witnesses[sel]
            witness_g = self._materialize_tilt(cand, tilt_vec)
        strict = [
            i
            for i, (sh, sg) in enumerate(zip(side_h, cand.sides))
            if sh * sg == sel
        ]
        tags = self.sites.indices()
        counted = sorted(
            tags[i] for i in set(r["A"]) | set(r["B"]) | set(strict) | set(anchors_in)
        )
        value = len(r["A"]) + len(r["B"]) + r["W"]
        cert = DepthCertificate(
            value=value,
            witness=DoubleWedge(h, witness_g, sel),
            counted_site_indices=tuple(counted),
        )
        cert.verify(self.sites)
        return cert

    def _materialize_tilt(self, cand: _Candidate, tilt: tuple[int, ...]) -> Hyperplane:
        """An actual rational hyperplane through x realizing a generic tilt.

        Scales the tilt so that every site off the candidate keeps its side:
        |eps * <tilt, p>| < |<G0, p>| for all such sites.
        """
        g = cand.hyperplane.coeffs
        eps = None
        for p in self.sites.sites:
            gv = _dot(g, p.coords)
            tv = _dot(tilt, p.coords)
            if gv != 0 and tv != 0:
                bound = Fraction(abs(gv), abs(tv))
                if eps is None or bound < eps:
                    eps = bound
        eps = Fraction(1) if eps is None else eps / 2
        coeffs = [Fraction(c) + eps * t for c, t in zip(g, tilt)]
        return Hyperplane.from_coeffs(coeffs)


def _primitive_pair(v: tuple[int, int]) -> tuple[int, int]:
    from math import gcd

    a, b = v
    if a == 0 and b == 0:
        raise InputError("zero direction")
    g = gcd(a, b)
    return (a // g, b // g)


def _half(v: tuple[int, int]) -> int:
    """0 for angles in [0, pi), 1 for [pi, 2*pi)."""
    a, b = v
    return 0 if (b > 0 or (b == 0 and a > 0)) else 1


def _sort_directions(dirs: Iterable[tuple[int, int]]) -> list[tuple[int, int]]:
    """Distinct primitive integer directions in counterclockwise order from +x."""
    import functools

    def cmp(v1: tuple[int, int], v2: tuple[int, int]) -> int:
        h1, h2 = _half(v1), _half(v2)
        if h1 != h2:
            return -1 if h1 < h2 else 1
        cr = v1[0] * v2[1] - v1[1] * v2[0]
        return -1 if cr > 0 else (1 if cr < 0 else 0)

    return sorted(set(dirs), key=functools.cmp_to_key(cmp))


def _between_direction(w1: tuple[int, int], w2: tuple[int, int]) -> tuple[int, int] | None:
    """A rational direction strictly inside the CCW angular cell from w1 to w2."""
    cross = w1[0] * w2[1] - w1[1] * w2[0]
    if cross == 0:
        if w1 == w2:
            return None
        # antipodal boundaries: the cell is an open half-plane
        return (-w1[1], w1[0])
    n1 = abs(w1[0]) + abs(w1[1])
    n2 = abs(w2[0]) + abs(w2[1])
    return (w1[0] * n2 + w2[0] * n1, w1[1] * n2 + w2[1] * n1)


def _rank_int(rows: list[list[int]]) -> int:
    m = [list(r) for r in rows]
    rank = 0
    cols = len(m[0]) if m else 0
    for col in range(cols):
        pivot = next((r for r in range(rank, len(m)) if m[r][col]), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        for r in range(len(m)):
            if r != rank and m[r][col]:
                factor_a, factor_b = m[rank][col], m[r][col]
                m[r] = [a * factor_a - b * factor_b for a, b in zip(m[r], m[rank])]
        rank += 1
        if rank == len(m):
            break
    return rank


# -- public operations ------------------------------------------------------


def crossing_distance(x: HomoPoint, h: Hyperplane, sites: SiteSet) -> DepthCertificate:
    """Exact minimum closed double-wedge count over wedges (h, G through x)."""
    if sum(c * v for c, v in zip(h.coeffs, x.coords)) == 0:
        raise DegenerateQueryError("degenerate query: point is incident to the hyperplane")
    return PencilEvaluator(x, sites).certificate(h)


def sampled_crossing_distance_upper_bound(
    x: HomoPoint, h: Hyperplane, sites: SiteSet, samples: int = 256, seed: int = 0
) -> DepthCertificate:
    """Sampled, NOT exact: an upper-bound certificate for dimensions above 3.

    The witness wedge is real and the recount is sound, but the minimum is
    taken over a random sample of hyperplanes through x, so the value is
    only an upper bound on the true crossing distance.
    """
    import random

    if sum(c * v for c, v in zip(h.coeffs, x.coords)) == 0:
        raise DegenerateQueryError("degenerate query: point is incident to the hyperplane")
    d = sites.dimension
    rng = random.Random(seed)
    basis = _pencil_basis(x)
    best: tuple[int, DoubleWedge, tuple[int, ...]] | None = None
    tags = sites.indices()
    for _ in range(max(1, samples)):
        coeffs = [0] * (d + 1)
        while all(c == 0 for c in coeffs):
            weights = [rng.randint(-999, 999) for _ in basis]
            coeffs = [sum(w * b[j] for w, b in zip(weights, basis)) for j in range(d + 1)]
        g = Hyperplane.from_coeffs(coeffs)
        for sel in (1, -1):
            wedge = DoubleWedge(h, g, sel)
            counted = tuple(
                sorted(tag for tag, p in zip(tags, sites.sites) if wedge.contains(p))
            )
            if best is None or len(counted) < best[0]:
                best = (len(counted), wedge, counted)
    assert best is not None
    return DepthCertificate(best[0], best[1], best[2])


def regression_depth(h: Hyperplane, sites: SiteSet) -> DepthCertificate:
    """Crossing distance from the point at vertical infinity; h must be nonvertical."""
    if h.dim != sites.dimension:
        raise InputError("hyperplane dimension mismatch")
    if h.is_vertical:
        raise InputError("regression depth is undefined for vertical hyperplanes")
    return crossing_distance(HomoPoint.vertical_infinity(sites.dimension), h, sites)


def location_depth(x: HomoPoint, sites: SiteSet) -> DepthCertificate:
    """Minimum sites in a closed halfspace containing x (crossing distance to infinity)."""
    if not x.is_finite:
        raise InputError("location depth requires a finite query point")
    return crossing_distance(x, Hyperplane.infinity(sites.dimension), sites)


def undirected_depth_2d(x: HomoPoint, lines: Sequence[Hyperplane]) -> DepthCertificate:
    """Minimum number of lines touched by, or parallel to, a ray from x.

    Enumerates generic ray directions between consecutive critical
    directions (the lines' own directions, both signs).  Lines through x are
    touched by every ray.  Each line counts at most once even when it is
    parallel to and collinear with the ray.  The witness is expressed in the
    dual plane, where the touched lines become points inside a double wedge
    bounded by the dual of x and a vertical line.
    """
    if not x.is_finite:
        raise InputError("undirected depth requires a finite query point")
    if x.dim != 2 or any(l.dim != 2 for l in lines):
        raise InputError("undirected_depth_2d is planar only")
    xa = x.affine()
    through: list[int] = []
    others: list[int] = []
    for i, l in enumerate(lines):
        if l.evaluate(x) == 0:
            through.append(i)
        else:
            others.append(i)
    directions: set[tuple[int, int]] = set()
    for i in others:
        a, b, _ = lines[i].coeffs
        directions.add(_primitive_pair((b, -a)))  # the line's own direction
        directions.add(_primitive_pair((-b, a)))
    ordered = _sort_directions(directions)
    reps: list[tuple[int, int]] = []
    if not ordered:
        reps = [(1, 0)]
    else:
        for k in range(len(ordered)):
            mid = _between_direction(ordered[k], ordered[(k + 1) % len(ordered)])
            if mid is not None:
                reps.append(mid)
    best: tuple[int, tuple[int, int], list[int]] | None = None
    for u in reps:
        touched = list(through)
        for i in others:
            a, b, c = lines[i].coeffs
            du = a * u[0] + b * u[1]
            residual = lines[i].evaluate(x)
            if du == 0:
                touched.append(i)  # parallel to the ray
            elif sign(du) * sign(residual) < 0:
                touched.append(i)  # the ray heads toward the line
        if best is None or len(touched) < best[0]:
            best = (len(touched), u, touched)
    assert best is not None
    count, u, touched = best
    # dual witness: touched lines dualize into this wedge
    from .geometry import dual_map_2d

    dual_x = dual_map_2d(x)
    ray_end = HomoPoint.from_coords((u[0], u[1], 0))
    dual_dir = dual_map_2d(ray_end)
    sel = None
    for candidate_sel in (1, -1):
        wedge = DoubleWedge(dual_x, dual_dir, candidate_sel)
        members = {
            i for i, l in enumerate(lines) if wedge.contains(dual_map_2d(l))
        }
        if members == set(touched):
            sel = candidate_sel
            break
    if sel is None:
        raise VerificationError("dual witness wedge does not reproduce the touched set")
    return DepthCertificate(count, DoubleWedge(dual_x, dual_dir, sel), tuple(sorted(touched)))
