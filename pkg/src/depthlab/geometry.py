"""Exact projective geometry kernel.

All objects live in homogeneous coordinates over the rationals.  Points and
hyperplanes are stored as primitive integer vectors (rational inputs are
cleared of denominators), so every predicate reduces to integer arithmetic
and is exact.  A point's representative is fully canonical (last nonzero
coordinate positive); a hyperplane keeps its input orientation so that
signed side queries are meaningful.

Conventions, for ambient dimension d:

* a point has d+1 coordinates ``(x_1, ..., x_d, w)``; finite iff ``w != 0``;
* a hyperplane has d+1 coefficients ``(a_1, ..., a_d, c)`` and is incident
  to ``p`` iff the dot product vanishes;
* the hyperplane at infinity is ``(0, ..., 0, 1)``;
* the point at vertical infinity is ``(0, ..., 0, 1, 0)``, i.e. the common
  projective point of all vertical hyperplanes (those with ``a_d == 0``).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence, Union

from .errors import InputError, SingularMatrixError

Scalar = Fraction


def parse_scalar(value: Union[str, int, Fraction]) -> Fraction:
    """Parse an exact rational: ints, 'p/q' strings, decimal strings ('0.1' -> 1/10)."""
    if isinstance(value, bool):
        raise InputError(f"not a scalar: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"cannot parse scalar {value!r}: {exc}") from None
    if isinstance(value, float):
        raise InputError(
            f"refusing float {value!r}; pass a string or Fraction for exact input"
        )
    raise InputError(f"not a scalar: {value!r}")


def _primitive_ints(values: Sequence[Union[str, int, Fraction]]) -> tuple[int, ...]:
    """Clear denominators and divide by the gcd, keeping orientation."""
    fracs = [parse_scalar(v) for v in values]
    if all(f == 0 for f in fracs):
        raise InputError("homogeneous vector must not be all zero")
    denom_lcm = 1
    for f in fracs:
        denom_lcm = denom_lcm * f.denominator // gcd(denom_lcm, f.denominator)
    ints = [int(f * denom_lcm) for f in fracs]
    g = 0
    for v in ints:
        g = gcd(g, v)
    return tuple(v // g for v in ints)


def _sign_canonical(ints: Sequence[int]) -> tuple[int, ...]:
    """Flip signs so the last nonzero entry is positive."""
    for v in reversed(ints):
        if v:
            if v < 0:
                return tuple(-u for u in ints)
            return tuple(ints)
    raise InputError("homogeneous vector must not be all zero")


def sign(value: int) -> int:
    return (value > 0) - (value < 0)


@dataclass(frozen=True)
class HomoPoint:
    """A projective point: primitive integer coordinates, last nonzero positive.

    ``index`` is an optional site id carried along by site sets; it does not
    participate in equality, so projectively equal points compare equal.
    """

    coords: tuple[int, ...]
    index: int | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if len(self.coords) < 2:
            raise InputError("a projective point needs at least 2 coordinates")
        if self.coords != _sign_canonical(_primitive_ints(self.coords)):
            raise InputError("coords not canonical; use HomoPoint.from_coords")

    @classmethod
    def from_coords(
        cls, values: Sequence[Union[str, int, Fraction]], index: int | None = None
    ) -> "HomoPoint":
        return cls(_sign_canonical(_primitive_ints(values)), index)

    @classmethod
    def finite(
        cls, affine: Sequence[Union[str, int, Fraction]], index: int | None = None
    ) -> "HomoPoint":
        """Embed an affine point by appending homogeneous coordinate 1."""
        return cls.from_coords(list(affine) + [1], index)

    @classmethod
    def direction(
        cls, vector: Sequence[Union[str, int, Fraction]], index: int | None = None
    ) -> "HomoPoint":
        """The point at infinity in the given direction."""
        return cls.from_coords(list(vector) + [0], index)

    @classmethod
    def vertical_infinity(cls, dim: int) -> "HomoPoint":
        coords = [0] * (dim + 1)
        coords[dim - 1] = 1
        return cls.from_coords(coords)

    @property
    def dim(self) -> int:
        return len(self.coords) - 1

    @property
    def is_finite(self) -> bool:
        return self.coords[-1] != 0

    def affine(self) -> tuple[Fraction, ...]:
        if not self.is_finite:
            raise InputError("point at infinity has no affine coordinates")
        w = self.coords[-1]
        return tuple(Fraction(c, w) for c in self.coords[:-1])

    def with_index(self, index: int | None) -> "HomoPoint":
        return HomoPoint(self.coords, index)


@dataclass(frozen=True)
class Hyperplane:
    """A projective hyperplane: primitive integer coefficients, orientation kept.

    Negating the coefficients yields a distinct object describing the same
    hyperplane with flipped sides; use :meth:`projectively_equal` to compare
    up to scale.
    """

    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.coeffs) < 2:
            raise InputError("a hyperplane needs at least 2 coefficients")
        if self.coeffs != _primitive_ints(self.coeffs):
            raise InputError("coeffs not primitive; use Hyperplane.from_coeffs")

    @classmethod
    def from_coeffs(cls, values: Sequence[Union[str, int, Fraction]]) -> "Hyperplane":
        return cls(_primitive_ints(values))

    @classmethod
    def infinity(cls, dim: int) -> "Hyperplane":
        return cls.from_coeffs([0] * dim + [1])

    @classmethod
    def through_points(cls, points: Sequence[HomoPoint]) -> "Hyperplane":
        """The hyperplane spanned by d points in dimension d (None if rank-deficient)."""
        if not points:
            raise InputError("need at least one point")
        d = points[0].dim
        if len(points) != d:
            raise InputError(f"need exactly {d} points in dimension {d}")
        rows = [p.coords for p in points]
        coeffs = [
            (-1) ** j * _int_det([[row[k] for k in range(d + 1) if k != j] for row in rows])
            for j in range(d + 1)
        ]
        if all(c == 0 for c in coeffs):
            raise InputError("points do not span a hyperplane")
        return cls.from_coeffs(coeffs)

    @property
    def dim(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_vertical(self) -> bool:
        """True iff the coefficient of the last spatial axis vanishes."""
        return self.coeffs[-2] == 0

    def evaluate(self, p: HomoPoint) -> int:
        return sum(a * x for a, x in zip(self.coeffs, p.coords))

    def canonical_key(self) -> tuple[int, ...]:
        """Orientation-free key: equal iff projectively equal."""
        return _sign_canonical(self.coeffs)

    def projectively_equal(self, other: "Hyperplane") -> bool:
        return self.canonical_key() == other.canonical_key()

    def negated(self) -> "Hyperplane":
        return Hyperplane(tuple(-c for c in self.coeffs))


def side_of(h: Hyperplane, p: HomoPoint) -> int:
    """Sign of the incidence form on the canonical representative of p."""
    return sign(h.evaluate(p))


def incident(h: Hyperplane, p: HomoPoint) -> bool:
    return h.evaluate(p) == 0


def _int_det(rows: Sequence[Sequence[int]]) -> int:
    """Exact integer determinant (Laplace for n<=3, fraction-free Bareiss above)."""
    n = len(rows)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    if n == 3:
        a, b, c = rows[0]
        d, e, f = rows[1]
        g, h, i = rows[2]
        return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
    m = [list(r) for r in rows]
    signflip = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k]:
                    m[k], m[r] = m[r], m[k]
                    signflip = -signflip
                    break
            else:
                return 0
        for r in range(k + 1, n):
            for c in range(k + 1, n):
                m[r][c] = (m[r][c] * m[k][k] - m[r][k] * m[k][c]) // prev
            m[r][k] = 0
        prev = m[k][k]
    return signflip * m[n - 1][n - 1]


def _frac_matrix(rows: Iterable[Iterable[Union[str, int, Fraction]]]) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(tuple(parse_scalar(v) for v in row) for row in rows)


def mat_det(rows: Sequence[Sequence[Fraction]]) -> Fraction:
    n = len(rows)
    m = [list(r) for r in rows]
    det = Fraction(1)
    for k in range(n):
        pivot = next((r for r in range(k, n) if m[r][k] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != k:
            m[k], m[pivot] = m[pivot], m[k]
            det = -det
        det *= m[k][k]
        inv = 1 / m[k][k]
        for r in range(k + 1, n):
            factor = m[r][k] * inv
            if factor:
                for c in range(k, n):
                    m[r][c] -= factor * m[k][c]
    return det


def mat_inverse(rows: Sequence[Sequence[Fraction]]) -> tuple[tuple[Fraction, ...], ...]:
    n = len(rows)
    m = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(rows)]
    for k in range(n):
        pivot = next((r for r in range(k, n) if m[r][k] != 0), None)
        if pivot is None:
            raise SingularMatrixError("matrix is singular")
        if pivot != k:
            m[k], m[pivot] = m[pivot], m[k]
        inv = 1 / m[k][k]
        m[k] = [v * inv for v in m[k]]
        for r in range(n):
            if r != k and m[r][k]:
                factor = m[r][k]
                m[r] = [a - factor * b for a, b in zip(m[r], m[k])]
    return tuple(tuple(row[n:]) for row in m)


def mat_mul_vec(rows: Sequence[Sequence[Fraction]], vec: Sequence[int]) -> list[Fraction]:
    return [sum(a * x for a, x in zip(row, vec)) for row in rows]


@dataclass(frozen=True)
class ProjectiveTransform:
    """An invertible (d+1)x(d+1) rational matrix acting on projective objects.

    Points map by the matrix, hyperplanes by the inverse transpose, so
    incidences are preserved exactly.
    """

    matrix: tuple[tuple[Fraction, ...], ...]
    inverse_matrix: tuple[tuple[Fraction, ...], ...] = field(compare=False)

    @classmethod
    def from_matrix(
        cls, rows: Iterable[Iterable[Union[str, int, Fraction]]]
    ) -> "ProjectiveTransform":
        matrix = _frac_matrix(rows)
        n = len(matrix)
        if any(len(row) != n for row in matrix):
            raise InputError("transform matrix must be square")
        return cls(matrix, mat_inverse(matrix))

    @classmethod
    def identity(cls, dim: int) -> "ProjectiveTransform":
        rows = [[int(i == j) for j in range(dim + 1)] for i in range(dim + 1)]
        return cls.from_matrix(rows)

    @property
    def dim(self) -> int:
        return len(self.matrix) - 1

    def apply_point(self, p: HomoPoint) -> HomoPoint:
        return HomoPoint.from_coords(mat_mul_vec(self.matrix, p.coords), p.index)

    def apply_hyperplane(self, h: Hyperplane) -> Hyperplane:
        transposed = tuple(zip(*self.inverse_matrix))
        return Hyperplane.from_coeffs(mat_mul_vec(transposed, h.coeffs))

    def inverse(self) -> "ProjectiveTransform":
        return ProjectiveTransform(self.inverse_matrix, self.matrix)

    def compose(self, first: "ProjectiveTransform") -> "ProjectiveTransform":
        """The transform applying ``first`` then ``self``."""
        n = len(self.matrix)
        product = tuple(
            tuple(
                sum(self.matrix[i][k] * first.matrix[k][j] for k in range(n))
                for j in range(n)
            )
            for i in range(n)
        )
        return ProjectiveTransform.from_matrix(product)


def apply_transform(
    t: ProjectiveTransform, obj: Union[HomoPoint, Hyperplane]
) -> Union[HomoPoint, Hyperplane]:
    if isinstance(obj, HomoPoint):
        return t.apply_point(obj)
    if isinstance(obj, Hyperplane):
        return t.apply_hyperplane(obj)
    raise InputError(f"cannot transform {type(obj).__name__}")


def transform_to_infinity(h: Hyperplane) -> ProjectiveTransform:
    """An invertible transform sending h to the hyperplane at infinity.

    The matrix completes h's coefficient row with canonical basis rows: the
    pivot axis (last nonzero coefficient) is dropped and the remaining unit
    rows fill positions 0..d-1, so the construction is deterministic.
    """
    n = len(h.coeffs)
    pivot = max(i for i, c in enumerate(h.coeffs) if c)
    rows: list[list[int]] = [
        [int(i == j) for j in range(n)] for i in range(n) if i != pivot
    ]
    rows.append(list(h.coeffs))
    return ProjectiveTransform.from_matrix(rows)


def transform_point_to_vertical_infinity(x: HomoPoint) -> ProjectiveTransform:
    """An invertible transform sending x to the point at vertical infinity."""
    n = len(x.coords)
    target = n - 2
    pivot = max(i for i, c in enumerate(x.coords) if c)
    columns: list[list[int]] = []
    spare = [i for i in range(n) if i != pivot]
    for slot in range(n):
        if slot == target:
            columns.append(list(x.coords))
        else:
            columns.append([int(i == spare[0]) for i in range(n)])
            spare.pop(0)
    b = tuple(tuple(Fraction(columns[j][i]) for j in range(n)) for i in range(n))
    return ProjectiveTransform(mat_inverse(b), b)


def dual_map_2d(obj: Union[HomoPoint, Hyperplane]) -> Union[Hyperplane, HomoPoint]:
    """Planar point/line duality: (a, b) <-> the line y = a*x - b.

    Extended homogeneously, the map is an involution and preserves
    incidence: (a, b, w) -> [a, -w, -b] and [A, B, C] -> (A, -C, -B).
    """
    if isinstance(obj, HomoPoint):
        if obj.dim != 2:
            raise InputError("dual_map_2d is planar only")
        a, b, w = obj.coords
        return Hyperplane.from_coeffs((a, -w, -b))
    if isinstance(obj, Hyperplane):
        if obj.dim != 2:
            raise InputError("dual_map_2d is planar only")
        A, B, C = obj.coeffs
        return HomoPoint.from_coords((A, -C, -B))
    raise InputError(f"cannot dualize {type(obj).__name__}")


def perturb_rank(points: Sequence[HomoPoint]) -> int:
    """Orientation sign of a square homogeneous determinant, never zero.

    Degeneracies are resolved by simulation of simplicity: coordinate j of
    the point with effective index i is displaced by eps**(2**(i*(d+1)+j+1)),
    a hierarchy in one infinitesimal eps.  Effective index is the point's
    site id when tagged, else its position in the argument list, so repeated
    calls on the same indexed data agree.  The leading surviving term of the
    perturbed determinant gives the sign; distinct powers of two make subset
    exponent sums unique, so the full-perturbation term is always nonzero.
    """
    k = len(points)
    if k == 0:
        raise InputError("need at least one point")
    width = len(points[0].coords)
    if k != width or any(len(p.coords) != width for p in points):
        raise InputError("perturb_rank needs k points with k homogeneous coordinates")
    eff = [p.index if p.index is not None else pos for pos, p in enumerate(points)]
    exps = [[2 ** (eff[i] * width + j + 1) for j in range(width)] for i in range(k)]
    total: dict[int, int] = {}
    for perm in itertools.permutations(range(width)):
        parity = _perm_sign(perm)
        terms: dict[int, int] = {0: parity}
        for i in range(k):
            j = perm[i]
            c = points[i].coords[j]
            nxt: dict[int, int] = {}
            for e, coef in terms.items():
                if c:
                    nxt[e] = nxt.get(e, 0) + coef * c
                e2 = e + exps[i][j]
                nxt[e2] = nxt.get(e2, 0) + coef
            terms = nxt
        for e, coef in terms.items():
            total[e] = total.get(e, 0) + coef
    for e in sorted(total):
        if total[e]:
            return sign(total[e])
    raise AssertionError("perturbed determinant cannot vanish")


def _perm_sign(perm: Sequence[int]) -> int:
    s = 1
    seen = [False] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            s = -s
    return s
