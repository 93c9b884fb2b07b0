import random

import pytest

from depthlab.errors import InputError, SingularMatrixError
from depthlab.geometry import (
    HomoPoint,
    Hyperplane,
    ProjectiveTransform,
    apply_transform,
    dual_map_2d,
    incident,
    perturb_rank,
    side_of,
    transform_point_to_vertical_infinity,
    transform_to_infinity,
)


def rand_point(rng, dim=2, finite=True):
    while True:
        coords = [rng.randint(-50, 50) for _ in range(dim)]
        coords.append(rng.randint(1, 9) if finite else 0)
        if any(coords):
            return HomoPoint.from_coords(coords)


def rand_transform(rng, dim=2):
    while True:
        rows = [[rng.randint(-9, 9) for _ in range(dim + 1)] for _ in range(dim + 1)]
        try:
            return ProjectiveTransform.from_matrix(rows)
        except SingularMatrixError:
            continue


class TestSideOf:
    def test_above_axis(self):
        h = Hyperplane.from_coeffs((0, 1, 0))
        assert side_of(h, HomoPoint.finite((0, 1))) == 1

    def test_incidence(self):
        h = Hyperplane.from_coeffs((0, 1, 0))
        assert side_of(h, HomoPoint.finite((5, 0))) == 0

    def test_below_axis(self):
        h = Hyperplane.from_coeffs((0, 1, 0))
        assert side_of(h, HomoPoint.finite((3, -2))) == -1

    def test_invariant_under_positive_scaling_and_flip_under_negation(self):
        rng = random.Random(7)
        for _ in range(200):
            p = rand_point(rng)
            h = Hyperplane.from_coeffs(
                [rng.randint(-9, 9) for _ in range(2)] + [rng.randint(1, 9)]
            )
            scaled = HomoPoint.from_coords([3 * c for c in p.coords])
            assert side_of(h, scaled) == side_of(h, p)
            assert side_of(h.negated(), p) == -side_of(h, p)


class TestCanonicalForm:
    def test_decimal_strings_parse_exactly(self):
        p = HomoPoint.finite(("0.5", "1"))
        assert p.coords == (1, 2, 2)

    def test_rational_strings(self):
        p = HomoPoint.finite(("1/3", "2/7"))
        assert p.coords == (7, 6, 21)

    def test_projective_equality(self):
        a = HomoPoint.from_coords((2, -4, 2))
        b = HomoPoint.from_coords((-1, 2, -1))
        assert a == b

    def test_all_zero_rejected(self):
        with pytest.raises(InputError):
            HomoPoint.from_coords((0, 0, 0))

    def test_float_rejected(self):
        with pytest.raises(InputError):
            HomoPoint.from_coords((0.5, 1, 1))


class TestTransforms:
    def test_identity_fixes_points(self):
        t = ProjectiveTransform.identity(2)
        p = HomoPoint.finite((3, 4))
        assert t.apply_point(p) == p

    def test_singular_rejected(self):
        with pytest.raises(SingularMatrixError):
            ProjectiveTransform.from_matrix([[1, 0, 0], [0, 1, 0], [1, 1, 0]])

    def test_incidence_preserved(self):
        rng = random.Random(11)
        for _ in range(100):
            t = rand_transform(rng)
            p = rand_point(rng)
            q = rand_point(rng)
            if p.coords == q.coords:
                continue
            h = Hyperplane.through_points([p, q])
            assert incident(h, p) and incident(h, q)
            th = t.apply_hyperplane(h)
            assert incident(th, t.apply_point(p))
            assert incident(th, t.apply_point(q))

    def test_wedge_sign_product_structure_preserved(self):
        # the projective invariant: a point's sign product against TWO
        # hyperplanes (wedge membership) survives any transform exactly
        rng = random.Random(13)
        for _ in range(200):
            t = rand_transform(rng)
            h = Hyperplane.from_coeffs(
                [rng.randint(-9, 9), rng.randint(-9, 9), rng.randint(1, 9)]
            )
            g = Hyperplane.from_coeffs(
                [rng.randint(-9, 9), rng.randint(1, 9), rng.randint(-9, 9)]
            )
            p = rand_point(rng, finite=rng.random() < 0.9)
            lhs = side_of(h, p) * side_of(g, p)
            rhs = side_of(t.apply_hyperplane(h), t.apply_point(p)) * side_of(
                t.apply_hyperplane(g), t.apply_point(p)
            )
            assert lhs == rhs

    def test_to_infinity_sends_line_to_infinity(self):
        h = Hyperplane.from_coeffs((0, 1, -1))  # y = 1
        t = transform_to_infinity(h)
        assert t.apply_hyperplane(h).projectively_equal(Hyperplane.infinity(2))

    def test_to_infinity_roundtrip(self):
        rng = random.Random(17)
        for _ in range(50):
            coeffs = [rng.randint(-20, 20) for _ in range(3)]
            if not any(coeffs):
                continue
            h = Hyperplane.from_coeffs(coeffs)
            t = transform_to_infinity(h)
            back = t.inverse().apply_hyperplane(Hyperplane.infinity(2))
            assert back.projectively_equal(h)

    def test_to_infinity_of_infinity_fixes_infinity(self):
        t = transform_to_infinity(Hyperplane.infinity(2))
        img = t.apply_hyperplane(Hyperplane.infinity(2))
        assert img.projectively_equal(Hyperplane.infinity(2))

    def test_point_to_vertical_infinity(self):
        for coords in [(0, 0, 1), (3, -2, 5), (1, 0, 0), (0, 1, 0)]:
            x = HomoPoint.from_coords(coords)
            t = transform_point_to_vertical_infinity(x)
            assert t.apply_point(x) == HomoPoint.vertical_infinity(2)
            assert t.inverse().apply_point(HomoPoint.vertical_infinity(2)) == x

    def test_point_to_vertical_infinity_3d(self):
        x = HomoPoint.finite((4, -7, 2))
        t = transform_point_to_vertical_infinity(x)
        assert t.apply_point(x) == HomoPoint.vertical_infinity(3)

    def test_apply_transform_dispatch(self):
        t = ProjectiveTransform.identity(2)
        assert isinstance(apply_transform(t, HomoPoint.finite((1, 1))), HomoPoint)
        assert isinstance(apply_transform(t, Hyperplane.infinity(2)), Hyperplane)


class TestDuality:
    def test_origin_maps_to_x_axis(self):
        assert dual_map_2d(HomoPoint.finite((0, 0))).projectively_equal(
            Hyperplane.from_coeffs((0, 1, 0))
        )

    def test_point_formula(self):
        # (1, 2) <-> the line y = x - 2
        line = dual_map_2d(HomoPoint.finite((1, 2)))
        assert line.projectively_equal(Hyperplane.from_coeffs((1, -1, -2)))

    def test_incidence_example(self):
        p = HomoPoint.finite((1, 1))
        line = Hyperplane.from_coeffs((1, -1, 0))  # y = x
        assert incident(line, p)
        assert incident(dual_map_2d(p), dual_map_2d(line))

    def test_involution_and_incidence_random(self):
        rng = random.Random(23)
        for _ in range(1000):
            p = rand_point(rng, finite=rng.random() < 0.9)
            h = Hyperplane.from_coeffs(
                [rng.randint(-30, 30) for _ in range(2)] + [rng.randint(-30, 30)]
            ) if rng.random() < 0.5 else dual_map_2d(rand_point(rng))
            pp = dual_map_2d(dual_map_2d(p))
            assert pp == p
            hh = dual_map_2d(dual_map_2d(h))
            assert hh.projectively_equal(h)
            assert incident(h, p) == incident(dual_map_2d(p), dual_map_2d(h))

    def test_vertical_infinity_maps_to_infinity(self):
        assert dual_map_2d(HomoPoint.vertical_infinity(2)).projectively_equal(
            Hyperplane.infinity(2)
        )


class TestPerturbRank:
    def test_collinear_is_nondegenerate_and_deterministic(self):
        pts = [
            HomoPoint.finite((0, 0), 0),
            HomoPoint.finite((1, 1), 1),
            HomoPoint.finite((2, 2), 2),
        ]
        s1 = perturb_rank(pts)
        s2 = perturb_rank(pts)
        assert s1 == s2 and s1 in (-1, 1)

    def test_repeated_identical_site(self):
        p = HomoPoint.finite((3, 4))
        pts = [p.with_index(0), p.with_index(1), p.with_index(2)]
        assert perturb_rank(pts) in (-1, 1)

    def test_generic_input_matches_plain_orientation(self):
        rng = random.Random(29)
        for _ in range(100):
            pts = [rand_point(rng).with_index(i) for i in range(3)]
            a, b, c = (p.coords for p in pts)
            det = (
                a[0] * (b[1] * c[2] - b[2] * c[1])
                - a[1] * (b[0] * c[2] - b[2] * c[0])
                + a[2] * (b[0] * c[1] - b[1] * c[0])
            )
            if det != 0:
                assert perturb_rank(pts) == (1 if det > 0 else -1)

    def test_order_sensitivity_is_consistent(self):
        pts = [
            HomoPoint.finite((0, 0), 0),
            HomoPoint.finite((1, 0), 1),
            HomoPoint.finite((2, 0), 2),
        ]
        first = perturb_rank(pts)
        assert perturb_rank(list(pts)) == first
