import random

import pytest

from depthlab.depth import SiteSet, location_depth, regression_depth
from depthlab.errors import InputError, UnsupportedDimensionError
from depthlab.fits import (
    ceil_div,
    certify_center_point,
    deepest_hyperplane,
    deepest_line_2d,
    depth_region_2d,
    reduce_location_to_regression,
    tukey_median,
)
from depthlab.geometry import HomoPoint

from oracles import (
    oracle_deepest_2d,
    oracle_location_depth_2d,
    oracle_tukey_depth_max_2d,
)


def rand_sites(rng, n, dim=2, lo=-30, hi=30):
    return SiteSet.from_points(
        [[rng.randint(lo, hi) for _ in range(dim)] for _ in range(n)],
        dimension=dim,
    )


class TestDeepestHyperplane:
    def test_collinear_sites_yield_their_line(self):
        sites = SiteSet.from_points([(0, 0), (1, 1), (2, 2)])
        fit = deepest_hyperplane(sites)
        assert fit.depth.value == 3
        assert fit.hyperplane.canonical_key() == (-1, 1, 0)

    def test_seven_sites_reach_the_bound(self):
        rng = random.Random(42)
        sites = rand_sites(rng, 7)
        assert deepest_hyperplane(sites).depth.value >= 3

    def test_matches_exhaustive_face_oracle(self):
        rng = random.Random(4242)
        for _ in range(25):
            sites = rand_sites(rng, rng.randint(1, 8), lo=-12, hi=12)
            assert deepest_hyperplane(sites).depth.value == oracle_deepest_2d(sites)

    def test_vertical_stack_resolved_by_shedding(self):
        sites = SiteSet.from_points([(0, -2), (0, -1), (0, 0), (0, 1), (0, 2)])
        fit = deepest_hyperplane(sites)
        assert not fit.hyperplane.is_vertical
        assert fit.depth.value == oracle_deepest_2d(sites) == 3

    def test_duplicate_stacks(self):
        sites = SiteSet.from_points([(1, 1)] * 6)
        assert deepest_hyperplane(sites).depth.value == 6

    def test_certificate_recomputes(self):
        rng = random.Random(77)
        sites = rand_sites(rng, 9)
        fit = deepest_hyperplane(sites)
        assert regression_depth(fit.hyperplane, sites).value == fit.depth.value
        assert fit.exact and fit.candidates_examined > 0

    def test_3d_bound(self):
        rng = random.Random(88)
        for _ in range(5):
            n = rng.randint(5, 10)
            sites = rand_sites(rng, n, dim=3)
            fit = deepest_hyperplane(sites)
            assert fit.depth.value >= ceil_div(n, 4)
            assert regression_depth(fit.hyperplane, sites).value == fit.depth.value

    def test_dimension_guard(self):
        with pytest.raises(UnsupportedDimensionError):
            deepest_hyperplane(SiteSet.from_points([(1, 1, 1, 1)]))


class TestDeepestLine2D:
    def test_agrees_with_general_engine(self):
        rng = random.Random(99)
        for _ in range(30):
            sites = rand_sites(rng, rng.randint(1, 12))
            assert (
                deepest_line_2d(sites).depth.value
                == deepest_hyperplane(sites).depth.value
            )

    def test_triangle_meets_bound(self):
        sites = SiteSet.from_points([(0, 0), (4, 0), (2, 3)])
        assert deepest_line_2d(sites).depth.value >= 1

    def test_three_tight_clusters(self):
        pts = []
        for cx, cy in [(0, 0), (100, 0), (50, 90)]:
            pts += [(cx, cy), (cx + 1, cy), (cx, cy + 1)]
        sites = SiteSet.from_points(pts)
        assert deepest_line_2d(sites).depth.value >= 3

    def test_matches_bruteforce_maximum(self):
        rng = random.Random(111)
        for _ in range(10):
            sites = rand_sites(rng, 10, lo=-15, hi=15)
            assert deepest_line_2d(sites).depth.value == oracle_deepest_2d(sites)


class TestTukeyMedian:
    def test_single_site(self):
        point, cert = tukey_median(SiteSet.from_points([(3, 4)]))
        assert point == HomoPoint.finite((3, 4))
        assert cert.value == 1

    def test_square_center_cell(self):
        sites = SiteSet.from_points([(0, 0), (1, 0), (1, 1), (0, 1)])
        point, cert = tukey_median(sites)
        assert cert.value == 2
        assert location_depth(point, sites).value == 2

    def test_nine_sites_center_bound(self):
        rng = random.Random(123)
        for _ in range(5):
            sites = rand_sites(rng, 9, lo=-100, hi=100)
            assert tukey_median(sites)[1].value >= 3

    def test_matches_bruteforce(self):
        rng = random.Random(321)
        for _ in range(20):
            sites = rand_sites(rng, rng.randint(1, 7), lo=-10, hi=10)
            assert tukey_median(sites)[1].value == oracle_tukey_depth_max_2d(sites)

    def test_collinear(self):
        sites = SiteSet.from_points([(0, 0), (1, 1), (2, 2), (3, 3), (4, 4)])
        point, cert = tukey_median(sites)
        assert cert.value == 3
        assert point == HomoPoint.finite((2, 2))

    def test_all_coincident(self):
        sites = SiteSet.from_points([(5, 7)] * 4)
        point, cert = tukey_median(sites)
        assert point == HomoPoint.finite((5, 7))
        assert cert.value == 4

    def test_coplanar_in_3d(self):
        sites = SiteSet.from_points(
            [(0, 0, 0), (4, 0, 0), (0, 4, 0), (4, 4, 0), (2, 2, 0)]
        )
        point, cert = tukey_median(sites)
        assert cert.value == oracle_tukey_depth_max_2d(
            SiteSet.from_points([(0, 0), (4, 0), (0, 4), (4, 4), (2, 2)])
        )

    def test_3d_center_bound(self):
        rng = random.Random(55)
        for _ in range(5):
            n = rng.randint(5, 11)
            sites = rand_sites(rng, n, dim=3, lo=-50, hi=50)
            point, cert = tukey_median(sites)
            assert cert.value >= ceil_div(n, 4)
            assert location_depth(point, sites).value == cert.value

    def test_infinite_sites_rejected(self):
        sites = SiteSet.from_homogeneous([(1, 0, 0)], dimension=2)
        with pytest.raises(InputError):
            tukey_median(sites)


class TestDepthRegion2D:
    def test_region_points_have_the_claimed_depth(self):
        rng = random.Random(17)
        for _ in range(15):
            sites = rand_sites(rng, rng.randint(4, 9), lo=-15, hi=15)
            max_depth = tukey_median(sites)[1].value
            for t in range(1, max_depth + 1):
                poly = depth_region_2d(sites, t)
                assert poly, f"depth-{t} region should be nonempty"
            assert not depth_region_2d(sites, max_depth + 1)

    def test_region_vertex_depth_matches_level(self):
        sites = SiteSet.from_points([(0, 0), (4, 0), (4, 4), (0, 4), (2, 2)])
        poly = depth_region_2d(sites, 2)
        for vx, vy in poly:
            assert oracle_location_depth_2d(HomoPoint.finite((vx, vy)), sites) >= 2


class TestCenterPoint:
    def test_median_is_center_point(self):
        rng = random.Random(19)
        sites = rand_sites(rng, 10)
        point, _ = tukey_median(sites)
        ok, cert = certify_center_point(point, sites)
        assert ok and cert.value >= ceil_div(10, 3)

    def test_outside_point_fails_with_witness(self):
        sites = SiteSet.from_points([(0, 0), (1, 0), (0, 1), (1, 1)])
        ok, cert = certify_center_point(HomoPoint.finite((50, 50)), sites)
        assert not ok and cert.value == 0
        assert cert.recount(sites) == 0

    def test_square_center_boundary_case(self):
        sites = SiteSet.from_points([(0, 0), (1, 0), (0, 1), (1, 1)])
        ok, cert = certify_center_point(HomoPoint.finite(("1/2", "1/2")), sites)
        assert ok and cert.value == 2  # bound is ceil(4/3) = 2


class TestReduction:
    def test_outside_point_maps_to_nonfit(self):
        sites = SiteSet.from_points([(0, 0), (1, 0), (0, 1)])
        h, image, _ = reduce_location_to_regression(HomoPoint.finite((9, 9)), sites)
        assert regression_depth(h, image).value == 0

    def test_square_center_maps_to_depth_two(self):
        sites = SiteSet.from_points([(0, 0), (1, 0), (1, 1), (0, 1)])
        h, image, _ = reduce_location_to_regression(
            HomoPoint.finite(("1/2", "1/2")), sites
        )
        assert regression_depth(h, image).value == 2

    def test_hundred_random_instances_preserve_depth(self):
        rng = random.Random(777)
        for _ in range(100):
            dim = rng.choice((2, 3))
            sites = rand_sites(rng, rng.randint(1, 9), dim=dim)
            x = HomoPoint.finite([rng.randint(-30, 30) for _ in range(dim)])
            h, image, _ = reduce_location_to_regression(x, sites)
            assert (
                regression_depth(h, image).value == location_depth(x, sites).value
            )
