import math

import numpy as np
import pytest

from seedmix import cohesion
from seedmix.cohesion import (
    EARTH_RADIUS_MILES,
    Neighborhood,
    haversine_miles,
    near,
    sc_score,
    variety_score,
)
from seedmix.domain import SubRegion
from seedmix.errors import UndefinedScoreError
from seedmix.optimizer import PortfolioSolution


def make_region(rid, lat, lon):
    return SubRegion(
        id=rid, centroid_lat=lat, centroid_lon=lon,
        weather={"temperature": {2000: 1.0}},
        soil={"soil_ph": 6.5, "soil_organic_matter": 3.0, "soil_cec": 12.0},
    )


def solution(entries, tau=1.0):
    weights = [w for _, w in entries]
    return PortfolioSolution(
        entries=tuple(entries), tau=tau, expected_yield=10.0,
        variability=0.0, sd=0.0, offset_pct=0.0,
    )


class TestHaversine:
    def test_identical_points(self):
        assert haversine_miles(40.0, -95.0, 40.0, -95.0) == 0.0

    def test_quarter_circumference(self):
        d = haversine_miles(0.0, 0.0, 0.0, 90.0)
        assert d == pytest.approx(math.pi / 2 * EARTH_RADIUS_MILES, abs=1e-6)

    def test_symmetry(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            a = rng.uniform(-80, 80, 2)
            b = rng.uniform(-170, 170, 2)
            assert haversine_miles(a[0], b[0], a[1], b[1]) == pytest.approx(
                haversine_miles(a[1], b[1], a[0], b[0]), rel=1e-12
            )


class TestNear:
    @pytest.fixture
    def grid(self):
        # centroids roughly 10 miles apart along both axes
        step = 10.0 / 69.0  # ~10 miles of latitude in degrees
        regions = {}
        for r in range(4):
            for c in range(4):
                rid = f"G{r}{c}"
                lat = 40.0 + r * step
                lon = -95.0 + c * step / math.cos(math.radians(40.0))
                regions[rid] = make_region(rid, lat, lon)
        return regions

    def test_zero_radius_is_empty(self, grid):
        assert near(grid, "G11", 0.0).neighbors == ()

    def test_radius_covering_everything(self, grid):
        hood = near(grid, "G11", 1e6)
        assert len(hood.neighbors) == len(grid) - 1
        assert "G11" not in hood.neighbors

    def test_membership_matches_brute_force(self, grid):
        for m in (5.0, 15.0, 25.0):
            for center in grid:
                hood = near(grid, center, m)
                c = grid[center]
                expected = sorted(
                    rid for rid, reg in grid.items()
                    if rid != center and haversine_miles(
                        c.centroid_lat, c.centroid_lon,
                        reg.centroid_lat, reg.centroid_lon) <= m
                )
                assert list(hood.neighbors) == expected

    def test_ten_mile_grid_four_adjacency(self, grid):
        # 12 miles keeps the 10-mile axis neighbors and excludes the
        # ~14.1-mile diagonals; at 15 miles the diagonals join too
        hood = near(grid, "G11", 12.0)
        assert set(hood.neighbors) == {"G01", "G10", "G12", "G21"}
        wider = near(grid, "G11", 15.0)
        assert set(wider.neighbors) == {
            "G01", "G10", "G12", "G21", "G00", "G02", "G20", "G22",
        }

    def test_unknown_center_raises_key_error(self, grid):
        with pytest.raises(KeyError):
            near(grid, "nope", 10.0)


class TestVarietyScore:
    def hood(self, n):
        return Neighborhood(center="C", radius_miles=50.0,
                            neighbors=tuple(f"N{i}" for i in range(n)))

    def test_absent_everywhere_is_zero(self):
        sols = {"N0": solution([("vX", 1.0)]), "N1": None}
        assert variety_score("v1", self.hood(2), sols) == 0.0

    def test_constant_weight_averages_to_itself(self):
        sols = {f"N{i}": solution([("v1", 0.25), ("v2", 0.75)]) for i in range(4)}
        assert variety_score("v1", self.hood(4), sols) == pytest.approx(0.25)

    def test_hand_worked_average(self):
        sols = {
            "N0": solution([("v1", 0.4), ("vZ", 0.6)]),
            "N1": solution([("vZ", 1.0)]),
            "N2": solution([("v1", 0.2), ("vZ", 0.8)]),
        }
        assert variety_score("v1", self.hood(3), sols) == pytest.approx(0.2)

    def test_missing_neighbor_solution_counts_as_zero_weight(self):
        sols = {"N0": solution([("v1", 1.0)])}  # N1 has no solution at this tau
        assert variety_score("v1", self.hood(2), sols) == pytest.approx(0.5)

    def test_empty_neighborhood_is_undefined(self):
        with pytest.raises(UndefinedScoreError):
            variety_score("v1", self.hood(0), {})


class TestScScore:
    def hood(self, n):
        return Neighborhood(center="C", radius_miles=50.0,
                            neighbors=tuple(f"N{i}" for i in range(n)))

    def test_identical_neighbors_score_point_two_exactly(self):
        mine = solution([("v1", 0.5), ("v2", 0.25), ("v3", 0.25)])
        sols = {f"N{i}": mine for i in range(3)}
        assert sc_score(mine, self.hood(3), sols) == 0.2

    def test_disjoint_solutions_score_zero(self):
        mine = solution([("v1", 0.5), ("v2", 0.5)])
        sols = {f"N{i}": solution([("vX", 1.0)]) for i in range(3)}
        assert sc_score(mine, self.hood(3), sols) == 0.0

    def test_hand_worked_partial_overlap(self):
        # var_s(v1) = (0.4 + 0.2)/2 = 0.3; var_s(v2) = (0 + 0.3)/2 = 0.15
        mine = solution([("v1", 0.5), ("v2", 0.5)])
        sols = {
            "N0": solution([("v1", 0.4), ("vZ", 0.6)]),
            "N1": solution([("v1", 0.2), ("v2", 0.3), ("vZ", 0.5)]),
        }
        assert sc_score(mine, self.hood(2), sols) == pytest.approx(0.09, abs=1e-12)

    def test_neighbor_order_is_irrelevant(self):
        mine = solution([("v1", 0.6), ("v2", 0.4)])
        sols = {
            "N0": solution([("v1", 0.3), ("vZ", 0.7)]),
            "N1": solution([("v2", 0.9), ("vZ", 0.1)]),
            "N2": solution([("v1", 0.5), ("v2", 0.5)]),
        }
        fwd = Neighborhood(center="C", radius_miles=1.0, neighbors=("N0", "N1", "N2"))
        rev = Neighborhood(center="C", radius_miles=1.0, neighbors=("N2", "N1", "N0"))
        assert sc_score(mine, fwd, sols) == sc_score(mine, rev, sols)

    def test_consistent_relabeling_preserves_score(self):
        relabel = {"v1": "w9", "v2": "w8", "vZ": "w7"}
        mine = solution([("v1", 0.5), ("v2", 0.5)])
        sols = {
            "N0": solution([("v1", 0.4), ("vZ", 0.6)]),
            "N1": solution([("v2", 0.3), ("vZ", 0.7)]),
        }
        mine2 = solution([(relabel[c], w) for c, w in mine.entries])
        sols2 = {
            rid: solution([(relabel[c], w) for c, w in s.entries])
            for rid, s in sols.items()
        }
        hood = self.hood(2)
        assert sc_score(mine, hood, sols) == sc_score(mine2, hood, sols2)

    def test_score_bounded_by_point_two(self):
        rng = np.random.default_rng(4)
        for _ in range(30):
            def random_solution():
                n = int(rng.integers(1, 6))
                raw = rng.uniform(0.1, 1.0, n)
                w = 0.1 + (raw / raw.sum()) * (1 - 0.1 * n)
                codes = rng.choice([f"v{i}" for i in range(8)], n, replace=False)
                return solution(list(zip(codes.tolist(), w.tolist())))

            mine = random_solution()
            sols = {f"N{i}": random_solution() for i in range(4)}
            s = sc_score(mine, self.hood(4), sols)
            assert 0.0 <= s <= 0.2 + 1e-12

    def test_entry_count_divisor_flag(self):
        mine = solution([("v1", 1.0)])
        sols = {"N0": solution([("v1", 1.0)])}
        hood = self.hood(1)
        assert sc_score(mine, hood, sols) == pytest.approx(0.2)
        assert sc_score(mine, hood, sols, divisor_entries=True) == pytest.approx(1.0)
