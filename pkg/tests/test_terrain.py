"""Zonal elevation statistics, BFE assignment, and flood depth."""

import numpy as np

from conftest import brute_force_zonal_means, random_raster
from floodgrid.geodata import BfeZone, Raster
from floodgrid.grid import GridSpec
from floodgrid.overlay import CellAttribution
from floodgrid.terrain import (
    CellState,
    assign_bfe,
    build_cell_states,
    cell_states_csv,
    flood_depth,
    zonal_mean_elevation,
)


class TestZonalMean:
    def test_constant_field(self):
        dem = Raster(10, 10, 0, 0, 2, -9999, np.full(100, 7.0))
        g = GridSpec(0, 0, 10, 2, 2)
        means = zonal_mean_elevation(dem, g)
        assert set(means) == {(0, 0), (0, 1), (1, 0), (1, 1)}
        assert all(v == 7.0 for v in means.values())

    def test_four_values_one_cell(self):
        dem = Raster(2, 2, 0, 0, 1, -9999, np.array([2.0, 4.0, 6.0, 8.0]))
        g = GridSpec(0, 0, 10, 1, 1)
        assert zonal_mean_elevation(dem, g) == {(0, 0): 5.0}

    def test_nodata_excluded(self):
        dem = Raster(2, 1, 0, 0, 1, -9999, np.array([-9999.0, 4.0]))
        g = GridSpec(0, 0, 10, 1, 1)
        assert zonal_mean_elevation(dem, g) == {(0, 0): 4.0}

    def test_all_nodata_cell_absent(self):
        dem = Raster(2, 1, 0, 0, 1, -9999, np.array([-9999.0, -9999.0]))
        g = GridSpec(0, 0, 10, 1, 1)
        assert zonal_mean_elevation(dem, g) == {}

    def test_disjoint_extents(self):
        dem = Raster(2, 2, 1000, 1000, 1, -9999, np.arange(4.0))
        g = GridSpec(0, 0, 10, 2, 2)
        assert zonal_mean_elevation(dem, g) == {}

    def test_matches_brute_force_exactly(self):
        rng = np.random.default_rng(31)
        for _ in range(50):
            dem = random_raster(rng)
            # random grid, sometimes overlapping the raster, sometimes not
            ox = dem.xllcorner + rng.uniform(-2, 1) * dem.ncols * dem.cellsize
            oy = dem.yllcorner + rng.uniform(-2, 1) * dem.nrows * dem.cellsize
            g = GridSpec(ox, oy, float(rng.uniform(0.5, 4) * dem.cellsize),
                         int(rng.integers(1, 8)), int(rng.integers(1, 8)))
            assert zonal_mean_elevation(dem, g) == brute_force_zonal_means(dem, g)

    def test_mean_within_sample_range(self):
        rng = np.random.default_rng(37)
        dem = Raster(20, 20, 0, 0, 2, -9999, rng.uniform(0, 50, 400))
        g = GridSpec(0, 0, 8, 5, 5)
        means = zonal_mean_elevation(dem, g)
        assert means
        for v in means.values():
            assert dem.values.min() <= v <= dem.values.max()


class TestAssignBfe:
    FULL = BfeZone(rings=[[(0.0, 0.0), (30.0, 0.0), (30.0, 30.0), (0.0, 30.0)]], static_bfe=9.0)

    def test_whole_grid_zone(self):
        g = GridSpec(0, 0, 10, 3, 3)
        bfes = assign_bfe(g, [self.FULL])
        assert len(bfes) == 9
        assert all(v == 9.0 for v in bfes.values())

    def test_outside_zone_absent(self):
        g = GridSpec(0, 0, 10, 3, 3)
        west = BfeZone(rings=[[(0.0, 0.0), (15.0, 0.0), (15.0, 30.0), (0.0, 30.0)]],
                       static_bfe=4.0)
        bfes = assign_bfe(g, [west])
        # only the first column of centroids (x = 5) falls inside
        assert set(bfes) == {(0, 0), (1, 0), (2, 0)}

    def test_first_zone_wins_overlap(self):
        g = GridSpec(0, 0, 10, 3, 3)
        other = BfeZone(rings=self.FULL.rings, static_bfe=2.0)
        bfes = assign_bfe(g, [self.FULL, other])
        assert all(v == 9.0 for v in bfes.values())
        bfes = assign_bfe(g, [other, self.FULL])
        assert all(v == 2.0 for v in bfes.values())

    def test_no_zones(self):
        g = GridSpec(0, 0, 10, 2, 2)
        assert assign_bfe(g, []) == {}


class TestFloodDepth:
    def test_formula(self):
        assert flood_depth(10, 0, 7) == 3.0
        assert flood_depth(10, 0, 12) == -2.0
        assert flood_depth(10, 1, 10.5) == 0.5

    def test_unit_slope_in_slr(self):
        # exact on a dyadic lattice, where float addition introduces no rounding
        rng = np.random.default_rng(41)
        for _ in range(200):
            bfe, s, elev = np.round(rng.uniform(-50, 50, 3) * 4) / 4
            assert flood_depth(bfe, s + 1, elev) - flood_depth(bfe, s, elev) == 1.0

    def test_strictly_increasing_in_slr(self):
        rng = np.random.default_rng(43)
        for _ in range(200):
            bfe, s, elev = rng.uniform(-50, 50, 3)
            assert flood_depth(bfe, s + 1, elev) > flood_depth(bfe, s, elev)


class TestCellStates:
    def test_build_and_sum(self):
        g = GridSpec(0, 0, 10, 2, 2)
        attrs = [
            CellAttribution(cell=(0, 0), parcel_id="a", clipped_area=50.0,
                            apportioned_value=500.0),
            CellAttribution(cell=(0, 0), parcel_id="b", clipped_area=25.0,
                            apportioned_value=100.0),
            CellAttribution(cell=(1, 1), parcel_id="a", clipped_area=10.0,
                            apportioned_value=90.0),
        ]
        states = build_cell_states(g, attrs, {(0, 0): 3.5}, {(1, 1): 8.0})
        assert len(states) == 4
        assert states[(0, 0)].exposed_value == 600.0
        assert states[(0, 0)].exposed_area == 75.0
        assert states[(0, 0)].mean_elevation == 3.5
        assert states[(0, 0)].bfe is None
        assert states[(1, 1)].bfe == 8.0
        assert states[(1, 0)].exposed_value == 0.0

    def test_csv_dump(self):
        g = GridSpec(0, 0, 10, 2, 1)
        states = build_cell_states(
            g,
            [CellAttribution(cell=(0, 1), parcel_id="a", clipped_area=12.5,
                             apportioned_value=1000.0)],
            {(0, 0): 2.5},
            {(0, 1): 6.0},
        )
        out = cell_states_csv(states)
        assert out == (
            "row,col,mean_elevation,bfe,exposed_value,exposed_area\n"
            "0,0,2.5,,0.00,0\n"
            "0,1,,6,1000.00,12.5\n"
        )
