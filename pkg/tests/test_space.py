import numpy as np
import pytest
from hypothesis import given, strategies as st

from hpobench.gbt import HyperParams
from hpobench.space import (DEFAULT_GRIDS, PARAM_NAMES, SearchSpace, UnitCube, default_space,
                            sample_uniform)

unit_points = st.lists(st.floats(0.0, 1.0), min_size=6, max_size=6)


def test_grid_sizes():
    assert default_space().sizes() == (8, 15, 10, 4, 6, 4)
    assert default_space().dim == 6


def test_corners():
    space = default_space()
    lo = space.decode(np.zeros(6))
    hi = space.decode(np.ones(6))
    assert lo == HyperParams(3, 0.001, 100, 0.5, 0.5, 1)
    assert hi == HyperParams(10, 0.9, 1000, 1.0, 1.0, 7)


def test_half_rounds_away_from_zero():
    space = SearchSpace.from_mapping({"subsample": (0.5, 0.8, 1.0)})
    u = np.zeros(6)
    u[PARAM_NAMES.index("subsample")] = 0.25
    assert space.decode(u).subsample == 0.8
    u[PARAM_NAMES.index("subsample")] = 0.75
    assert space.decode(u).subsample == 1.0


@given(unit_points)
def test_decode_lands_on_grid(u):
    space = default_space()
    hp = space.decode(np.array(u))
    assert space.contains(hp)
    assert isinstance(hp.max_depth, int) and isinstance(hp.n_estimators, int)


@given(unit_points)
def test_encode_decode_round_trip(u):
    space = default_space()
    hp = space.decode(np.array(u))
    assert space.decode(space.encode(hp)) == hp
    np.testing.assert_allclose(space.snap(np.array(u)), space.encode(hp))


@given(st.integers(0, 2**31))
def test_uniform_samples_on_grid(seed):
    assert default_space().contains(sample_uniform(default_space(), seed))


def test_sampling_covers_every_grid_value():
    space = default_space()
    rng = np.random.default_rng(0)
    seen = {name: set() for name in PARAM_NAMES}
    for _ in range(2000):
        for name, value in space.decode(space.sample_unit(rng)).as_dict().items():
            seen[name].add(value)
    assert all(seen[n] == set(DEFAULT_GRIDS[n]) for n in PARAM_NAMES)


def test_mapping_round_trip_and_unknown_name():
    space = default_space()
    assert SearchSpace.from_mapping(space.to_mapping()).sizes() == space.sizes()
    with pytest.raises(ValueError):
        SearchSpace.from_mapping({"gamma": (0, 1)})


def test_unit_cube_is_identity_on_interior():
    cube = UnitCube(3)
    assert cube.decode(np.array([0.1, 0.5, 0.9])) == (0.1, 0.5, 0.9)
    np.testing.assert_array_equal(cube.snap(np.array([-1.0, 0.5, 2.0])), [0.0, 0.5, 1.0])
