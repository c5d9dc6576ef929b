from zopdkit.utils.seeding import ROLE_TAGS, make_generator, role_seed, seed_everything
import numpy as np
import pytest


def test_role_seed_is_a_pure_function():
    assert role_seed(3, "fading") == role_seed(3, "fading")
    assert role_seed(3, "fading") != role_seed(4, "fading")
    assert len({role_seed(3, role) for role in ROLE_TAGS}) == len(ROLE_TAGS)
    with pytest.raises(ValueError):
        role_seed(-1, "fading")


def test_seed_everything():
    seeds = seed_everything(11)
    assert seeds.seed == 11
    assert seeds.gaussian_r == role_seed(11, "gaussian_r")
    np.testing.assert_array_equal(
        seeds.generator("diag").normal(size=3), make_generator(role_seed(11, "diag")).normal(size=3)
    )
    with pytest.raises(ValueError):
        seeds.generator("noise")


def test_generator_uses_philox():
    assert isinstance(make_generator(5).bit_generator, np.random.Philox)
