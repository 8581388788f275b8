import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def normalized(w):
    w = np.asarray(w, dtype=float)
    return w / w.sum()


@pytest.fixture
def random_state_factory(rng):
    """Random ParticleState clouds with normalized masses."""
    from sphwass import ParticleState

    def make(n, dim, vel_scale=1.0, box=1.0):
        masses = normalized(rng.random(n) + 0.1)
        positions = box * rng.random((n, dim))
        velocities = vel_scale * rng.standard_normal((n, dim))
        return ParticleState(masses, positions, velocities)

    return make
