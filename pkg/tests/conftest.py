import numpy as np
import pytest

from cogspectrum.topology import SpectrumModel


def model_from_parts(avail, conflict_pairs, reward, d_ok=2.0):
    """Hand-build a SpectrumModel from an availability matrix, a list of
    (n, k, m) conflict triples, and a reward matrix."""
    avail = np.asarray(avail, dtype=bool)
    reward = np.asarray(reward, dtype=float)
    n_users, n_channels = avail.shape
    conflicts = np.zeros((n_users, n_users, n_channels), dtype=bool)
    for n, k, m in conflict_pairs:
        conflicts[n, k, m] = conflicts[k, n, m] = True
    ds = np.where(avail, d_ok, 0.0)
    return SpectrumModel(ds=ds, availability=avail, interference=conflicts, reward=reward)


@pytest.fixture
def two_user_conflict_model():
    """Two users, one channel, mutually conflicting, rewards 4 and 9."""
    return model_from_parts(
        avail=[[1], [1]],
        conflict_pairs=[(0, 1, 0)],
        reward=[[4.0], [9.0]],
    )
