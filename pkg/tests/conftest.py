import numpy as np
import pytest

from labpulse.spectrogram import Spectrogram


@pytest.fixture
def single_row_spectrogram():
    """A clean one-row ridge: 16 bins x 200 columns, mass on row 10."""
    powers = np.zeros((16, 200))
    powers[10, :] = 1.0
    return Spectrogram(
        powers=powers,
        freq_bpm=np.linspace(50.0, 150.0, 16),
        time_s=np.arange(200) * (4.0 / 30.0) + 8.533,
    )


@pytest.fixture
def step_ridge_spectrogram():
    """Row 4 for the first 100 columns, row 11 for the last 100."""
    powers = np.zeros((16, 200))
    powers[4, :100] = 1.0
    powers[11, 100:] = 1.0
    return Spectrogram(
        powers=powers,
        freq_bpm=np.linspace(50.0, 150.0, 16),
        time_s=np.arange(200) * (4.0 / 30.0) + 8.533,
    )


def random_spectrogram(rng, k_count=None, l_count=None):
    k = k_count or int(rng.integers(6, 17))
    l = l_count or int(rng.integers(8, 17))
    return Spectrogram(
        powers=rng.uniform(0.0, 1.0, (k, l)),
        freq_bpm=np.linspace(50.0, 150.0, k),
        time_s=np.arange(l) * 0.1333,
    )
