import numpy as np
import pytest

import phasecsc as pc

TRAIN_KINDS = (
    "squares", "ramp", "peaks", "shear_plane",
    "step", "mountain_like", "squares", "peaks",
)


def training_batch(n=8, size=64):
    """Clean unit-amplitude interferograms covering the pattern library."""
    images = []
    for i in range(n):
        kind = TRAIN_KINDS[i % len(TRAIN_KINDS)]
        spec = pc.PatternSpec(
            kind,
            rows=size,
            cols=size,
            coherence=1.0,
            seed=100 + i,
            magnitude=1.0 if kind == "squares" else 0.6,
        )
        images.append(pc.make_pattern(spec).clean_interferogram())
    return np.stack(images)


def random_feasible_bank(rng, num_filters, filter_size):
    """Unit-norm, support-constrained random filters."""
    filters = []
    for _ in range(num_filters):
        raw = rng.standard_normal((filter_size, filter_size)) + 1j * rng.standard_normal(
            (filter_size, filter_size)
        )
        filters.append(pc.project_to_constraint_set(raw, filter_size)[0])
    return np.stack(filters)


DESK_TRAIN_CONFIG = pc.TrainConfig(
    lmbda=0.2, rho=2.0, sigma=2.0, num_filters=16, filter_size=8,
    outer_iters=50, seed=0,
)


@pytest.fixture(scope="session")
def desk_bank():
    """Dictionary trained once per session at desk scale; reused by the
    restoration tests (train once, denoise many)."""
    bank, _ = pc.learn_dictionary(training_batch(), DESK_TRAIN_CONFIG)
    return bank
