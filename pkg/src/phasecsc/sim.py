"""Synthetic interferogram generation and the boxcar baseline.

A scene is a ground-truth phase pattern, an amplitude map, and a coherence
map. Noisy interferograms are drawn from the two-acquisition correlated
circular-Gaussian scatterer model: per pixel, two unit complex Gaussians are
mixed through the Cholesky factor of the 2 x 2 covariance fixed by
(amplitude, phase, coherence) and multiplied conjugately. Everything here is
a pure function of its arguments and a seed.
"""

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from . import ops

PATTERN_KINDS = ("step", "ramp", "peaks", "shear_plane", "squares", "mountain_like")


@dataclass
class SyntheticScene:
    """Ground truth driving the noise model: phase, amplitude, coherence."""

    true_phase: np.ndarray
    amplitude: np.ndarray
    coherence: np.ndarray

    def __post_init__(self):
        self.true_phase = np.asarray(self.true_phase, dtype=np.float64)
        self.amplitude = np.asarray(self.amplitude, dtype=np.float64)
        self.coherence = np.asarray(self.coherence, dtype=np.float64)
        if not (self.true_phase.shape == self.amplitude.shape == self.coherence.shape):
            raise ValueError("phase, amplitude and coherence must share dimensions")
        if self.true_phase.ndim != 2:
            raise ValueError("scene grids must be 2-D")
        if np.any(self.coherence < 0) or np.any(self.coherence > 1):
            raise ValueError("coherence must lie in [0, 1]")
        if np.any(self.amplitude <= 0):
            raise ValueError("amplitude must be positive everywhere")

    @property
    def shape(self):
        return self.true_phase.shape

    def clean_interferogram(self):
        """Noise-free interferogram a^2 exp(j phase)."""
        return (self.amplitude**2 * np.exp(1j * self.true_phase)).astype(np.complex128)


@dataclass
class PatternSpec:
    """Recipe for a ground-truth scene.

    ``coherence`` is either a constant or a ``(left, right)`` pair producing a
    linear column ramp. ``magnitude`` scales the phase excursion of the smooth
    patterns (ramp cycles, peak heights, shear slope); the piecewise-constant
    patterns use their explicit level sets. ``seed`` only matters for
    ``mountain_like``.
    """

    kind: str
    rows: int = 256
    cols: int = 256
    coherence: float | tuple[float, float] = 1.0
    amplitude: float = 1.0
    step_levels: tuple[float, float] = (-np.pi / 3, np.pi / 3)
    magnitude: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in PATTERN_KINDS:
            raise ValueError(
                f"unknown pattern kind {self.kind!r}; expected one of {PATTERN_KINDS}"
            )
        if self.rows < 2 or self.cols < 2:
            raise ValueError("patterns need at least 2 x 2 pixels")
        if self.amplitude <= 0:
            raise ValueError("amplitude must be positive")


def _wrap(phase):
    """Wrap to (-pi, pi]."""
    return np.angle(np.exp(1j * phase))


def _coherence_map(spec):
    if isinstance(spec.coherence, tuple):
        lo, hi = spec.coherence
        ramp = np.linspace(lo, hi, spec.cols)
        gamma = np.broadcast_to(ramp, (spec.rows, spec.cols)).copy()
    else:
        gamma = np.full((spec.rows, spec.cols), float(spec.coherence))
    if np.any(gamma < 0) or np.any(gamma > 1):
        raise ValueError("coherence values must lie in [0, 1]")
    return gamma


def _phase_step(spec):
    lo, hi = spec.step_levels
    phase = np.full((spec.rows, spec.cols), lo)
    phase[:, spec.cols // 2 :] = hi
    return phase


def _phase_ramp(spec):
    # magnitude = number of full fringes across the image width
    cycles = 3.0 * spec.magnitude
    c = np.arange(spec.cols) / spec.cols
    return np.broadcast_to(2 * np.pi * cycles * c, (spec.rows, spec.cols)).copy()


def _phase_peaks(spec):
    r = np.arange(spec.rows)[:, None] / spec.rows
    c = np.arange(spec.cols)[None, :] / spec.cols
    bumps = (
        (0.30, 0.30, 0.16, 7.0),
        (0.70, 0.60, 0.20, -6.0),
        (0.45, 0.80, 0.12, 5.0),
        (0.20, 0.70, 0.10, -4.0),
        (0.80, 0.20, 0.14, 5.5),
    )
    phase = np.zeros((spec.rows, spec.cols))
    for rc, cc, width, height in bumps:
        phase += (
            spec.magnitude
            * height
            * np.exp(-((r - rc) ** 2 + (c - cc) ** 2) / (2 * width**2))
        )
    return phase

def _phase_shear_plane(spec):
    split = spec.cols // 3
    slope = 0.35 * spec.magnitude
    c = np.arange(spec.cols)[None, :]
    phase = np.where(c < split, -1.0, -1.0 + slope * (c - split))
    return np.broadcast_to(phase, (spec.rows, spec.cols)).copy()


def _phase_squares(spec):
    # Nested centered rectangles; adjacent levels differ by 1.6 rad, so every
    # block border carries a wrapped jump above 1 rad.
    levels = (-2.4, -0.8, 0.8, 2.4)
    margins = (0.0, 0.15, 0.28, 0.40)
    phase = np.zeros((spec.rows, spec.cols))
    for level, frac in zip(levels, margins):
        r0, r1 = int(spec.rows * frac), spec.rows - int(spec.rows * frac)
        c0, c1 = int(spec.cols * frac), spec.cols - int(spec.cols * frac)
        phase[r0:r1, c0:c1] = level
    # one off-center block for asymmetry, still a > 1 rad jump
    r0, c0 = int(spec.rows * 0.05), int(spec.cols * 0.55)
    phase[r0 : r0 + spec.rows // 8, c0 : c0 + spec.cols // 5] = 0.8
    return phase


def _phase_mountain(spec):
    rng = np.random.default_rng(spec.seed)
    noise = rng.standard_normal((spec.rows, spec.cols))
    scale = min(spec.rows, spec.cols)
    rough = sum(
        weight * ndimage.gaussian_filter(noise, sigma=scale * frac, mode="wrap")
        for weight, frac in ((1.0, 0.04), (2.0, 0.10), (4.0, 0.22))
    )
    rough -= rough.mean()
    peak = np.max(np.abs(rough))
    return 3.5 * np.pi * spec.magnitude * rough / peak


_PATTERNS = {
    "step": _phase_step,
    "ramp": _phase_ramp,
    "peaks": _phase_peaks,
    "shear_plane": _phase_shear_plane,
    "squares": _phase_squares,
    "mountain_like": _phase_mountain,
}


def make_pattern(spec):
    """Build the SyntheticScene described by ``spec``; phase is wrapped."""
    phase = _wrap(_PATTERNS[spec.kind](spec))
    amplitude = np.full((spec.rows, spec.cols), float(spec.amplitude))
    return SyntheticScene(phase, amplitude, _coherence_map(spec))


def simulate_slc_pair(scene, seed):
    """Draw the two correlated acquisitions (u1, u2) for ``scene``.

    Per pixel, with independent unit circular complex Gaussians r1, r2:

        u1 = a r1
        u2 = a (gamma exp(-j phi) r1 + sqrt(1 - gamma^2) r2)

    which realizes the target 2 x 2 covariance through its Cholesky factor.
    """
    rng = np.random.default_rng(seed)
    shape = scene.shape
    r1 = _unit_circular_gaussian(rng, shape)
    r2 = _unit_circular_gaussian(rng, shape)
    a = scene.amplitude
    gamma = scene.coherence
    u1 = a * r1
    u2 = a * (gamma * np.exp(-1j * scene.true_phase) * r1 + np.sqrt(1 - gamma**2) * r2)
    return u1, u2


def _unit_circular_gaussian(rng, shape):
    # real and imaginary parts i.i.d. N(0, 1/2), so E|r|^2 = 1
    return np.sqrt(0.5) * (
        rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    )


def simulate_interferogram(scene, seed):
    """Noisy interferogram s = u1 conj(u2); deterministic given ``seed``."""
    u1, u2 = simulate_slc_pair(scene, seed)
    return u1 * np.conj(u2)


def boxcar_filter(image, window):
    """Complex mean over a centered square window, circular boundary.

    ``window`` must be odd; ``window = 1`` is the identity.
    """
    image = np.asarray(image, dtype=np.complex128)
    window = int(window)
    if window % 2 == 0 or window < 1:
        raise ValueError(f"window must be odd and positive, got {window}")
    rows, cols = image.shape
    if window > rows or window > cols:
        raise ValueError(f"window {window} exceeds image dimensions {image.shape}")
    half = window // 2
    kernel = np.zeros((rows, cols))
    idx_r = np.arange(-half, half + 1) % rows
    idx_c = np.arange(-half, half + 1) % cols
    kernel[np.ix_(idx_r, idx_c)] = 1.0 / window**2
    return ops.ifft2(ops.fft2(image) * ops.fft2(kernel))


def circular_mean_std(z_sum, count):
    """Mean angle and circular standard deviation from a resultant sum."""
    mean = np.angle(z_sum)
    rbar = np.minimum(np.abs(z_sum) / count, 1.0)
    std = np.sqrt(np.maximum(-2.0 * np.log(rbar), 0.0))
    return mean, std


def mc_step_experiment(
    trials,
    coherence,
    methods,
    seed,
    profile_len=256,
    rows=32,
    step_levels=(-np.pi / 3, np.pi / 3),
):
    """Monte-Carlo step-restoration study.

    Each trial simulates an independent noisy interferogram of a step scene
    (the 1-D step profile replicated over ``rows`` rows) and runs every
    method on it. Phases are pooled over rows and trials per column.

    Parameters
    ----------
    trials : int
        Number of independent scenes.
    coherence : float
        Constant scene coherence.
    methods : sequence of callables
        Each maps a complex image to a filtered complex image.
    seed : int
        Master seed; each trial draws its own stream from (seed, trial).

    Returns
    -------
    list of (mean, std)
        Per method, in input order: per-column circular mean and circular
        standard deviation of the filtered phase, length ``profile_len``.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    spec = PatternSpec(
        "step", rows=rows, cols=profile_len, coherence=float(coherence),
        step_levels=step_levels,
    )
    scene = make_pattern(spec)
    trial_seeds = np.random.SeedSequence(seed).generate_state(trials, dtype=np.uint64)
    sums = [np.zeros(profile_len, dtype=np.complex128) for _ in methods]
    for t in range(trials):
        noisy = simulate_interferogram(scene, int(trial_seeds[t]))
        for i, method in enumerate(methods):
            filtered = np.asarray(method(noisy))
            phases = np.angle(filtered)
            sums[i] += np.exp(1j * phases).sum(axis=0)
    count = trials * rows
    return [circular_mean_std(z, count) for z in sums]
