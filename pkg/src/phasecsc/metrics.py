"""Evaluation of restored interferograms.

PSNR is computed on wrapped phase residuals, so it is invariant to any common
complex field multiplying both inputs. The colinearity score measures local
phase homogeneity over a centered window excluding its middle pixel; border
pixels without a full window are marked NaN.
"""

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .ops import as_image


def _check_same_shape(truth, estimate):
    truth = as_image(truth, "truth")
    estimate = as_image(estimate, "estimate")
    if truth.shape != estimate.shape:
        raise ValueError(
            f"dimension mismatch: truth {truth.shape} vs estimate {estimate.shape}"
        )
    return truth, estimate


def residual_phase(truth, estimate):
    """Per-pixel wrapped phase difference angle(conj(truth) * estimate)."""
    truth, estimate = _check_same_shape(truth, estimate)
    # Expand conj(truth) * estimate into separately rounded products so an
    # estimate equal to the truth cancels to an exactly zero residual.
    re = truth.real * estimate.real + truth.imag * estimate.imag
    im = truth.real * estimate.imag - truth.imag * estimate.real
    return np.arctan2(im, re)


def psnr(truth, estimate):
    """Peak signal-to-noise ratio of the wrapped phase residual, in dB.

    Defined as 10 log10(4 N pi^2 / ||residual||^2) over the N pixels. A
    residual that is identically zero is reported as +inf.
    """
    res = residual_phase(truth, estimate)
    power = float(np.sum(res**2))
    if power == 0.0:
        return np.inf
    return float(10.0 * np.log10(4.0 * res.size * np.pi**2 / power))


def colinearity_map(phase, window=7):
    """Local phase-consistency score in [0, 1] per pixel.

    For pixel i with the (window x window) neighborhood excluding i itself
    (window^2 - 1 terms),

        C_i = |sum_p exp(j(phi_i - phi_p))| / (window^2 - 1)
              * sum_p |exp(j(phi_i - phi_p))| / (window^2 - 1)

    The second factor equals 1 identically for real phases; it is still
    evaluated, asserted close to 1, and multiplied in. Pixels within
    ``window // 2`` of the border lack a full neighborhood and are NaN.
    """
    phase = np.asarray(phase, dtype=np.float64)
    window = int(window)
    if window % 2 == 0 or window < 3:
        raise ValueError(f"window must be odd and >= 3, got {window}")
    if phase.ndim != 2 or min(phase.shape) <= window:
        raise ValueError(
            f"phase image {phase.shape} too small for window {window}"
        )
    half = window // 2
    terms = window**2 - 1
    z = np.exp(-1j * phase)
    win = sliding_window_view(z, (window, window))
    center = z[half:-half, half:-half]
    resultant = win.sum(axis=(-2, -1)) - center
    first = np.abs(np.exp(1j * phase[half:-half, half:-half]) * resultant) / terms

    mag = np.abs(z)
    magwin = sliding_window_view(mag, (window, window))
    second = (magwin.sum(axis=(-2, -1)) - mag[half:-half, half:-half]) / terms
    assert np.max(np.abs(second - 1.0)) < 1e-9, "unit-modulus factor drifted"

    out = np.full(phase.shape, np.nan)
    out[half:-half, half:-half] = np.minimum(first * second, 1.0)
    return out


@dataclass
class MetricReport:
    """PSNR, residual phase map, and a colinearity density over [0, 1]."""

    psnr_db: float
    residual_phase: np.ndarray
    colinearity_histogram: np.ndarray
    colinearity_bin_edges: np.ndarray


def report(truth, estimate, window=7, bins=50):
    """Assemble a MetricReport; the histogram integrates to 1."""
    value = psnr(truth, estimate)
    resid = residual_phase(truth, estimate)
    cmap = colinearity_map(np.angle(np.asarray(estimate)), window)
    valid = cmap[np.isfinite(cmap)]
    hist, edges = np.histogram(valid, bins=bins, range=(0.0, 1.0), density=True)
    return MetricReport(value, resid, hist, edges)
