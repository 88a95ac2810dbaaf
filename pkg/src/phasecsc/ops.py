"""Complex-domain primitive operators shared by dictionary training and coding.

Conventions used throughout the toolkit:

* images are 2-D ``complex128`` arrays of shape ``(rows, cols)``;
* filter banks are ``(M, L, L)`` arrays of M square filters;
* coefficient stacks are ``(M, rows, cols)``, one map per filter, and may
  carry extra leading batch axes;
* convolution is circular, computed by zero-padding each filter to the image
  size with its support anchored at the top-left corner;
* FFTs use the unnormalized forward / 1/N-scaled inverse convention, so
  spatial/frequency round trips are exact to machine precision.

The per-frequency-bin linear solvers treat the M (or K) axis as the third
axis from the end, so a frequency grid of per-bin length-M vectors is just an
``(M, rows, cols)`` array. All functions are pure and safe to call
concurrently on disjoint data.
"""

import os

import numpy as np
from scipy import fft as _fft

_FFT_WORKERS = os.cpu_count() or 1


def fft2(a):
    """Unnormalized forward 2-D FFT over the trailing two axes."""
    return _fft.fft2(a, axes=(-2, -1), workers=_FFT_WORKERS)


def ifft2(a):
    """1/N-scaled inverse 2-D FFT over the trailing two axes."""
    return _fft.ifft2(a, axes=(-2, -1), workers=_FFT_WORKERS)


def as_image(a, name="image"):
    """Coerce to a finite 2-D complex128 array, raising ValueError otherwise."""
    out = np.asarray(a, dtype=np.complex128)
    if out.ndim != 2 or out.shape[0] < 1 or out.shape[1] < 1:
        raise ValueError(f"{name} must be a 2-D array, got shape {out.shape}")
    if not np.all(np.isfinite(out)):
        raise ValueError(f"{name} contains non-finite samples")
    return out


def as_bank(a, name="bank"):
    """Coerce to a finite (M, L, L) complex128 filter bank."""
    out = np.asarray(a, dtype=np.complex128)
    if out.ndim != 3 or out.shape[1] != out.shape[2] or out.shape[1] < 1:
        raise ValueError(
            f"{name} must have shape (num_filters, L, L), got {out.shape}"
        )
    if not np.all(np.isfinite(out)):
        raise ValueError(f"{name} contains non-finite samples")
    return out


def complex_soft_threshold(a, gamma):
    """Amplitude shrinkage that preserves phase: y = (a/|a|) max(|a| - gamma, 0).

    Proximal operator of ``gamma * sum |.|`` over complex samples, applied
    elementwise to an array of any shape. Samples with ``|a| = 0`` map to 0
    (the minimizer there is the origin), so no division by zero occurs.

    Parameters
    ----------
    a : ndarray
        Complex input, any shape.
    gamma : float
        Nonnegative threshold.
    """
    if gamma < 0:
        raise ValueError(f"gamma must be nonnegative, got {gamma}")
    a = np.asarray(a, dtype=np.complex128)
    mag = np.abs(a)
    shrunk = np.maximum(mag - gamma, 0.0)
    return a * (shrunk / np.where(mag > 0, mag, 1.0))


def project_to_constraint_set(d_padded, support_size):
    """Project a padded filter onto its support-and-unit-norm constraint set.

    Zeroes everything outside the top-left ``support_size x support_size``
    window and rescales the retained block to unit l2 norm. A zero-norm block
    cannot be normalized; it is replaced by the canonical filter (unit impulse
    at the window's top-left corner) so that runs stay deterministic, and the
    substitution is reported through the returned flag.

    Parameters
    ----------
    d_padded : ndarray
        2-D complex array, the filter padded to image size.
    support_size : int
        Side length L of the retained window.

    Returns
    -------
    projected : ndarray
        Same shape as the input, feasible.
    degenerate : bool
        True when the canonical replacement was used.
    """
    d = as_image(d_padded, "d_padded")
    L = int(support_size)
    if L < 1 or L > min(d.shape):
        raise ValueError(f"support size {L} does not fit image of shape {d.shape}")
    out = np.zeros_like(d)
    block = d[:L, :L]
    nrm = np.linalg.norm(block)
    if nrm == 0.0:
        out[0, 0] = 1.0
        return out, True
    out[:L, :L] = block / nrm
    return out, False


def solve_rank1_diag_systems(dhat, diag, rhs):
    """Solve ``(d d^H + diag I) x = b`` independently at every frequency bin.

    ``dhat`` holds one length-M vector per bin on axis -3; ``rhs`` is shaped
    like ``dhat`` up to extra leading batch axes. ``diag`` is a positive
    scalar or a per-bin ``(rows, cols)`` array. The solution uses the
    Sherman-Morrison identity

        x = (b - d (d^H b) / (diag + d^H d)) / diag

    so the cost is linear in M per bin.
    """
    diag = np.asarray(diag, dtype=np.float64)
    if not np.all(diag > 0):
        raise ValueError("diag offsets must be strictly positive at every bin")
    dH_b = np.sum(np.conj(dhat) * rhs, axis=-3, keepdims=True)
    dH_d = np.sum(np.conj(dhat) * dhat, axis=-3, keepdims=True).real
    return (rhs - dhat * (dH_b / (diag + dH_d))) / diag


def solve_iterated_sherman_morrison(xhat, sigma, rhs):
    """Solve ``(sum_k x_k x_k^H + sigma I) d = b`` at every frequency bin.

    ``xhat`` is ``(K, M, rows, cols)``: K per-bin vectors of length M. The
    rank-K-plus-identity system is solved by K successive Sherman-Morrison
    updates, each folding one outer product into the inverse already applied
    to ``rhs``.
    """
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    xhat = np.asarray(xhat, dtype=np.complex128)
    if xhat.ndim != 4:
        raise ValueError(f"xhat must be (K, M, rows, cols), got {xhat.shape}")

    def inner(v, w):
        return np.sum(np.conj(v) * w, axis=-3, keepdims=True)

    beta = np.asarray(rhs, dtype=np.complex128) / sigma
    gammas = []
    deltas = []
    for k in range(xhat.shape[0]):
        # gammas[l] holds A_l^{-1} x_l where A_l is the system truncated to the
        # first l outer products; delta[l] the matching 1 + x_l^H A_l^{-1} x_l.
        alpha = xhat[k] / sigma
        for l in range(k):
            alpha = alpha - gammas[l] * (inner(xhat[l], alpha) / deltas[l])
        delta = 1.0 + inner(xhat[k], alpha).real
        beta = beta - alpha * (inner(xhat[k], beta) / delta)
        gammas.append(alpha)
        deltas.append(delta)
    return beta


def pad_filters(bank, rows, cols):
    """Zero-pad an (M, L, L) bank to (M, rows, cols), support at the top-left."""
    bank = np.asarray(bank, dtype=np.complex128)
    L = bank.shape[-1]
    if L > rows or L > cols:
        raise ValueError(
            f"filter size {L} exceeds target dimensions ({rows}, {cols})"
        )
    out = np.zeros(bank.shape[:-2] + (rows, cols), dtype=np.complex128)
    out[..., :L, :L] = bank
    return out


def convolve_sum(bank, coeffs):
    """Reconstruct ``sum_m d_m * x_m`` under circular convolution via the FFT.

    Parameters
    ----------
    bank : ndarray
        (M, L, L) filters.
    coeffs : ndarray
        (..., M, rows, cols) coefficient maps.

    Returns
    -------
    ndarray of shape (..., rows, cols).
    """
    bank = as_bank(bank)
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    if coeffs.ndim < 3:
        raise ValueError(f"coeffs must be (..., M, rows, cols), got {coeffs.shape}")
    if coeffs.shape[-3] != bank.shape[0]:
        raise ValueError(
            f"coefficient stack has {coeffs.shape[-3]} maps but bank has "
            f"{bank.shape[0]} filters"
        )
    rows, cols = coeffs.shape[-2:]
    dhat = fft2(pad_filters(bank, rows, cols))
    return ifft2(np.sum(dhat * fft2(coeffs), axis=-3))
