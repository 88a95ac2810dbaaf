"""Alternating dictionary learning over a batch of clean complex images.

Minimizes, over filters and coefficient maps jointly,

    1/2 sum_k ||sum_m d_m * x_mk - s_k||^2 + lmbda sum_mk ||x_mk||_1
    subject to every d_m supported on an L x L window with ||d_m||_2 = 1.

Each outer iteration interleaves one ADMM triple of the multi-image coding
block with one ADMM triple of the dictionary block, warm-starting both from
the previous iteration. Filters live zero-padded to image size during
training; the coding block consumes the feasible (projected) dictionary
iterate and training finally returns it, so the learned bank satisfies the
support and unit-norm constraints by construction.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import ops
from .solver import AdmmTrace, SolverDiverged, _relative


@dataclass
class TrainConfig:
    """Hyperparameters of a training run.

    ``rho`` penalizes the coding split, ``sigma`` the dictionary split. The
    defaults suit unit-amplitude interferograms at desk scale (16 filters of
    8 x 8 on 64 x 64 images); larger banks are just configuration.
    """

    lmbda: float = 0.2
    rho: float = 2.0
    sigma: float = 2.0
    num_filters: int = 16
    filter_size: int = 8
    outer_iters: int = 200
    seed: int = 0

    def __post_init__(self):
        if self.lmbda < 0:
            raise ValueError(f"lmbda must be nonnegative, got {self.lmbda}")
        if self.rho <= 0 or self.sigma <= 0:
            raise ValueError("rho and sigma must be positive")
        if self.num_filters < 1:
            raise ValueError(f"need at least one filter, got {self.num_filters}")
        if self.filter_size < 2:
            raise ValueError(f"filter_size must be >= 2, got {self.filter_size}")
        if self.outer_iters < 1:
            raise ValueError(f"outer_iters must be >= 1, got {self.outer_iters}")


@dataclass
class TrainState:
    """Warm-start state threaded through the two ADMM blocks.

    Coding variables are (K, M, rows, cols); dictionary variables are
    (M, rows, cols), padded to image size. ``filt_y`` is always feasible.
    """

    coef_x: np.ndarray
    coef_y: np.ndarray
    coef_u: np.ndarray
    filt_d: np.ndarray
    filt_y: np.ndarray
    filt_u: np.ndarray
    degenerate_projections: int = 0


def as_batch(images, name="batch"):
    """Coerce to a finite (K, rows, cols) complex array of equal-size images."""
    if isinstance(images, np.ndarray) and images.ndim == 3:
        batch = np.asarray(images, dtype=np.complex128)
    else:
        imgs = [ops.as_image(im, f"{name}[{i}]") for i, im in enumerate(images)]
        if not imgs:
            raise ValueError(f"{name} must contain at least one image")
        shapes = {im.shape for im in imgs}
        if len(shapes) != 1:
            raise ValueError(f"{name} mixes image dimensions: {sorted(shapes)}")
        batch = np.stack(imgs)
    if not np.all(np.isfinite(batch)):
        raise ValueError(f"{name} contains non-finite samples")
    return batch


def initial_bank(config):
    """Seeded random feasible bank: complex Gaussian entries, projected."""
    rng = np.random.default_rng(config.seed)
    L = config.filter_size
    raw = rng.standard_normal((config.num_filters, L, L)) + 1j * rng.standard_normal(
        (config.num_filters, L, L)
    )
    bank = np.empty_like(raw)
    for m in range(config.num_filters):
        bank[m], _ = ops.project_to_constraint_set(raw[m], L)
    return bank


def initial_state(batch, config):
    """Zero coding variables plus the seeded feasible dictionary."""
    batch = as_batch(batch)
    k, rows, cols = batch.shape
    m = config.num_filters
    zeros = lambda: np.zeros((k, m, rows, cols), dtype=np.complex128)
    dpad = ops.pad_filters(initial_bank(config), rows, cols)
    return TrainState(
        coef_x=zeros(),
        coef_y=zeros(),
        coef_u=zeros(),
        filt_d=dpad.copy(),
        filt_y=dpad.copy(),
        filt_u=np.zeros_like(dpad),
    )


def sparse_step(batch, bank, state, config):
    """One joint X/Y/U ADMM triple of the coding block over all K images.

    ``bank`` is the current feasible dictionary as (M, L, L) filters; the
    coefficient update solves the rank-1-plus-identity frequency systems for
    every image at once, then shrinks and updates the duals. Mutates and
    returns ``state``.
    """
    batch = as_batch(batch)
    rows, cols = batch.shape[-2:]
    dconj = np.conj(ops.fft2(ops.pad_filters(bank, rows, cols)))
    rhs = dconj * ops.fft2(batch)[:, None] + config.rho * ops.fft2(
        state.coef_y - state.coef_u
    )
    x = ops.ifft2(ops.solve_rank1_diag_systems(dconj, config.rho, rhs))
    if not np.all(np.isfinite(x)):
        raise SolverDiverged("non-finite coefficients in coding step", AdmmTrace())
    state.coef_x = x
    state.coef_y = ops.complex_soft_threshold(
        x + state.coef_u, config.lmbda / config.rho
    )
    state.coef_u = state.coef_u + x - state.coef_y
    return state


def dict_step(batch, coeffs, state, config):
    """One d/y/u ADMM triple of the dictionary block.

    ``coeffs`` are the (K, M, rows, cols) maps fixed by the preceding coding
    step. The d-update solves the rank-K-plus-identity frequency systems by
    iterated Sherman-Morrison; y is the projection onto the constraint set, so
    it is always feasible. Mutates and returns ``state``.
    """
    batch = as_batch(batch)
    L = config.filter_size
    chat = ops.fft2(np.asarray(coeffs, dtype=np.complex128))
    cconj = np.conj(chat)  # per-bin K x M operator rows, conjugated
    rhs = np.sum(cconj * ops.fft2(batch)[:, None], axis=0) + config.sigma * ops.fft2(
        state.filt_y - state.filt_u
    )
    d = ops.ifft2(ops.solve_iterated_sherman_morrison(cconj, config.sigma, rhs))
    if not np.all(np.isfinite(d)):
        raise SolverDiverged("non-finite filters in dictionary step", AdmmTrace())
    state.filt_d = d
    target = d + state.filt_u
    proj = np.empty_like(target)
    for m in range(target.shape[0]):
        proj[m], degenerate = ops.project_to_constraint_set(target[m], L)
        if degenerate:
            state.degenerate_projections += 1
            warnings.warn(
                f"filter {m} collapsed to zero support; reset to canonical impulse",
                RuntimeWarning,
                stacklevel=2,
            )
    state.filt_y = proj
    state.filt_u = state.filt_u + d - proj
    return state


def training_objective(batch, bank, coeffs, lmbda):
    """Batch data fit plus l1 weight: the quantity training drives down."""
    batch = as_batch(batch)
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    recon = ops.convolve_sum(bank, coeffs)
    fit = 0.5 * np.sum(np.abs(recon - batch) ** 2)
    return float(fit + lmbda * np.sum(np.abs(coeffs)))


def learn_dictionary(batch, config):
    """Learn an (M, L, L) filter bank from clean training images.

    Parameters
    ----------
    batch : sequence of ndarray or (K, rows, cols) ndarray
        Clean complex training images of identical dimensions.
    config : TrainConfig

    Returns
    -------
    bank : ndarray
        (M, L, L) filters, each exactly supported and unit-norm.
    trace : AdmmTrace
        Per outer iteration: the training objective and the coding block's
        relative primal/dual residuals.
    """
    batch = as_batch(batch)
    rows, cols = batch.shape[-2:]
    L = config.filter_size
    if L > rows or L > cols:
        raise ValueError(
            f"filter size {L} exceeds training image dimensions ({rows}, {cols})"
        )
    state = initial_state(batch, config)
    trace = AdmmTrace()
    for it in range(1, config.outer_iters + 1):
        bank_t = state.filt_y[:, :L, :L]
        yprev = state.coef_y
        try:
            sparse_step(batch, bank_t, state, config)
            dict_step(batch, state.coef_y, state, config)
        except SolverDiverged as exc:
            exc.trace = trace
            raise

        prsdl = _relative(
            np.linalg.norm(state.coef_x - state.coef_y),
            max(np.linalg.norm(state.coef_x), np.linalg.norm(state.coef_y)),
        )
        drsdl = _relative(
            config.rho * np.linalg.norm(state.coef_y - yprev),
            config.rho * np.linalg.norm(state.coef_u),
        )
        obj = training_objective(
            batch, state.filt_y[:, :L, :L], state.coef_y, config.lmbda
        )
        trace.append(it, obj, prsdl, drsdl)
    return state.filt_y[:, :L, :L].copy(), trace
