"""Three-block ADMM over the cropped filter ``h``, its spectrum ``g_hat`` and the label ``r``.

Internally every spectrum is a *raw* DFT (``numpy.fft.fft2`` with no
normalisation, i.e. ``sqrt(T)`` times :func:`mscf.spectral.dft2`).  In that
scaling the filter constraint reads ``g_hat = fft2(P^T h)`` and the data term
``(1 / 2T) * ||r_hat - X_hat g_hat||^2`` equals the spatial squared error.
The per-pixel response model is ``x_hat(n)^H g_hat(n)``, i.e.
``sum_d conj(x_hat_d) * g_hat_d``.

:func:`train` is the public entry point: it accepts and returns unitary
spectra and converts at the boundary.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import MscfConfig, crop_mask_apply


@dataclass(frozen=True)
class AdmmState:
    g_hat: np.ndarray
    h: np.ndarray
    zeta_hat: np.ndarray
    r_hat: np.ndarray
    mu: float
    iter: int = 0


@dataclass(frozen=True)
class TrainInputs:
    """Unitary spectra of one training sample plus its label targets."""

    x_hat: np.ndarray
    omega_hat: np.ndarray
    r_prev_hat: np.ndarray
    psi: float
    cfg: MscfConfig
    target_cells: tuple[int, int]
    g_init_hat: np.ndarray | None = None

    def __post_init__(self):
        grid = self.x_hat.shape[:2]
        if self.omega_hat.shape != grid or self.r_prev_hat.shape != grid:
            raise ValueError("label spectra must share the feature grid shape")
        if not 0 <= self.psi <= 1:
            raise ValueError(f"psi must lie in [0, 1], got {self.psi}")


def model_spectrum(x_hat: np.ndarray, g_hat: np.ndarray) -> np.ndarray:
    """Per-pixel ``x_hat(n)^H g_hat(n)``."""
    return np.sum(np.conj(x_hat) * g_hat, axis=2)


def filter_spectrum(h: np.ndarray) -> np.ndarray:
    """``sqrt(T) (I_D kron F P^T) h`` for an already-cropped ``h``."""
    return np.fft.fft2(h, axes=(0, 1))


def solve_h(
    g_hat: np.ndarray,
    zeta_hat: np.ndarray,
    mu: float,
    lambda1: float,
    T: int,
    target_cells: tuple[int, int],
) -> np.ndarray:
    g = np.fft.ifft2(g_hat, axes=(0, 1)).real
    zeta = np.fft.ifft2(zeta_hat, axes=(0, 1)).real
    h = (mu * g + zeta) / (lambda1 / T + mu)
    return crop_mask_apply(h, *target_cells)


def solve_g(
    x_hat: np.ndarray,
    r_hat: np.ndarray,
    h: np.ndarray,
    zeta_hat: np.ndarray,
    mu: float,
    T: int,
) -> np.ndarray:
    """Per-pixel closed form via the Sherman-Morrison rank-one inverse."""
    h_hat = filter_spectrum(h)
    muT = mu * T
    r = r_hat[..., None]
    s_x = np.sum(np.conj(x_hat) * x_hat, axis=2, keepdims=True).real
    s_zeta = np.sum(np.conj(x_hat) * zeta_hat, axis=2, keepdims=True)
    s_h = np.sum(np.conj(x_hat) * h_hat, axis=2, keepdims=True)
    b = s_x + muT
    rho = x_hat * r + muT * h_hat - T * zeta_hat
    return rho / muT - x_hat / (muT * b) * (r * s_x - T * s_zeta + muT * s_h)


def solve_r(
    x_hat: np.ndarray,
    g_hat: np.ndarray,
    omega_hat: np.ndarray,
    r_prev_hat: np.ndarray,
    psi: float,
    lambda2: float,
    phi: float,
) -> np.ndarray:
    w_omega = lambda2 * (1 + psi ** 2)
    w_prev = phi * (1 - psi ** 2)
    numer = model_spectrum(x_hat, g_hat) + w_omega * omega_hat + w_prev * r_prev_hat
    return numer / (1 + w_omega + w_prev)


def update_multiplier(
    state: AdmmState, g_new: np.ndarray, h_new: np.ndarray, beta: float, mu_max: float
) -> AdmmState:
    mu_next = min(mu_max, beta * state.mu)
    zeta = state.zeta_hat + mu_next * (g_new - filter_spectrum(h_new))
    return dataclasses.replace(
        state, g_hat=g_new, h=h_new, zeta_hat=zeta, mu=mu_next, iter=state.iter + 1
    )


def augmented_lagrangian(
    state: AdmmState,
    x_hat: np.ndarray,
    omega_hat: np.ndarray,
    r_prev_hat: np.ndarray,
    psi: float,
    cfg: MscfConfig,
) -> float:
    """Objective value with the penalty term at ``state.mu`` (raw spectra)."""
    T = x_hat.shape[0] * x_hat.shape[1]
    w_omega = cfg.lambda2 * (1 + psi ** 2)
    w_prev = cfg.phi * (1 - psi ** 2)
    r = state.r_hat
    value = np.sum(np.abs(r - model_spectrum(x_hat, state.g_hat)) ** 2) / (2 * T)
    value += cfg.lambda1 / 2 * np.sum(state.h ** 2)
    value += w_omega / (2 * T) * np.sum(np.abs(omega_hat - r) ** 2)
    value += w_prev / (2 * T) * np.sum(np.abs(r - r_prev_hat) ** 2)
    gap = state.g_hat - filter_spectrum(state.h) + state.zeta_hat / state.mu
    value += state.mu / 2 * np.sum(np.abs(gap) ** 2)
    return float(value)


@dataclass(frozen=True)
class RawProblem:
    """Training inputs rescaled to raw DFT spectra."""

    x_hat: np.ndarray
    omega_hat: np.ndarray
    r_prev_hat: np.ndarray
    psi: float
    cfg: MscfConfig
    target_cells: tuple[int, int]

    @property
    def T(self) -> int:
        return self.x_hat.shape[0] * self.x_hat.shape[1]

    def lagrangian(self, state: AdmmState) -> float:
        return augmented_lagrangian(
            state, self.x_hat, self.omega_hat, self.r_prev_hat, self.psi, self.cfg
        )


def to_raw(inputs: TrainInputs) -> tuple[RawProblem, AdmmState]:
    rows, cols, _ = inputs.x_hat.shape
    scale = np.sqrt(rows * cols)
    problem = RawProblem(
        inputs.x_hat * scale,
        inputs.omega_hat * scale,
        inputs.r_prev_hat * scale,
        float(inputs.psi),
        inputs.cfg,
        tuple(inputs.target_cells),
    )
    if inputs.g_init_hat is None:
        g0 = np.zeros_like(problem.x_hat)
    else:
        g0 = inputs.g_init_hat * scale
    h0 = crop_mask_apply(np.fft.ifft2(g0, axes=(0, 1)).real, *problem.target_cells)
    state = AdmmState(
        g_hat=g0,
        h=h0,
        zeta_hat=np.zeros_like(problem.x_hat),
        r_hat=problem.r_prev_hat.copy(),
        mu=inputs.cfg.mu0,
    )
    return problem, state


def admm_step(problem: RawProblem, state: AdmmState) -> AdmmState:
    cfg = problem.cfg
    T = problem.T
    h = solve_h(state.g_hat, state.zeta_hat, state.mu, cfg.lambda1, T, problem.target_cells)
    g = solve_g(problem.x_hat, state.r_hat, h, state.zeta_hat, state.mu, T)
    r = solve_r(problem.x_hat, g, problem.omega_hat, problem.r_prev_hat,
                problem.psi, cfg.lambda2, cfg.phi)
    state = dataclasses.replace(state, r_hat=r)
    return update_multiplier(state, g, h, cfg.beta, cfg.mu_max)


def run_admm(
    inputs: TrainInputs,
    iters: int | None = None,
    callback: Callable[[RawProblem, AdmmState], None] | None = None,
) -> tuple[RawProblem, AdmmState]:
    problem, state = to_raw(inputs)
    if callback is not None:
        callback(problem, state)
    for _ in range(inputs.cfg.admm_iters if iters is None else iters):
        state = admm_step(problem, state)
        if callback is not None:
            callback(problem, state)
    return problem, state


def train(inputs: TrainInputs) -> tuple[np.ndarray, np.ndarray]:
    """Run the configured ADMM rounds; returns unitary ``(g_hat, r_hat)``."""
    problem, state = run_admm(inputs)
    scale = np.sqrt(problem.T)
    return state.g_hat / scale, state.r_hat / scale
