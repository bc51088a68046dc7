"""Gaussian-state engine: symplectic unitaries, loss channels, photon statistics.

Quadrature convention: X = (a + a*)/2 and Y = (a - a*)/(2i), so the vacuum
variance is 1/4, a coherent amplitude alpha displaces the mean to
(Re alpha, Im alpha), and the photon number observable per mode is
X^2 + Y^2 - 1/2. Consequently a coherent state carries |alpha|^2 photons and
squeezed vacuum of gain g carries sinh(g)^2.

States are immutable values ordered (x1, y1, ..., xM, yM); every operation
returns a new state, so states may be shared freely between threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalFailure
from .tolerances import SYMMETRY_ATOL

VACUUM_VARIANCE = 0.25


@dataclass(frozen=True, eq=False)
class GaussianState:
    """Mean quadrature vector and covariance matrix over M optical modes."""

    num_modes: int
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        if not isinstance(self.num_modes, (int, np.integer)) or self.num_modes < 1:
            raise ValueError("num_modes must be a positive integer")
        mean = np.array(self.mean, dtype=float)
        cov = np.array(self.cov, dtype=float)
        n = 2 * self.num_modes
        if mean.shape != (n,):
            raise ValueError(f"mean must have shape ({n},), got {mean.shape}")
        if cov.shape != (n, n):
            raise ValueError(f"cov must have shape ({n}, {n}), got {cov.shape}")
        object.__setattr__(self, "num_modes", int(self.num_modes))
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)


@dataclass(frozen=True)
class MomentReport:
    """Photon-number mean and variance over a set of modes."""

    mean_n: float
    var_n: float
    modes: tuple[int, ...]


def vacuum_state(num_modes: int) -> GaussianState:
    """All modes in the vacuum: zero mean, covariance Identity/4."""
    if not isinstance(num_modes, (int, np.integer)) or num_modes < 1:
        raise ValueError("num_modes must be a positive integer")
    n = 2 * int(num_modes)
    return GaussianState(int(num_modes), np.zeros(n), np.eye(n) * VACUUM_VARIANCE)


def _check_mode(state: GaussianState, mode: int) -> int:
    if not isinstance(mode, (int, np.integer)) or not 0 <= mode < state.num_modes:
        raise ValueError(f"mode {mode} out of range for a {state.num_modes}-mode state")
    return int(mode)


def _apply_symplectic(state: GaussianState, s_mat: np.ndarray) -> GaussianState:
    mean = s_mat @ state.mean
    cov = s_mat @ state.cov @ s_mat.T
    # congruence in floating point picks up ulp-level asymmetry; remove it
    cov = 0.5 * (cov + cov.T)
    return GaussianState(state.num_modes, mean, cov)


def _embed_block(num_modes: int, modes: list[int], block: np.ndarray) -> np.ndarray:
    """Expand a 2Kx2K map on the given modes into the full 2Mx2M matrix."""
    s = np.eye(2 * num_modes)
    idx = np.concatenate([(2 * m, 2 * m + 1) for m in modes])
    s[np.ix_(idx, idx)] = block
    return s


def displace(state: GaussianState, mode: int, alpha_re: float, alpha_im: float) -> GaussianState:
    """Shift the mode's mean by a coherent amplitude; covariance is untouched."""
    mode = _check_mode(state, mode)
    mean = state.mean.copy()
    mean[2 * mode] += alpha_re
    mean[2 * mode + 1] += alpha_im
    return GaussianState(state.num_modes, mean, state.cov.copy())


def apply_phase(state: GaussianState, mode: int, theta: float) -> GaussianState:
    """Rotate one mode's quadratures by theta."""
    mode = _check_mode(state, mode)
    c, s = math.cos(theta), math.sin(theta)
    block = np.array([[c, -s], [s, c]])
    return _apply_symplectic(state, _embed_block(state.num_modes, [mode], block))


def apply_beamsplitter(state: GaussianState, mode_a: int, mode_b: int) -> GaussianState:
    """Balanced beamsplitter: mode_a carries (A+B)/sqrt2, mode_b carries (B-A)/sqrt2."""
    mode_a = _check_mode(state, mode_a)
    mode_b = _check_mode(state, mode_b)
    if mode_a == mode_b:
        raise ValueError("beamsplitter needs two distinct modes")
    r = 1.0 / math.sqrt(2.0)
    eye = np.eye(2)
    block = np.block([[r * eye, r * eye], [-r * eye, r * eye]])
    return _apply_symplectic(state, _embed_block(state.num_modes, [mode_a, mode_b], block))


def apply_single_mode_squeezer(
    state: GaussianState, mode: int, g: float, pump_phase: float = 0.0
) -> GaussianState:
    """Phase-sensitive amplifier on one mode.

    pump_phase 0 stretches the x quadrature by e^g and squeezes y by e^-g;
    a general pump phase rotates the stretched axis to pump_phase/2.
    """
    mode = _check_mode(state, mode)
    if not math.isfinite(g) or g < 0:
        raise ValueError(f"squeezing gain must be finite and >= 0, got {g}")
    ch, sh = math.cosh(g), math.sinh(g)
    c, s = math.cos(pump_phase), math.sin(pump_phase)
    block = np.array([[ch + sh * c, sh * s], [sh * s, ch - sh * c]])
    return _apply_symplectic(state, _embed_block(state.num_modes, [mode], block))


def apply_two_mode_squeezer(
    state: GaussianState, mode_a: int, mode_b: int, g: float, pump_phase: float = 0.0
) -> GaussianState:
    """Nondegenerate amplifier coupling two modes; vacuum in gives sinh(g)^2 photons per mode."""
    mode_a = _check_mode(state, mode_a)
    mode_b = _check_mode(state, mode_b)
    if mode_a == mode_b:
        raise ValueError("two-mode squeezer needs two distinct modes")
    if not math.isfinite(g) or g < 0:
        raise ValueError(f"squeezing gain must be finite and >= 0, got {g}")
    ch, sh = math.cosh(g), math.sinh(g)
    c, s = math.cos(pump_phase), math.sin(pump_phase)
    eye = np.eye(2)
    m = np.array([[c, s], [s, -c]])
    block = np.block([[ch * eye, sh * m], [sh * m, ch * eye]])
    return _apply_symplectic(state, _embed_block(state.num_modes, [mode_a, mode_b], block))


def apply_loss(state: GaussianState, mode: int, eta: float) -> GaussianState:
    """Mix one mode with vacuum through a beamsplitter of power transmission eta."""
    mode = _check_mode(state, mode)
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"transmission eta must lie in [0, 1], got {eta}")
    root = math.sqrt(eta)
    n = 2 * state.num_modes
    t = np.eye(n)
    t[2 * mode, 2 * mode] = root
    t[2 * mode + 1, 2 * mode + 1] = root
    mean = t @ state.mean
    cov = t @ state.cov @ t.T
    cov[2 * mode, 2 * mode] += (1.0 - eta) * VACUUM_VARIANCE
    cov[2 * mode + 1, 2 * mode + 1] += (1.0 - eta) * VACUUM_VARIANCE
    cov = 0.5 * (cov + cov.T)
    return GaussianState(state.num_modes, mean, cov)


def _mode_indices(state: GaussianState, modes) -> tuple[tuple[int, ...], np.ndarray]:
    sel = sorted({_check_mode(state, m) for m in modes})
    if not sel:
        raise ValueError("mode set must not be empty")
    idx = np.concatenate([(2 * m, 2 * m + 1) for m in sel])
    return tuple(sel), idx


def photon_moments(state: GaussianState, modes) -> MomentReport:
    """Mean and variance of the total photon number over the selected modes.

    With sigma the covariance submatrix, m the mean subvector and K the number
    of selected modes: mean = tr(sigma) + m.m - K/2 and
    var = 2 tr(sigma^2) + 4 m.sigma.m - K/4, exact for Gaussian states in the
    vacuum-variance-1/4 convention (verified against the brute-force track).
    """
    sel, idx = _mode_indices(state, modes)
    k = len(sel)
    m = state.mean[idx]
    sigma = state.cov[np.ix_(idx, idx)]
    mean_n = float(np.trace(sigma) + m @ m - 0.5 * k)
    var_n = float(2.0 * np.trace(sigma @ sigma) + 4.0 * (m @ sigma @ m) - 0.25 * k)
    if not (math.isfinite(mean_n) and math.isfinite(var_n)):
        raise NumericalFailure("photon moments are non-finite")
    if var_n < -1e-9:
        raise NumericalFailure(f"photon-number variance {var_n} is negative")
    return MomentReport(mean_n=mean_n, var_n=max(var_n, 0.0), modes=sel)


def _symplectic_form(num_modes: int) -> np.ndarray:
    j = np.array([[0.0, 1.0], [-1.0, 0.0]])
    return np.kron(np.eye(num_modes), j)


def symplectic_eigenvalues(state: GaussianState) -> np.ndarray:
    """The M symplectic invariants of the covariance, ascending.

    Physical states satisfy nu >= 1/4 (up to numerical slack); pure states sit
    exactly at 1/4.
    """
    cov = state.cov
    asym = float(np.max(np.abs(cov - cov.T)))
    if asym > SYMMETRY_ATOL:
        raise NumericalFailure(f"covariance asymmetry {asym:.3e} exceeds {SYMMETRY_ATOL:.0e}")
    omega = _symplectic_form(state.num_modes)
    ev = np.linalg.eigvals(1j * (omega @ cov))
    v = np.sort(np.abs(ev))
    # eigenvalues come in +/- pairs; average each pair to suppress round-off
    return 0.5 * (v[0::2] + v[1::2])


def reduce_state(state: GaussianState, modes) -> GaussianState:
    """Restrict the state to a subset of modes (partial trace over the rest)."""
    sel, idx = _mode_indices(state, modes)
    return GaussianState(len(sel), state.mean[idx], state.cov[np.ix_(idx, idx)])
