"""Adiabatic-frame diagnostics: eigensystems, mixing angles, dynamical
phases, accumulation functions, geometric couplings, and the adiabatic
dark-state population.

The mixing angle is theta = 2*atan2(Omega_p, Omega_s) from the envelope
Rabi frequencies; where both envelopes vanish (below 1e-12 rad/ns) the
angle is carried over from the previous sample and flagged, since theta
is undefined at zero field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_simpson

from .dynamics import Model
from .pulses import rabi_envelope_at

ZERO_FIELD_RABI = 1e-12
DEGENERACY_GAP = 1e-10
THETA_FD_STEP = 1e-4


@dataclass(frozen=True)
class AdiabaticFrame:
    """Instantaneous eigensystem at one time, branches sorted (-, 0, +)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns, gauge-fixed
    theta: float
    xi: float | None = None
    theta_carried: bool = False


@dataclass(frozen=True)
class DiagnosticsTrace:
    times: np.ndarray
    eigenvalues: np.ndarray  # (n, d)
    theta: np.ndarray
    alpha: np.ndarray  # (n, d) dynamical phases per branch
    epsilon: np.ndarray  # (n, 2) -> eps_0-, eps_0+
    p0_ad: np.ndarray | None = None


def _gauge_fix(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude component is real-positive."""
    fixed = vectors.copy()
    for col in range(fixed.shape[1]):
        idx = int(np.argmax(np.abs(fixed[:, col])))
        pivot = fixed[idx, col]
        if abs(pivot) > 0.0:
            fixed[:, col] *= np.conj(pivot) / abs(pivot)
    return fixed


def _mixing_angles(model: Model, t: float) -> tuple[float, float | None, bool]:
    system, train = model.system, model.train
    if model.tier == "detuned3":
        # The second Lambda runs on the primed dipoles.
        scale_p = abs(system.mu_12p) / abs(system.mu_11p)
        scale_s = abs(system.mu_22p) / abs(system.mu_21p)
    else:
        scale_p = scale_s = 1.0
    op, os_ = rabi_envelope_at(train, system, t)
    op, os_ = float(op) * scale_p, float(os_) * scale_s
    degenerate = op < ZERO_FIELD_RABI and os_ < ZERO_FIELD_RABI
    theta = math.nan if degenerate else 2.0 * math.atan2(op, os_)
    xi = None
    if model.tier == "detuned3":
        omega0 = math.hypot(op, os_)
        xi = 0.5 * math.atan2(omega0, system.delta2)
    return theta, xi, degenerate


def instantaneous_frame(model: Model, t: float,
                        prev_theta: float | None = None) -> AdiabaticFrame:
    """Eigensystem of H(t) with the largest-component-real-positive gauge."""
    if model.tier not in ("rwa3", "rwa4", "detuned3"):
        raise ValueError(f"no adiabatic frame defined for tier {model.tier!r}")
    H = model.hamiltonian(float(t))
    w, V = np.linalg.eigh(H)
    V = _gauge_fix(V)
    theta, xi, degenerate = _mixing_angles(model, t)
    carried = False
    if degenerate:
        if prev_theta is None:
            raise ValueError(
                "both Rabi envelopes vanish and no previous theta to carry over"
            )
        theta, carried = prev_theta, True
    return AdiabaticFrame(w, V, theta, xi, carried)


def theta_trace(model: Model, grid: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Mixing angle over a grid with zero-field carry-over.

    Returns (theta, carried_flags).  Leading degenerate samples take the
    first defined value.
    """
    thetas = np.empty(len(grid))
    carried = np.zeros(len(grid), dtype=bool)
    prev = None
    for i, t in enumerate(grid):
        theta, _, degenerate = _mixing_angles(model, float(t))
        if degenerate:
            carried[i] = True
            thetas[i] = math.nan if prev is None else prev
        else:
            thetas[i] = prev = theta
    if np.isnan(thetas[0]):
        first = np.flatnonzero(~np.isnan(thetas))
        if first.size == 0:
            raise ValueError("zero field everywhere: mixing angle undefined")
        thetas[: first[0]] = thetas[first[0]]
    return thetas, carried


def _branch_energies(model: Model, grid: np.ndarray) -> np.ndarray:
    H = model.hamiltonian(np.asarray(grid, dtype=float))
    return np.linalg.eigvalsh(H)


def dynamical_phases(model: Model, grid: np.ndarray) -> np.ndarray:
    """alpha_f(t) = -int_{t0}^t E_f dt' per branch, alpha_f(t0) = 0."""
    grid = np.asarray(grid, dtype=float)
    energies = _branch_energies(model, grid)
    alpha = -cumulative_simpson(energies, x=grid, axis=0, initial=0.0)
    return alpha


def accumulation_functions(model: Model, grid: np.ndarray,
                           lam_bar: float | None = None) -> np.ndarray:
    """Dynamic accumulation eps_0-(t), eps_0+(t) on the grid.

    eps_0f(t) = | int_{t0}^t exp(i (alpha_f - alpha_0)) lam dt' | with the
    uniform traversal rate lam = (theta_end - theta_start) / duration by
    default (the piecewise-constant theta of the jump protocol makes the
    literal theta-dot a delta train, which would degenerate the integral).
    """
    grid = np.asarray(grid, dtype=float)
    alpha = dynamical_phases(model, grid)
    if lam_bar is None:
        thetas, _ = theta_trace(model, grid)
        duration = grid[-1] - grid[0]
        lam_bar = (thetas[-1] - thetas[0]) / duration if duration > 0 else 0.0
        if lam_bar == 0.0:
            lam_bar = 1.0 / duration if duration > 0 else 1.0
    mid = alpha.shape[1] // 2  # E_0 is the middle branch for the Lambda tiers
    eps = np.empty((len(grid), 2))
    for out_col, branch in enumerate((0, alpha.shape[1] - 1)):
        integrand = np.exp(1j * (alpha[:, branch] - alpha[:, mid])) * lam_bar
        acc_re = cumulative_simpson(integrand.real, x=grid, initial=0.0)
        acc_im = cumulative_simpson(integrand.imag, x=grid, initial=0.0)
        eps[:, out_col] = np.abs(acc_re + 1j * acc_im)
    return eps


def geometric_couplings(model: Model, theta_samples: np.ndarray
                        ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """g_{f,h}(theta) and gamma_f(theta) for the resonant Lambda frame.

    Central finite differences (step 1e-4 rad) on gauge-fixed eigenvectors
    of the unit-Rabi Hamiltonian parameterized by theta.  Returns
    (g, gamma, valid) where g has shape (n, 3, 3), gamma (n, 3), and
    ``valid`` flags samples away from eigenvalue near-degeneracies.
    """
    if model.tier != "rwa3":
        raise ValueError("geometric couplings require the rwa3 parameterization")
    theta_samples = np.asarray(theta_samples, dtype=float)

    def eigvecs(theta: float) -> tuple[np.ndarray, np.ndarray]:
        H = np.zeros((3, 3), dtype=complex)
        H[0, 2] = H[2, 0] = -0.5 * math.sin(theta / 2.0)
        H[1, 2] = H[2, 1] = -0.5 * math.cos(theta / 2.0)
        w, V = np.linalg.eigh(H)
        return w, _gauge_fix(V)

    def align(ref: np.ndarray, V: np.ndarray) -> np.ndarray:
        # Rotate each column so its overlap with the reference column is
        # real and positive; a per-sample largest-component convention can
        # flip sign across the finite-difference step.
        overlap = np.einsum("df,df->f", ref.conj(), V)
        return V * (overlap.conj() / np.abs(overlap))

    n = len(theta_samples)
    g = np.zeros((n, 3, 3), dtype=complex)
    valid = np.ones(n, dtype=bool)
    for i, theta in enumerate(theta_samples):
        w, v0 = eigvecs(theta)
        if np.min(np.diff(w)) < DEGENERACY_GAP:
            valid[i] = False
            continue
        _, v_plus = eigvecs(theta + THETA_FD_STEP)
        _, v_minus = eigvecs(theta - THETA_FD_STEP)
        dv = (align(v0, v_plus) - align(v0, v_minus)) / (2.0 * THETA_FD_STEP)
        g[i] = 1j * (v0.conj().T @ dv)

    gamma = np.zeros((n, 3))
    if n > 1:
        diag = np.real(np.einsum("nff->nf", g))
        diag[~valid] = 0.0
        gamma = cumulative_simpson(diag, x=theta_samples, axis=0, initial=0.0)
    return g, gamma, valid


def adiabatic_population(model: Model, propagation) -> np.ndarray:
    """p0_ad(t) = |<psi_0(theta(t)) | Psi(t)>|^2 along a propagation.

    Uses the analytic dark state cos(theta/2)|1> - sin(theta/2)|2> of the
    locked-phase resonant Lambda, which stays defined at zero field via
    the carried mixing angle.
    """
    if model.tier != "rwa3":
        raise ValueError("adiabatic dark-state population requires tier rwa3")
    if model.train.phase_mode != "locked":
        raise ValueError("dark-state overlap assumes the locked phase mode")
    thetas, _ = theta_trace(model, propagation.times)
    dark = np.zeros((len(thetas), 3), dtype=complex)
    dark[:, 0] = np.cos(thetas / 2.0)
    dark[:, 1] = -np.sin(thetas / 2.0)
    overlap = np.einsum("nd,nd->n", dark.conj(), propagation.states)
    return np.abs(overlap) ** 2


def diagnostics_trace(model: Model, grid: np.ndarray,
                      propagation=None) -> DiagnosticsTrace:
    """Bundle eigenvalues, theta, alpha, epsilon (and p0_ad if given)."""
    grid = np.asarray(grid, dtype=float)
    energies = _branch_energies(model, grid)
    thetas, _ = theta_trace(model, grid)
    alpha = dynamical_phases(model, grid)
    eps = accumulation_functions(model, grid)
    p0 = None
    if propagation is not None:
        p0 = adiabatic_population(model, propagation)
    return DiagnosticsTrace(grid, energies, thetas, alpha, eps, p0)
