"""STIRAP pulse pairs and pulsed-jump pulse trains.

Field amplitudes are defined so that sqrt(1/2pi) * area * bandwidth / mu
times the unit Gaussian envelope integrates (as a Rabi frequency) to the
requested pulse area exactly.  Two carrier-phase conventions are
supported:

* ``centered`` - every subpulse carries cos[w(t - zeta_k)], phase0 = 0.
* ``locked``   - phase0 = w * zeta_k mod 2pi, i.e. cos(w t); all
  rotating-frame subpulse phases vanish, which makes the RWA dynamics
  independent of any global time shift of the train.  Default.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .atomic import LevelSystem

TWO_PI = 2.0 * math.pi

# Pair spacing for jump trains, in units of tau_J.  2.8*pi exceeds the
# 6*sqrt(2) non-overlap bound by ~3.6%.
PAIR_SPACING = 2.8 * math.pi

Channel = Literal["pump", "stokes"]
PhaseMode = Literal["centered", "locked"]


@dataclass(frozen=True)
class GaussianSubpulse:
    strength: float  # field amplitude (a.u.)
    center: float  # zeta (ns)
    width: float  # Gaussian sigma (ns)
    carrier: float  # angular frequency (rad/ns)
    phase0: float  # initial carrier phase (rad)
    channel: Channel

    def __post_init__(self):
        if self.strength < 0.0:
            raise ValueError("subpulse strength must be >= 0")
        if self.width <= 0.0 or self.carrier <= 0.0:
            raise ValueError("subpulse width and carrier must be positive")

    def envelope(self, t):
        t = np.asarray(t, dtype=float)
        return self.strength * np.exp(-((t - self.center) ** 2) / (2.0 * self.width**2))

    def field(self, t):
        t = np.asarray(t, dtype=float)
        return self.envelope(t) * np.cos(self.carrier * (t - self.center) + self.phase0)

    @property
    def rotating_phase(self) -> float:
        """phi_k = w * zeta_k - phase0, the phase seen by the RWA frame."""
        return math.remainder(self.carrier * self.center - self.phase0, TWO_PI)


@dataclass(frozen=True)
class PulseTrain:
    subpulses: tuple[GaussianSubpulse, ...]
    t_start: float
    t_end: float
    protocol_tag: Literal["stirap", "jump"]
    phase_mode: PhaseMode = "locked"

    def __post_init__(self):
        for sp in self.subpulses:
            if sp.center - 4.0 * sp.width < self.t_start - 1e-9 or (
                sp.center + 4.0 * sp.width > self.t_end + 1e-9
            ):
                raise ValueError(
                    f"subpulse at {sp.center} ns: center +/- 4*width leaves "
                    f"the window [{self.t_start}, {self.t_end}]"
                )

    def channel(self, channel: Channel) -> tuple[GaussianSubpulse, ...]:
        return tuple(sp for sp in self.subpulses if sp.channel == channel)

    @property
    def duration(self) -> float:
        return self.t_end - self.t_start


@dataclass(frozen=True)
class JumpSpec:
    """Parameters of an N-pair pulsed-jump train."""

    n_pairs: int
    tau_J: float  # subpulse Gaussian sigma (ns); bandwidth = 1/tau_J
    s0: int = 0
    theta0: float = 0.0
    thetaT: float = math.pi
    area_error: float = 0.0  # delta A (rad), applied to the effective area
    phase_mode: PhaseMode = "locked"

    def __post_init__(self):
        if self.n_pairs < 1:
            raise ValueError("n_pairs must be >= 1")
        if self.s0 < 0:
            raise ValueError("s0 must be a non-negative integer")
        if self.thetaT <= self.theta0:
            raise ValueError("thetaT must exceed theta0")
        if self.tau_J <= 0.0:
            raise ValueError("tau_J must be positive")
        if self.area_error <= -2.0 * (2 * self.s0 + 1) * math.pi:
            raise ValueError("area_error drives the effective area non-positive")

    @property
    def effective_area(self) -> float:
        return 2.0 * (2 * self.s0 + 1) * math.pi + self.area_error

    @property
    def bandwidth(self) -> float:
        return 1.0 / self.tau_J

    def theta_k(self, k: int) -> float:
        """Mixing-angle grid point for pair k (1-based), equally spaced."""
        return (self.thetaT - self.theta0) * (2 * k - 1) / (2 * self.n_pairs) + self.theta0

    def zeta_k(self, k: int) -> float:
        return PAIR_SPACING * (k - 0.5) * self.tau_J

    @property
    def t_total(self) -> float:
        return PAIR_SPACING * self.n_pairs * self.tau_J


@dataclass(frozen=True)
class StirapSpec:
    """Counterintuitive Gaussian pump/Stokes pair."""

    bandwidth: float  # Delta omega (rad/ns)
    area_p: float = 6.0 * math.sqrt(2.0) * math.pi
    area_s: float = 6.0 * math.sqrt(2.0) * math.pi
    t_s: float = 0.0
    t_p: float | None = None  # defaults to t_s + 1.76 * tau_S

    def __post_init__(self):
        if self.area_p < 0.0 or self.area_s < 0.0:
            raise ValueError("pulse areas must be >= 0")
        if self.bandwidth <= 0.0:
            raise ValueError("bandwidth must be positive")
        if self.t_p is None:
            object.__setattr__(self, "t_p", self.t_s + 1.76 * self.tau_S)
        if self.t_p <= self.t_s:
            raise ValueError("t_p must exceed t_s (counterintuitive ordering)")

    @property
    def tau_S(self) -> float:
        return 1.0 / self.bandwidth


def _strength(area: float, bandwidth: float, mu: float) -> float:
    if mu == 0.0:
        raise ValueError("zero dipole moment on the driven transition")
    return math.sqrt(1.0 / TWO_PI) * area * bandwidth / abs(mu)


def _phase0(mode: PhaseMode, carrier: float, center: float) -> float:
    if mode == "locked":
        return (carrier * center) % TWO_PI
    return 0.0


def stirap_pair(spec: StirapSpec, system: LevelSystem) -> PulseTrain:
    """Stokes-before-pump Gaussian pair on the resonant Lambda carriers."""
    tau = spec.tau_S
    omega_p = system.omega_pump
    omega_s = system.omega_stokes
    subpulses = (
        GaussianSubpulse(
            _strength(spec.area_p, spec.bandwidth, system.mu_11p),
            spec.t_p, tau, omega_p, _phase0("locked", omega_p, spec.t_p), "pump",
        ),
        GaussianSubpulse(
            _strength(spec.area_s, spec.bandwidth, system.mu_21p),
            spec.t_s, tau, omega_s, _phase0("locked", omega_s, spec.t_s), "stokes",
        ),
    )
    t_start = spec.t_s - 4.0 * tau
    t_end = max(spec.t_s + 6.0 * tau, spec.t_p + 4.0 * tau)
    return PulseTrain(subpulses, t_start, t_end, "stirap", "locked")


def jump_train(spec: JumpSpec, system: LevelSystem) -> PulseTrain:
    """N-pair jump train meeting the effective-area and spacing conditions."""
    omega_p = system.omega_pump
    omega_s = system.omega_stokes
    a0 = spec.effective_area
    subpulses = []
    for k in range(1, spec.n_pairs + 1):
        theta = spec.theta_k(k)
        zeta = spec.zeta_k(k)
        area_p = a0 * math.sin(theta / 2.0)
        area_s = a0 * math.cos(theta / 2.0)
        subpulses.append(GaussianSubpulse(
            _strength(area_p, spec.bandwidth, system.mu_11p),
            zeta, spec.tau_J, omega_p,
            _phase0(spec.phase_mode, omega_p, zeta), "pump",
        ))
        subpulses.append(GaussianSubpulse(
            _strength(area_s, spec.bandwidth, system.mu_21p),
            zeta, spec.tau_J, omega_s,
            _phase0(spec.phase_mode, omega_s, zeta), "stokes",
        ))
    return PulseTrain(tuple(subpulses), 0.0, spec.t_total, "jump", spec.phase_mode)


def shift_stokes_carrier(train: PulseTrain, delta: float) -> PulseTrain:
    """Shift every Stokes carrier by ``delta`` (rad/ns), re-locking phases.

    Realizes a two-photon detuning Delta_2 = delta while the pump stays on
    omega_1'1, so Delta_1 = delta2 is unchanged.
    """
    if delta == 0.0:
        return train
    shifted = []
    for sp in train.subpulses:
        if sp.channel == "stokes":
            carrier = sp.carrier + delta
            sp = GaussianSubpulse(
                sp.strength, sp.center, sp.width, carrier,
                _phase0(train.phase_mode, carrier, sp.center), sp.channel,
            )
        shifted.append(sp)
    return PulseTrain(tuple(shifted), train.t_start, train.t_end,
                      train.protocol_tag, train.phase_mode)


def field_at(train: PulseTrain, t) -> tuple[np.ndarray, np.ndarray]:
    """Real pump and Stokes fields (with carriers) at time(s) t."""
    t = np.asarray(t, dtype=float)
    out = {"pump": np.zeros_like(t), "stokes": np.zeros_like(t)}
    for sp in train.subpulses:
        out[sp.channel] = out[sp.channel] + sp.field(t)
    return out["pump"], out["stokes"]


def rabi_envelope_at(train: PulseTrain, system: LevelSystem, t
                     ) -> tuple[np.ndarray, np.ndarray]:
    """Envelope Rabi frequencies (Omega_p, Omega_s) in rad/ns, no carriers.

    Uses the magnitudes of the designated dipoles mu_11' and mu_21'.
    """
    t = np.asarray(t, dtype=float)
    omega_p = np.zeros_like(t)
    omega_s = np.zeros_like(t)
    for sp in train.subpulses:
        if sp.channel == "pump":
            omega_p = omega_p + abs(system.mu_11p) * sp.envelope(t)
        else:
            omega_s = omega_s + abs(system.mu_21p) * sp.envelope(t)
    return omega_p, omega_s


def spectral_synthesize(spec: JumpSpec, system: LevelSystem, n_samples: int
                        ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Jump-train fields from the spectral-domain phase-locked construction.

    Builds E_p(w), E_s(w) as Gaussians at the carriers with linear
    spectral phase -(w - w_carrier) * zeta_k per pair and inverse-Fourier
    transforms to the time domain.  Returns (times, E_pump, E_stokes).
    """
    if n_samples < 2**14 or n_samples & (n_samples - 1):
        raise ValueError("n_samples must be a power of two >= 2**14")
    t_total = spec.t_total
    dt = t_total / n_samples
    rate = TWO_PI / dt
    max_carrier = max(system.omega_pump, system.omega_stokes)
    if rate < 4.0 * max_carrier:
        raise ValueError(
            f"sampling rate {rate:.3g} rad/ns is below 4x the carrier "
            f"{max_carrier:.3g} rad/ns; increase n_samples"
        )

    times = np.arange(n_samples) * dt
    domega = TWO_PI / t_total
    omegas = np.arange(n_samples) * domega  # one-sided spectrum grid
    a0 = spec.effective_area

    fields = {}
    for channel, omega_c, mu in (
        ("pump", system.omega_pump, system.mu_11p),
        ("stokes", system.omega_stokes, system.mu_21p),
    ):
        spectrum = np.zeros(n_samples, dtype=complex)
        for k in range(1, spec.n_pairs + 1):
            theta = spec.theta_k(k)
            area = a0 * (math.sin if channel == "pump" else math.cos)(theta / 2.0)
            amp = area / (TWO_PI * abs(mu))
            gauss = amp * np.exp(-((omegas - omega_c) ** 2) / (2.0 * spec.bandwidth**2))
            spectrum += gauss * np.exp(-1j * (omegas - omega_c) * spec.zeta_k(k))
        # E(t) = Re[int E(w) e^{iwt} dw] on the discrete grid
        fields[channel] = np.real(np.fft.ifft(spectrum) * n_samples * domega)

    return times, fields["pump"], fields["stokes"]


def pair_bounds(spec: JumpSpec) -> list[tuple[float, float]]:
    """(t_{k-1}, t_k) interval per pair, k = 1..N."""
    tau = PAIR_SPACING * spec.tau_J
    return [((k - 1) * tau, k * tau) for k in range(1, spec.n_pairs + 1)]
