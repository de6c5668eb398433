"""Raman-control simulation toolkit for ultracold Rb hyperfine states.

Builds STIRAP pulse pairs and pulsed-jump pulse trains, propagates the
time-dependent Schrodinger equation for three- and four-level hyperfine
systems at several exactness tiers, and provides adiabatic-frame
diagnostics plus a deterministic sweep harness.

Internal unit convention: time in ns, angular frequencies in rad/ns,
dipole moments in atomic units.  Frequencies quoted in GHz are multiplied
by 2*pi on ingestion.
"""

__version__ = "0.1.0"

from .atomic import (
    HalfInt,
    HyperfineLevel,
    LevelSystem,
    build_rb87_system,
    hyperfine_dipole,
    wigner_3j,
    wigner_6j,
)
from .pulses import (
    GaussianSubpulse,
    JumpSpec,
    PulseTrain,
    StirapSpec,
    field_at,
    jump_train,
    rabi_envelope_at,
    spectral_synthesize,
    stirap_pair,
)
from .dynamics import (
    Model,
    PropagationResult,
    analytic_jump_propagator,
    build_model,
    final_jump_unitary,
    propagate,
)

__all__ = [
    "HalfInt",
    "HyperfineLevel",
    "LevelSystem",
    "build_rb87_system",
    "hyperfine_dipole",
    "wigner_3j",
    "wigner_6j",
    "GaussianSubpulse",
    "JumpSpec",
    "PulseTrain",
    "StirapSpec",
    "field_at",
    "jump_train",
    "rabi_envelope_at",
    "spectral_synthesize",
    "stirap_pair",
    "Model",
    "PropagationResult",
    "analytic_jump_propagator",
    "build_model",
    "final_jump_unitary",
    "propagate",
]
