"""Angular-momentum algebra and the Rb-87 four-level hyperfine system.

Wigner 3j/6j symbols are evaluated with the Racah closed-form summations
using a precomputed floating-point factorial table, which keeps the
relative error below ~1e-12 for j <= 10.  Half-integer quantum numbers
are stored as doubled integers so they stay exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi

# Rb-87 5S1/2 -> 5P1/2 line constants (frequencies in GHz, dipole in a.u.)
DELTA1_GHZ = 6.8347
DELTA2_GHZ = 0.8145
MU_J_AU = 2.9931

# Surrogate optical carrier offset (rad/ns).  Only ratios against delta1
# matter to the rotating-frame physics; the lab-frame tier needs *some*
# explicit carrier and this one keeps it tractable.
E_OPT_DEFAULT = TWO_PI * 2.0e5

_FACT = [float(math.factorial(n)) for n in range(101)]


class HalfInt:
    """Half-integer angular momentum value stored as 2x the value."""

    __slots__ = ("twice",)

    def __init__(self, twice: int):
        self.twice = int(twice)

    @classmethod
    def of(cls, value) -> "HalfInt":
        """Coerce an int, an exact multiple of 1/2, or a HalfInt."""
        if isinstance(value, HalfInt):
            return value
        doubled = 2 * value
        if isinstance(doubled, float):
            if doubled != round(doubled):
                raise ValueError(f"{value!r} is not a half-integer")
            doubled = round(doubled)
        return cls(doubled)

    @property
    def value(self) -> float:
        return self.twice / 2.0

    def __float__(self) -> float:
        return self.value

    def __eq__(self, other) -> bool:
        return isinstance(other, HalfInt) and self.twice == other.twice

    def __hash__(self) -> int:
        return hash(("HalfInt", self.twice))

    def __neg__(self) -> "HalfInt":
        return HalfInt(-self.twice)

    def __repr__(self) -> str:
        if self.twice % 2 == 0:
            return f"HalfInt({self.twice // 2})"
        return f"HalfInt({self.twice}/2)"


def _twice(value) -> int:
    return HalfInt.of(value).twice


def _triangle_ok(tj1: int, tj2: int, tj3: int) -> bool:
    """Triangle rule on doubled values, including integer-perimeter parity."""
    if (tj1 + tj2 + tj3) % 2 != 0:
        return False
    return abs(tj1 - tj2) <= tj3 <= tj1 + tj2


def _delta_factor(tj1: int, tj2: int, tj3: int) -> float:
    a = (tj1 + tj2 - tj3) // 2
    b = (tj1 - tj2 + tj3) // 2
    c = (-tj1 + tj2 + tj3) // 2
    d = (tj1 + tj2 + tj3) // 2 + 1
    return math.sqrt(_FACT[a] * _FACT[b] * _FACT[c] / _FACT[d])


def _check_jm(tj: int, tm: int, name: str) -> None:
    if tj < 0:
        raise ValueError(f"{name}: j must be non-negative, got {tj / 2}")
    if (tj - tm) % 2 != 0:
        raise ValueError(
            f"{name}: j={tj / 2} and m={tm / 2} differ by a non-integer"
        )
    if abs(tm) > tj:
        raise ValueError(f"{name}: |m|={abs(tm) / 2} exceeds j={tj / 2}")


def wigner_3j(j1, j2, j3, m1, m2, m3) -> float:
    """Wigner 3j symbol via the Racah summation formula.

    Returns 0.0 for selection-rule violations (m1+m2+m3 != 0 or broken
    triangle); raises ValueError for inconsistent half-integer parity.
    """
    tj1, tj2, tj3 = _twice(j1), _twice(j2), _twice(j3)
    tm1, tm2, tm3 = _twice(m1), _twice(m2), _twice(m3)
    _check_jm(tj1, tm1, "j1/m1")
    _check_jm(tj2, tm2, "j2/m2")
    _check_jm(tj3, tm3, "j3/m3")

    if tm1 + tm2 + tm3 != 0:
        return 0.0
    if not _triangle_ok(tj1, tj2, tj3):
        return 0.0

    # All of the following are guaranteed integers (in doubled units the
    # numerators are even once the parity checks above have passed).
    jpm1, jmm1 = (tj1 + tm1) // 2, (tj1 - tm1) // 2
    jpm2, jmm2 = (tj2 + tm2) // 2, (tj2 - tm2) // 2
    jpm3, jmm3 = (tj3 + tm3) // 2, (tj3 - tm3) // 2

    prefactor = _delta_factor(tj1, tj2, tj3) * math.sqrt(
        _FACT[jpm1] * _FACT[jmm1]
        * _FACT[jpm2] * _FACT[jmm2]
        * _FACT[jpm3] * _FACT[jmm3]
    )

    a = (tj1 + tj2 - tj3) // 2
    b = (tj3 - tj2 + tm1) // 2
    c = (tj3 - tj1 - tm2) // 2
    t_min = max(0, -b, -c)
    t_max = min(a, jmm1, jpm2)

    total = 0.0
    for t in range(t_min, t_max + 1):
        term = (
            _FACT[t] * _FACT[b + t] * _FACT[c + t]
            * _FACT[a - t] * _FACT[jmm1 - t] * _FACT[jpm2 - t]
        )
        total += (-1.0) ** t / term

    sign = -1.0 if ((tj1 - tj2 - tm3) // 2) % 2 else 1.0
    return sign * prefactor * total


def wigner_6j(j1, j2, j3, j4, j5, j6) -> float:
    """Wigner 6j symbol {j1 j2 j3; j4 j5 j6} via the Racah summation.

    Returns 0.0 when any of the four triads violates the triangle rule.
    """
    tj = [_twice(j) for j in (j1, j2, j3, j4, j5, j6)]
    for i, t in enumerate(tj):
        if t < 0:
            raise ValueError(f"j{i + 1} must be non-negative, got {t / 2}")

    triads = (
        (tj[0], tj[1], tj[2]),
        (tj[0], tj[4], tj[5]),
        (tj[3], tj[1], tj[5]),
        (tj[3], tj[4], tj[2]),
    )
    if not all(_triangle_ok(*triad) for triad in triads):
        return 0.0

    prefactor = 1.0
    for triad in triads:
        prefactor *= _delta_factor(*triad)

    # Sums over each triad and over the three "rectangle" pairs.
    s123 = (tj[0] + tj[1] + tj[2]) // 2
    s156 = (tj[0] + tj[4] + tj[5]) // 2
    s426 = (tj[3] + tj[1] + tj[5]) // 2
    s453 = (tj[3] + tj[4] + tj[2]) // 2
    p1245 = (tj[0] + tj[1] + tj[3] + tj[4]) // 2
    p2356 = (tj[1] + tj[2] + tj[4] + tj[5]) // 2
    p1346 = (tj[0] + tj[2] + tj[3] + tj[5]) // 2

    t_min = max(s123, s156, s426, s453)
    t_max = min(p1245, p2356, p1346)

    total = 0.0
    for t in range(t_min, t_max + 1):
        term = (
            _FACT[t - s123] * _FACT[t - s156] * _FACT[t - s426]
            * _FACT[t - s453] * _FACT[p1245 - t] * _FACT[p2356 - t]
            * _FACT[p1346 - t]
        )
        total += (-1.0) ** t * _FACT[t + 1] / term

    return prefactor * total


def hyperfine_dipole(F, mF, Fp, mFp, j, jp, I, muJ: float) -> float:
    """Transition dipole moment mu_FF' between hyperfine sublevels.

    mu = muJ * (-1)^(2F'+mF+j+I) * sqrt((2F+1)(2F'+1)(2j+1))
         * 3j(F',1,F; mF',q,-mF) * 6j{j,j',1; F',F,I},  q = mF - mF'.

    Selection-rule-forbidden transitions return exactly 0.0.
    """
    tF, tmF, tFp, tmFp = _twice(F), _twice(mF), _twice(Fp), _twice(mFp)
    tj, tjp, tI = _twice(j), _twice(jp), _twice(I)
    tq = tmF - tmFp
    if abs(tq) > 2:
        return 0.0

    threej = wigner_3j(
        HalfInt(tFp), HalfInt(2), HalfInt(tF),
        HalfInt(tmFp), HalfInt(tq), HalfInt(-tmF),
    )
    sixj = wigner_6j(
        HalfInt(tj), HalfInt(tjp), HalfInt(2),
        HalfInt(tFp), HalfInt(tF), HalfInt(tI),
    )
    if threej == 0.0 or sixj == 0.0:
        return 0.0

    # 2F' + mF + j + I is an integer whenever the arguments are consistent.
    texp = 2 * tFp + tmF + tj + tI
    if texp % 2 != 0:
        raise ValueError("inconsistent half-integer parity in (F', mF, j, I)")
    sign = -1.0 if (texp // 2) % 2 else 1.0

    scale = math.sqrt(float((tF + 1) * (tFp + 1) * (tj + 1)))
    return muJ * sign * scale * threej * sixj


@dataclass(frozen=True)
class HyperfineLevel:
    """One hyperfine level; energy is an angular frequency in rad/ns."""

    label: str  # one of "1", "2", "1p", "2p"
    F: HalfInt
    mF: HalfInt
    j: HalfInt
    energy: float

    def __post_init__(self):
        if abs(self.mF.twice) > self.F.twice:
            raise ValueError(f"level {self.label}: |mF| > F")


LEVEL_LABELS = ("1", "2", "1p", "2p")


@dataclass(frozen=True)
class LevelSystem:
    """Four-level double-Lambda system for one mF manifold.

    Basis order is (|1>, |2>, |1'>, |2'>); ``dipole`` is the symmetric
    4x4 transition-dipole matrix in atomic units.
    """

    levels: tuple[HyperfineLevel, ...]
    dipole: np.ndarray
    delta1: float
    delta2: float
    muJ: float = MU_J_AU

    def __post_init__(self):
        if len(self.levels) != 4:
            raise ValueError("LevelSystem requires exactly 4 levels")
        labels = tuple(lv.label for lv in self.levels)
        if labels != LEVEL_LABELS:
            raise ValueError(f"levels must be ordered {LEVEL_LABELS}, got {labels}")
        d = np.asarray(self.dipole, dtype=float)
        if d.shape != (4, 4) or not np.allclose(d, d.T):
            raise ValueError("dipole must be a symmetric 4x4 real matrix")
        if d[0, 1] != 0.0 or d[2, 3] != 0.0:
            raise ValueError("ground-ground and excited-excited couplings must vanish")
        if self.delta1 <= 0.0 or self.delta2 <= 0.0:
            raise ValueError("delta1 and delta2 must be positive")
        object.__setattr__(self, "dipole", d)

    @property
    def energies(self) -> np.ndarray:
        return np.array([lv.energy for lv in self.levels])

    # Dipole elements on the four allowed transitions.
    @property
    def mu_11p(self) -> float:
        return float(self.dipole[0, 2])

    @property
    def mu_12p(self) -> float:
        return float(self.dipole[0, 3])

    @property
    def mu_21p(self) -> float:
        return float(self.dipole[1, 2])

    @property
    def mu_22p(self) -> float:
        return float(self.dipole[1, 3])

    @property
    def omega_pump(self) -> float:
        """Resonant pump carrier omega_1'1."""
        return self.levels[2].energy - self.levels[0].energy

    @property
    def omega_stokes(self) -> float:
        """Resonant Stokes carrier omega_1'2."""
        return self.levels[2].energy - self.levels[1].energy


def build_rb87_system(mF=HalfInt(2), e_opt: float = E_OPT_DEFAULT) -> LevelSystem:
    """Rb-87 {5S1/2 F=1,2; 5P1/2 F'=1,2} system at a fixed mF sublevel.

    Energies are (0, delta1, e_opt, e_opt + delta2) in rad/ns.  mF = 0 is
    rejected because mu_11' and mu_22' vanish there, degenerating both
    Raman paths.
    """
    mF = HalfInt.of(mF)
    if mF.twice == 0:
        raise ValueError(
            "mF = 0 is degenerate: mu_11' and mu_22' vanish, leaving no "
            "resonant Lambda path; choose |mF| >= 1"
        )
    half = HalfInt(1)
    one, two = HalfInt(2), HalfInt(4)
    nuclear = HalfInt(3)  # I = 3/2
    if abs(mF.twice) > one.twice:
        raise ValueError("mF must lie inside F=1 so all four levels contain it")

    delta1 = TWO_PI * DELTA1_GHZ
    delta2 = TWO_PI * DELTA2_GHZ
    levels = (
        HyperfineLevel("1", one, mF, half, 0.0),
        HyperfineLevel("2", two, mF, half, delta1),
        HyperfineLevel("1p", one, mF, half, e_opt),
        HyperfineLevel("2p", two, mF, half, e_opt + delta2),
    )

    dipole = np.zeros((4, 4))
    for g in (0, 1):
        for e in (2, 3):
            mu = hyperfine_dipole(
                levels[g].F, mF, levels[e].F, mF, half, half, nuclear, MU_J_AU
            )
            dipole[g, e] = dipole[e, g] = mu

    return LevelSystem(levels, dipole, delta1, delta2, MU_J_AU)
