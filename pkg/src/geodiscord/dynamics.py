"""Phase-flip noise on qubit 1 and the resulting discord trajectories.

Under ``Gamma_0 = diag(1, g) (x) I``, ``Gamma_1 = diag(0, sqrt(1 - g^2)) (x) I``
a family state keeps its form with ``c -> (g c1, g c2, c3)``, where
``g = exp(-tau t / 2)``. The discord is piecewise smooth in ``t`` and its
slope jumps where ``g max(|c1|, |c2|)`` crosses ``|c3|``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .discord import discord_formula
from .family import PauliFamilyState
from .qcore import ParameterError


def decay_factor(t, tau: float):
    """``gamma(t) = exp(-tau t / 2)``."""
    return np.exp(-0.5 * tau * np.asarray(t, dtype=float))


def phase_flip_kraus(n: int, gamma: float) -> list[np.ndarray]:
    if not 0.0 <= gamma <= 1.0:
        raise ParameterError(f"gamma must lie in [0, 1], got {gamma!r}")
    if n < 1:
        raise ParameterError(f"qubit count must be >= 1, got {n!r}")
    rest = np.eye(2 ** (n - 1), dtype=complex)
    g0 = np.diag([1.0, gamma]).astype(complex)
    g1 = np.diag([0.0, math.sqrt(1.0 - gamma * gamma)]).astype(complex)
    return [np.kron(g0, rest), np.kron(g1, rest)]


def effective_coeffs(c, gamma: float) -> tuple[float, float, float]:
    c1, c2, c3 = c
    return (gamma * c1, gamma * c2, c3)


def evolved_discord(s: PauliFamilyState, gamma: float) -> float:
    """Discord after the channel with decay factor ``gamma``."""
    if not 0.0 <= gamma <= 1.0:
        raise ParameterError(f"gamma must lie in [0, 1], got {gamma!r}")
    return discord_formula(s.n_qubits, effective_coeffs(s.c, gamma))


def sudden_change_time(s: PauliFamilyState, tau: float) -> Optional[float]:
    """Time of the slope discontinuity, or ``None`` for monotonic decay.

    Positive root of ``gamma(t) max(|c1|, |c2|) = |c3|``. Equal magnitudes
    give 0 (the kink sits at the start).
    """
    if not tau > 0:
        raise ParameterError(f"tau must be positive, got {tau!r}")
    top = max(abs(s.c[0]), abs(s.c[1]))
    c3 = abs(s.c[2])
    if c3 == 0.0 or top < c3:
        return None
    if top == c3:
        return 0.0
    return (2.0 / tau) * math.log(top / c3)


@dataclass(frozen=True)
class PhaseFlipParams:
    tau: float
    t_max: float
    steps: int

    def __post_init__(self):
        if not self.tau > 0:
            raise ParameterError(f"tau must be positive, got {self.tau!r}")
        if not self.t_max > 0:
            raise ParameterError(f"t_max must be positive, got {self.t_max!r}")
        if self.steps < 2:
            raise ParameterError(f"steps must be >= 2, got {self.steps!r}")


@dataclass(frozen=True)
class TrajectoryPoint:
    t: float
    gamma: float
    c_effective: tuple[float, float, float]
    discord: float


def trajectory(s: PauliFamilyState, p: PhaseFlipParams) -> list[TrajectoryPoint]:
    """Discord on ``steps`` uniform times in ``[0, t_max]``.

    A sudden-change time strictly inside the window is added as an extra
    sample so the kink is resolved exactly.
    """
    times = [p.t_max * i / (p.steps - 1) for i in range(p.steps)]
    t0 = sudden_change_time(s, p.tau)
    if t0 is not None and 0.0 < t0 < p.t_max and all(abs(t0 - t) > 1e-12 for t in times):
        times = sorted(times + [t0])
    out = []
    for t in times:
        g = float(decay_factor(t, p.tau))
        ce = effective_coeffs(s.c, g)
        out.append(TrajectoryPoint(t, g, ce, discord_formula(s.n_qubits, ce)))
    return out


def detect_sudden_change(
    points: Sequence[TrajectoryPoint], ratio: float = 10.0, floor: float = 1e-12
) -> Optional[float]:
    """Locate a slope discontinuity from sampled discord values alone.

    Works on the discrete second derivative ``k_i`` at interior samples. A
    smooth curve gives a slowly varying ``k``; a kink gives a spike of size
    about ``2 * slope_jump / h``. Each ``k_i`` is compared with the straight
    line through ``k_{i-2}`` and ``k_{i+2}``; the largest excess is a kink if
    it beats every excess outside its +-3 neighbourhood by ``ratio`` and the
    slope jump there exceeds ``floor``.

    The returned time is where quadratics through the three samples on each
    side of the kink cross.
    """
    t = np.array([p.t for p in points], dtype=float)
    d = np.array([p.discord for p in points], dtype=float)
    if len(t) < 8:
        return None
    h = np.diff(t)
    slopes = np.diff(d) / h
    jumps = np.diff(slopes)  # at samples 1 .. len-2
    curv = 2.0 * jumps / (h[:-1] + h[1:])
    tc = t[1:-1]
    idx = np.arange(2, len(curv) - 2)
    w = (tc[idx] - tc[idx - 2]) / (tc[idx + 2] - tc[idx - 2])
    excess = np.abs(curv[idx] - ((1 - w) * curv[idx - 2] + w * curv[idx + 2]))
    j = int(np.argmax(excess))
    k = int(idx[j]) + 1  # sample index
    if abs(jumps[k - 1]) <= floor:
        return None
    others = np.delete(excess, np.arange(max(j - 3, 0), min(j + 4, len(excess))))
    if others.size and excess[j] <= ratio * others.max():
        return None
    return _kink_location(t, d, k)


def _kink_location(t: np.ndarray, d: np.ndarray, k: int) -> float:
    # kink lies in [t[k-1], t[k+1]]; extrapolate each side from samples beyond it
    if k < 3 or k + 4 > len(t):
        return float(t[k])
    left = np.polyfit(t[k - 3 : k], d[k - 3 : k], 2)
    right = np.polyfit(t[k + 1 : k + 4], d[k + 1 : k + 4], 2)
    roots = np.roots(left - right)
    roots = roots[np.isreal(roots)].real
    roots = roots[(roots >= t[k - 1]) & (roots <= t[k + 1])]
    if roots.size == 0:
        return float(t[k])
    return float(roots[np.argmin(np.abs(roots - t[k]))])
