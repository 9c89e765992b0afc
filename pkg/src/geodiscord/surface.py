"""Level-surface point clouds of constant closed-form discord.

By default the surface is the formal one over the whole coefficient cube
``[-1, 1]^3``. ``physical_only`` keeps only positive semidefinite states; at
odd ``N`` that region is the unit ball, where the discord never exceeds
``(2/3) / 2^N``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qcore import EIGEN_TOL, ParameterError, pauli_tensor

_CHUNK = 4096


@dataclass(frozen=True)
class SurfaceGridSpec:
    n_qubits: int
    target_discord: float
    tolerance_band: float
    grid_resolution: int
    physical_only: bool = False

    def __post_init__(self):
        if self.n_qubits < 2 or self.n_qubits > 10:
            raise ParameterError(f"n_qubits must be in [2, 10], got {self.n_qubits}")
        if self.target_discord < 0:
            raise ParameterError(f"target must be >= 0, got {self.target_discord}")
        if not self.tolerance_band > 0:
            raise ParameterError(f"band must be > 0, got {self.tolerance_band}")
        if self.grid_resolution < 2:
            raise ParameterError(f"resolution must be >= 2, got {self.grid_resolution}")


def grid_axis(resolution: int) -> np.ndarray:
    """``resolution`` points on [-1, 1], exactly antisymmetric about 0."""
    r = resolution - 1
    return (2.0 * np.arange(resolution) - r) / r


def _min_eigenvalues(n: int, coeffs: np.ndarray) -> np.ndarray:
    dim = 2**n
    paulis = np.stack([pauli_tensor(j, n) for j in (1, 2, 3)])
    out = np.empty(len(coeffs))
    for lo in range(0, len(coeffs), _CHUNK):
        block = coeffs[lo : lo + _CHUNK]
        mats = np.eye(dim) + np.einsum("mj,jab->mab", block, paulis)
        out[lo : lo + _CHUNK] = np.linalg.eigvalsh(mats)[:, 0] / dim
    return out


def surface_points(spec: SurfaceGridSpec) -> tuple[np.ndarray, np.ndarray]:
    """Grid points whose discord lies within the band of the target.

    Returns ``(coeffs, discord)`` with rows in lexicographic grid order. With
    ``spec.physical_only`` the band survivors are also diagonalized and
    unphysical points dropped.
    """
    axis = grid_axis(spec.grid_resolution)
    c = np.stack(np.meshgrid(axis, axis, axis, indexing="ij"), axis=-1).reshape(-1, 3)
    sq = np.sort(c * c, axis=1)
    discord = (sq[:, 0] + sq[:, 1]) / 2**spec.n_qubits
    keep = np.abs(discord - spec.target_discord) <= spec.tolerance_band
    c, discord = c[keep], discord[keep]
    if spec.physical_only and len(c):
        physical = _min_eigenvalues(spec.n_qubits, c) >= -EIGEN_TOL
        c, discord = c[physical], discord[physical]
    return c, discord
