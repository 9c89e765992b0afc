"""Dense complex-matrix kernel for small qubit registers.

States are plain ``numpy`` arrays of shape ``(2**n, 2**n)``. Kraus sets are
sequences of such arrays.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
EIGEN_TOL = 1e-10
KRAUS_TOL = 1e-12
MAX_DIM = 2**10

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = {1: SIGMA_X, 2: SIGMA_Y, 3: SIGMA_Z}


class ParameterError(ValueError):
    """Bad argument: wrong shape, out-of-range index, mismatched sizes."""


class ValidationError(ValueError):
    """A matrix or operator set violates a physical invariant."""


def _as_square(m, name="matrix"):
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ParameterError(f"{name} must be square, got shape {m.shape}")
    if m.shape[0] > MAX_DIM:
        raise ParameterError(f"{name} dimension {m.shape[0]} exceeds {MAX_DIM}")
    return m


def kron_all(factors: Sequence[np.ndarray]) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for f in factors:
        out = np.kron(out, f)
    return out


def pauli_tensor(j: int, n: int) -> np.ndarray:
    """Return ``sigma_j`` tensored with itself ``n`` times.

    Parameters
    ----------
    j : int
        Pauli axis, 1 (x), 2 (y) or 3 (z).
    n : int
        Number of factors.
    """
    if j not in PAULI:
        raise ParameterError(f"Pauli axis must be 1, 2 or 3, got {j!r}")
    if n < 1 or 2**n > MAX_DIM:
        raise ParameterError(f"qubit count must be in [1, 10], got {n!r}")
    return kron_all([PAULI[j]] * n)


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product Tr(a^dagger b)."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ParameterError(f"shape mismatch: {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def hs_distance_sq(rho, chi) -> float:
    """Squared Hilbert-Schmidt distance Tr[(rho - chi)^2] for Hermitian inputs."""
    rho = np.asarray(rho, dtype=complex)
    chi = np.asarray(chi, dtype=complex)
    if rho.shape != chi.shape:
        raise ParameterError(f"shape mismatch: {rho.shape} vs {chi.shape}")
    diff = rho - chi
    return float(np.vdot(diff, diff).real)


def is_hermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    m = np.asarray(m)
    return bool(np.max(np.abs(m - m.conj().T), initial=0.0) <= tol)


def min_eigenvalue(m) -> float:
    """Smallest eigenvalue of a Hermitian matrix."""
    m = _as_square(m)
    if not is_hermitian(m, EIGEN_TOL):
        raise ParameterError("matrix is not Hermitian")
    # symmetrize so eigvalsh sees exactly Hermitian input
    return float(np.linalg.eigvalsh((m + m.conj().T) / 2)[0])


def check_density_matrix(m) -> np.ndarray:
    """Validate ``m`` as a density matrix and return it as a complex array.

    Raises
    ------
    ParameterError
        If ``m`` is not square with a power-of-two dimension.
    ValidationError
        If ``m`` is not Hermitian, not trace one, or not positive semidefinite.
    """
    m = _as_square(m, "density matrix")
    dim = m.shape[0]
    if dim < 2 or dim & (dim - 1):
        raise ParameterError(f"dimension must be a power of two >= 2, got {dim}")
    if not is_hermitian(m):
        raise ValidationError("density matrix is not Hermitian")
    tr = np.trace(m)
    if abs(tr - 1) > TRACE_TOL:
        raise ValidationError(f"density matrix trace is {tr.real:.15g}, expected 1")
    lam = min_eigenvalue(m)
    if lam < -EIGEN_TOL:
        raise ValidationError(f"density matrix has negative eigenvalue {lam:.6g}")
    return m


def n_qubits(m) -> int:
    dim = np.asarray(m).shape[0]
    return dim.bit_length() - 1


def check_kraus(ops: Sequence[np.ndarray]) -> list[np.ndarray]:
    ops = [_as_square(k, "Kraus operator") for k in ops]
    if not ops:
        raise ParameterError("empty Kraus set")
    dim = ops[0].shape[0]
    if any(k.shape != (dim, dim) for k in ops):
        raise ParameterError("Kraus operators have differing shapes")
    total = sum(k.conj().T @ k for k in ops)
    if np.max(np.abs(total - np.eye(dim))) > KRAUS_TOL:
        raise ValidationError("Kraus set is not trace preserving (sum K^dag K != I)")
    return ops


def apply_kraus(rho, ops: Sequence[np.ndarray]) -> np.ndarray:
    """Apply the channel ``rho -> sum_k K rho K^dagger``."""
    rho = _as_square(rho, "state")
    ops = check_kraus(ops)
    if ops[0].shape != rho.shape:
        raise ParameterError(f"Kraus shape {ops[0].shape} does not match state {rho.shape}")
    out = np.zeros_like(rho)
    for k in ops:
        out += k @ rho @ k.conj().T
    return out
