"""The N-qubit Pauli-diagonal family ``(I + sum_j c_j sigma_j^{(x)N}) / 2^N``.

For ``N = 2`` these are the Bell-diagonal states.
"""

from __future__ import annotations

from dataclasses import InitVar, dataclass

import numpy as np

from .qcore import EIGEN_TOL, ParameterError, ValidationError, min_eigenvalue, pauli_tensor

_MAX_QUBITS = 10


def family_matrix(n: int, c) -> np.ndarray:
    """Build the family matrix without any physicality check."""
    if not isinstance(n, (int, np.integer)) or n < 1 or n > _MAX_QUBITS:
        raise ParameterError(f"qubit count must be an integer in [1, {_MAX_QUBITS}], got {n!r}")
    c = _coeff_triple(c)
    dim = 2**n
    m = np.eye(dim, dtype=complex)
    for j, cj in enumerate(c, start=1):
        if cj != 0.0:
            m = m + cj * pauli_tensor(j, n)
    return m / dim


def _coeff_triple(c) -> tuple[float, float, float]:
    vals = tuple(float(x) for x in c)
    if len(vals) != 3:
        raise ParameterError(f"expected three coefficients, got {len(vals)}")
    if not all(np.isfinite(vals)):
        raise ParameterError(f"coefficients must be finite, got {vals}")
    return vals  # type: ignore[return-value]


def is_physical(n: int, c) -> tuple[bool, float]:
    """Return ``(physical, smallest_eigenvalue)`` for the family state ``(n, c)``.

    Triples with some ``|c_j| > 1`` are rejected without diagonalizing; the
    returned eigenvalue is then still computed for diagnostics.
    """
    if n < 2:
        raise ParameterError(f"family states need n >= 2, got {n}")
    c = _coeff_triple(c)
    lam = min_eigenvalue(family_matrix(n, c))
    if any(abs(x) > 1.0 for x in c):
        return False, lam
    return lam >= -EIGEN_TOL, lam


@dataclass(frozen=True)
class PauliFamilyState:
    """A member of the family, stored as ``(n_qubits, c)``.

    Construction rejects triples whose matrix is not positive semidefinite.
    ``check=False`` skips only that eigenvalue test, giving a formal member
    (Hermitian, unit trace) on which the closed-form formulas can still be
    evaluated. Several commonly quoted triples, e.g. ``(0.8, 0.4, 0.5)`` at
    ``N = 3`` where ``|c| > 1``, need it.
    """

    n_qubits: int
    c: tuple[float, float, float]
    check: InitVar[bool] = True

    def __post_init__(self, check):
        if not isinstance(self.n_qubits, (int, np.integer)) or not 2 <= self.n_qubits <= _MAX_QUBITS:
            raise ParameterError(f"n_qubits must be an integer in [2, {_MAX_QUBITS}], got {self.n_qubits!r}")
        c = _coeff_triple(self.c)
        object.__setattr__(self, "n_qubits", int(self.n_qubits))
        object.__setattr__(self, "c", c)
        if any(abs(x) > 1.0 for x in c):
            raise ValidationError(f"coefficients must lie in [-1, 1], got {c}")
        if check:
            ok, lam = is_physical(self.n_qubits, c)
            if not ok:
                raise ValidationError(
                    f"c={c} is unphysical for N={self.n_qubits}: smallest eigenvalue {lam:.6g}"
                )

    @property
    def physical(self) -> bool:
        return is_physical(self.n_qubits, self.c)[0]

    @property
    def c_max(self) -> float:
        """Largest absolute coefficient."""
        return max(abs(x) for x in self.c)

    @property
    def dim(self) -> int:
        return 2**self.n_qubits


def to_density_matrix(s: PauliFamilyState) -> np.ndarray:
    return family_matrix(s.n_qubits, s.c)


def purity(s: PauliFamilyState) -> float:
    """Tr(rho^2) = (1 + c1^2 + c2^2 + c3^2) / 2^N."""
    c1, c2, c3 = s.c
    return (1.0 + c1 * c1 + c2 * c2 + c3 * c3) / 2**s.n_qubits


def coefficients_of(rho) -> tuple[float, float, float]:
    """Read off ``c_j = Tr(rho sigma_j^{(x)N})`` from an explicit matrix."""
    rho = np.asarray(rho, dtype=complex)
    n = rho.shape[0].bit_length() - 1
    return tuple(float(np.trace(rho @ pauli_tensor(j, n)).real) for j in (1, 2, 3))  # type: ignore[return-value]


def parse_coeffs(text: str) -> tuple[float, float, float]:
    """Parse the ``"c1,c2,c3"`` textual format."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 3 or not all(parts):
        raise ParameterError(f"expected 'c1,c2,c3', got {text!r}")
    try:
        return _coeff_triple(float(p) for p in parts)
    except ValueError as exc:
        if isinstance(exc, ParameterError):
            raise
        raise ParameterError(f"expected 'c1,c2,c3', got {text!r}") from exc


def format_coeffs(c) -> str:
    return ",".join(repr(float(x)) for x in c)


def random_family_state(n: int, rng: np.random.Generator, max_tries: int = 10_000) -> PauliFamilyState:
    """Draw a physical state uniformly from the physicality region by rejection."""
    for _ in range(max_tries):
        c = rng.uniform(-1.0, 1.0, size=3)
        if is_physical(n, c)[0]:
            return PauliFamilyState(n, tuple(c))
    raise RuntimeError(f"no physical sample found in {max_tries} draws")
