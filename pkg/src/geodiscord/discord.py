"""Geometric discord: the closed form for the family and a numerical minimizer.

The numerical route works on any ``2^N``-dimensional state. It searches over
conditional measurement trees with multi-start Nelder-Mead, parametrizing
every node by an unconstrained 4-vector that is normalized on evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .family import PauliFamilyState, is_physical
from .measurement import MeasurementTree, ResidualKernel, apply_chain, canonical_tree
from .qcore import ParameterError, ValidationError, check_density_matrix, hs_distance_sq, n_qubits


def discord_formula(n: int, c) -> float:
    """``(c1^2 + c2^2 + c3^2 - max_j c_j^2) / 2^n`` for any real triple.

    Evaluated as the sum of the two smallest squares so the result is
    bit-for-bit invariant under permutations and sign flips of ``c``.
    """
    sq = sorted(float(x) ** 2 for x in c)
    return (sq[0] + sq[1]) / 2**n


def closed_form(s: PauliFamilyState, *, allow_unphysical: bool = False) -> float:
    """Geometric discord of a family state.

    Raises ``ValidationError`` for an unphysical state unless
    ``allow_unphysical`` is set, in which case the formula is evaluated on
    the formal coefficient triple.
    """
    if not allow_unphysical:
        ok, lam = is_physical(s.n_qubits, s.c)
        if not ok:
            raise ValidationError(
                f"c={s.c} is unphysical for N={s.n_qubits}: smallest eigenvalue {lam:.6g}"
            )
    return discord_formula(s.n_qubits, s.c)


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 64
    max_iterations_per_restart: int = 2000
    convergence_tolerance: float = 1e-10
    seed: int = 0
    # start from the three canonical x/y/z trees before the random ones
    canonical_seeds: bool = True

    def __post_init__(self):
        if self.restarts < 1:
            raise ParameterError(f"restarts must be >= 1, got {self.restarts}")
        if self.max_iterations_per_restart < 1:
            raise ParameterError("max_iterations_per_restart must be >= 1")
        if not self.convergence_tolerance > 0:
            raise ParameterError("convergence_tolerance must be > 0")


@dataclass
class DiscordResult:
    value: float
    arg_tree: MeasurementTree
    restarts_used: int
    converged: bool
    # running minimum after each restart, in restart order
    best_residual_history: list[float] = field(default_factory=list)


def initial_trees(
    depth: int, restarts: int, rng: np.random.Generator, canonical: bool = True
) -> list[MeasurementTree]:
    """Canonical x, y, z trees first (if requested), then random trees."""
    seeds = [canonical_tree(axis, depth) for axis in (1, 2, 3)][:restarts] if canonical else []
    seeds += [MeasurementTree.random(depth, rng) for _ in range(restarts - len(seeds))]
    return seeds


def minimize_numeric(rho, cfg: OptimizerConfig | None = None, *, validate: bool = True) -> DiscordResult:
    """Minimize ``||rho - chi||^2`` over conditional measurement trees.

    Parameters
    ----------
    rho : array_like
        State of ``N >= 2`` qubits.
    cfg : OptimizerConfig, optional
        Restart count, iteration budget, tolerance and seed.
    validate : bool
        Require ``rho`` to be a valid density matrix. With ``False`` only
        the shape and Hermiticity are checked, which is enough for the
        residual to be well defined.

    Returns
    -------
    DiscordResult
        ``value`` is recomputed from the explicit post-measurement matrix of
        ``arg_tree``. Ties keep the earliest restart.
    """
    cfg = cfg or OptimizerConfig()
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] < 2:
        raise ParameterError(f"state must be square, got {rho.shape}")
    n = n_qubits(rho)
    if 2**n != rho.shape[0]:
        raise ParameterError(f"dimension {rho.shape[0]} is not a power of two")
    if n < 2:
        raise ParameterError("need at least two qubits")
    if validate:
        check_density_matrix(rho)
    elif np.max(np.abs(rho - rho.conj().T)) > 1e-12:
        raise ValidationError("state is not Hermitian")

    depth = n - 1
    rng = np.random.default_rng(cfg.seed)
    f = ResidualKernel(rho)
    best_val, best_x, best_ok = np.inf, None, False
    history = []
    for tree in initial_trees(depth, cfg.restarts, rng, cfg.canonical_seeds):
        x0 = tree.to_params()
        res = minimize(
            f,
            x0,
            method="Nelder-Mead",
            options={
                "maxiter": cfg.max_iterations_per_restart,
                "fatol": cfg.convergence_tolerance,
                # node scale is a flat direction, so stop on residual change only
                "xatol": np.inf,
                "adaptive": True,
            },
        )
        # Nelder-Mead never returns worse than its best vertex, but guard anyway
        val, x = (res.fun, res.x) if res.fun <= f(x0) else (f(x0), x0)
        if val < best_val:
            best_val, best_x, best_ok = val, x, bool(res.success)
        history.append(float(best_val))

    arg_tree = MeasurementTree.from_params(best_x, depth)
    value = max(hs_distance_sq(rho, apply_chain(rho, arg_tree).chi), 0.0)
    return DiscordResult(value, arg_tree, cfg.restarts, best_ok, history)
