"""Conditional von Neumann measurement chains on qubits ``1 .. N-1``.

A local measurement is fixed by a unit 4-vector ``(t, y1, y2, y3)`` through
the unitary ``V = t I + i (y1 sx + y2 sy + y3 sz)``; its projectors are
``V |k><k| V^dagger``. The chain measures qubit 1, then qubit 2 in a basis
chosen by the first outcome, and so on. The conditional bases form a
complete binary tree stored in level order: the node for outcome prefix
``j1 .. j_{k-1}`` sits at index ``2**(k-1) - 1 + int(j1 .. j_{k-1}, 2)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .family import PauliFamilyState
from .qcore import I2, PAULI, ParameterError, ValidationError, kron_all

NODE_NORM_TOL = 1e-12
ZERO_BRANCH = 1e-14


@dataclass(frozen=True)
class MeasurementNode:
    t: float
    y: tuple[float, float, float]

    def __post_init__(self):
        y = tuple(float(v) for v in self.y)
        if len(y) != 3:
            raise ParameterError(f"y must have three components, got {len(y)}")
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "y", y)
        norm = self.t**2 + sum(v * v for v in y)
        if abs(norm - 1.0) > NODE_NORM_TOL:
            raise ValidationError(f"measurement node is not unit norm: t^2+|y|^2 = {norm!r}")

    @classmethod
    def from_vector(cls, v) -> "MeasurementNode":
        """Normalize an arbitrary nonzero 4-vector into a node."""
        v = np.asarray(v, dtype=float)
        norm = np.linalg.norm(v)
        if v.shape != (4,) or not norm > 0:
            raise ParameterError(f"need a nonzero 4-vector, got {v!r}")
        v = v / norm
        return cls(v[0], (v[1], v[2], v[3]))

    def as_vector(self) -> np.ndarray:
        return np.array([self.t, *self.y])


def unitary(node: MeasurementNode) -> np.ndarray:
    t, (y1, y2, y3) = node.t, node.y
    return t * I2 + 1j * (y1 * PAULI[1] + y2 * PAULI[2] + y3 * PAULI[3])


def projector(node: MeasurementNode, outcome: int) -> np.ndarray:
    """Rank-one projector ``V |outcome><outcome| V^dagger``."""
    if outcome not in (0, 1):
        raise ParameterError(f"outcome must be 0 or 1, got {outcome!r}")
    ket = unitary(node)[:, outcome]
    return np.outer(ket, ket.conj())


def direction_coeffs(node: MeasurementNode) -> np.ndarray:
    """Bloch vector of the outcome-0 projector, written in ``(t, y)``.

    Measuring ``sigma_j`` correlations through this node rescales them by
    ``+d_j`` on outcome 0 and ``-d_j`` on outcome 1.
    """
    t, (y1, y2, y3) = node.t, node.y
    return np.array(
        [
            2.0 * (-t * y2 + y1 * y3),
            2.0 * (t * y1 + y2 * y3),
            t * t - y1 * y1 - y2 * y2 + y3 * y3,
        ]
    )


@dataclass(frozen=True)
class MeasurementTree:
    """Complete binary tree of conditional measurements, level order."""

    nodes: tuple[MeasurementNode, ...]

    def __post_init__(self):
        nodes = tuple(self.nodes)
        object.__setattr__(self, "nodes", nodes)
        count = len(nodes) + 1
        if len(nodes) < 1 or count & (count - 1):
            raise ParameterError(f"node count must be 2^depth - 1, got {len(nodes)}")
        if not all(isinstance(n, MeasurementNode) for n in nodes):
            raise ParameterError("tree nodes must be MeasurementNode instances")

    @property
    def depth(self) -> int:
        return (len(self.nodes) + 1).bit_length() - 1

    def node(self, prefix: Sequence[int] = ()) -> MeasurementNode:
        """Node used after observing the outcome string ``prefix``."""
        k = len(prefix)
        if k >= self.depth:
            raise ParameterError(f"prefix length {k} exceeds depth {self.depth}")
        idx = 0
        for bit in prefix:
            idx = 2 * idx + int(bit)
        return self.nodes[2**k - 1 + idx]

    @classmethod
    def uniform(cls, node: MeasurementNode, depth: int) -> "MeasurementTree":
        return cls((node,) * (2**depth - 1))

    @classmethod
    def from_params(cls, params, depth: int) -> "MeasurementTree":
        """Build a tree from ``4 * (2^depth - 1)`` unconstrained reals."""
        params = np.asarray(params, dtype=float).reshape(2**depth - 1, 4)
        return cls(tuple(MeasurementNode.from_vector(v) for v in params))

    @classmethod
    def random(cls, depth: int, rng: np.random.Generator) -> "MeasurementTree":
        """Independent Haar-uniform unit 4-vectors at every node."""
        return cls.from_params(rng.standard_normal((2**depth - 1, 4)), depth)

    def to_params(self) -> np.ndarray:
        return np.concatenate([n.as_vector() for n in self.nodes])

    def to_rows(self) -> list[tuple[float, float, float, float]]:
        return [(n.t, *n.y) for n in self.nodes]

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[float]]) -> "MeasurementTree":
        return cls(tuple(MeasurementNode(r[0], (r[1], r[2], r[3])) for r in rows))

    def to_text(self) -> str:
        """One ``t,y1,y2,y3`` line per node in level order."""
        return "".join(",".join(repr(float(v)) for v in row) + "\n" for row in self.to_rows())

    @classmethod
    def from_text(cls, text: str) -> "MeasurementTree":
        rows = []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            vals = [float(v) for v in line.split(",")]
            if len(vals) != 4:
                raise ParameterError(f"tree row needs 4 values, got {line!r}")
            rows.append(vals)
        return cls.from_rows(rows)


# Canonical optimal trees: every node measures along x, y or z respectively.
_CANONICAL_NODES = {
    1: MeasurementNode(1 / np.sqrt(2), (0.0, 1 / np.sqrt(2), 0.0)),
    2: MeasurementNode(1 / np.sqrt(2), (1 / np.sqrt(2), 0.0, 0.0)),
    3: MeasurementNode(1.0, (0.0, 0.0, 0.0)),
}


def canonical_tree(axis: int, depth: int) -> MeasurementTree:
    """Tree whose every node has ``|direction_coeffs| = e_axis``."""
    if axis not in _CANONICAL_NODES:
        raise ParameterError(f"axis must be 1, 2 or 3, got {axis!r}")
    return MeasurementTree.uniform(_CANONICAL_NODES[axis], depth)


@dataclass(frozen=True)
class PostMeasurementState:
    chi: np.ndarray
    branch_probabilities: tuple[float, ...]


def _check_depth(rho: np.ndarray, tree: MeasurementTree) -> int:
    dim = rho.shape[0]
    if rho.ndim != 2 or rho.shape != (dim, dim) or dim < 4 or dim & (dim - 1):
        raise ParameterError(f"state must be 2^N x 2^N with N >= 2, got {rho.shape}")
    n = dim.bit_length() - 1
    if tree.depth != n - 1:
        raise ParameterError(f"tree depth {tree.depth} does not match N-1 = {n - 1}")
    return n


def outcome_strings(depth: int) -> list[tuple[int, ...]]:
    return list(itertools.product((0, 1), repeat=depth))


def apply_chain(rho, tree: MeasurementTree) -> PostMeasurementState:
    """Measure qubits ``1 .. N-1`` along ``tree`` and return the mixture.

    Every branch is formed from its explicit ``2^N``-dimensional projector, in
    lexicographic outcome order.
    """
    rho = np.asarray(rho, dtype=complex)
    n = _check_depth(rho, tree)
    chi = np.zeros_like(rho)
    probs = []
    for bits in outcome_strings(n - 1):
        factors = [projector(tree.node(bits[:k]), bits[k]) for k in range(n - 1)]
        big = kron_all(factors + [I2])
        branch = big @ rho @ big
        p = float(np.trace(branch).real)
        if p < ZERO_BRANCH:
            probs.append(0.0)
            continue
        probs.append(p)
        chi += branch
    return PostMeasurementState(chi, tuple(probs))


def branch_kets(tree: MeasurementTree) -> np.ndarray:
    """Product kets of all outcome strings, shape ``(2^d, 2^d)``, rows in outcome order."""
    kets = np.ones((1, 1), dtype=complex)
    for level in range(tree.depth):
        start = 2**level - 1
        us = np.stack([unitary(nd) for nd in tree.nodes[start : start + 2**level]])
        # kets[p] (x) us[p][:, k] for every prefix p and outcome k
        kets = np.einsum("pa,pbk->pkab", kets, us).reshape(2 ** (level + 1), -1)
    return kets


def chain_residual(rho, tree: MeasurementTree) -> float:
    """``||rho - chi||^2`` without building ``chi``.

    For a projective chain ``Tr(rho chi) = Tr(chi^2)``, so the residual is
    ``Tr(rho^2) - sum_b ||<v_b| rho |v_b>||_F^2`` with ``<v_b|`` acting on the
    measured qubits and the 2x2 block left on the last qubit.
    """
    rho = np.asarray(rho, dtype=complex)
    n = _check_depth(rho, tree)
    m = 2 ** (n - 1)
    kets = branch_kets(tree)
    blocks = np.einsum("ka,aibj,kb->kij", kets.conj(), rho.reshape(m, 2, m, 2), kets)
    return float(np.vdot(rho, rho).real - np.sum(np.abs(blocks) ** 2))


def _unitaries(v: np.ndarray) -> np.ndarray:
    """Stack of ``t I + i y.sigma`` for rows ``(t, y1, y2, y3)`` of ``v``."""
    t, y1, y2, y3 = v.T
    out = np.empty((v.shape[0], 2, 2), dtype=complex)
    out[:, 0, 0] = t + 1j * y3
    out[:, 0, 1] = y2 + 1j * y1
    out[:, 1, 0] = -y2 + 1j * y1
    out[:, 1, 1] = t - 1j * y3
    return out


class ResidualKernel:
    """Fast ``x -> ||rho - chi||^2`` for flat, unnormalized tree parameters.

    Same quantity as :func:`chain_residual`, specialized for repeated
    evaluation inside the optimizer.
    """

    def __init__(self, rho):
        rho = np.asarray(rho, dtype=complex)
        dim = rho.shape[0]
        if rho.shape != (dim, dim) or dim < 4 or dim & (dim - 1):
            raise ParameterError(f"state must be 2^N x 2^N with N >= 2, got {rho.shape}")
        self.depth = dim.bit_length() - 2
        m = dim // 2
        self._r = rho.reshape(m, 2, m, 2)
        self._purity = float(np.vdot(rho, rho).real)

    def __call__(self, x) -> float:
        v = np.asarray(x, dtype=float).reshape(-1, 4)
        norms = np.sqrt(np.einsum("ij,ij->i", v, v))
        if norms.min() < 1e-12:
            return np.inf
        us = _unitaries(v / norms[:, None])
        kets = np.ones((1, 1), dtype=complex)
        for level in range(self.depth):
            start = 2**level - 1
            kets = np.einsum("pa,pbk->pkab", kets, us[start : start + 2**level]).reshape(
                2 ** (level + 1), -1
            )
        half = np.tensordot(kets.conj(), self._r, axes=(1, 0))
        blocks = np.einsum("kibj,kb->kij", half, kets)
        return self._purity - float(np.vdot(blocks, blocks).real)


def leaf_weights(tree: MeasurementTree) -> np.ndarray:
    """Per-branch products of squared direction coefficients, shape ``(2^d, 3)``.

    Row ``b`` holds ``prod_k d^{(k)}_j(b)^2`` over the nodes visited by outcome
    string ``b``.
    """
    w = np.ones((1, 3))
    for level in range(tree.depth):
        start = 2**level - 1
        dsq = np.array([direction_coeffs(nd) ** 2 for nd in tree.nodes[start : start + 2**level]])
        # both outcomes of a node scale by the same squared coefficient
        w = np.repeat(w * dsq, 2, axis=0)
    return w


def residual_analytic(s: PauliFamilyState, tree: MeasurementTree) -> float:
    """Closed-form residual ``||rho - chi||^2`` for a family state.

    Each branch carries ``c_j`` times the product of one direction coefficient
    per level, giving
    ``(1/2^N) [sum_j c_j^2 - 2^{1-N} sum_b sum_j c_j^2 w_bj]``.
    """
    if tree.depth != s.n_qubits - 1:
        raise ParameterError(f"tree depth {tree.depth} does not match N-1 = {s.n_qubits - 1}")
    csq = np.square(s.c)
    kept = leaf_weights(tree) @ csq
    total = float(csq.sum())
    return (total - float(kept.sum()) / 2 ** (s.n_qubits - 1)) / 2**s.n_qubits
