"""Self-check suites run by ``geodiscord verify``.

Each suite draws its own random cases from a generator seeded by
``(seed, suite index)`` and returns ``(passed, total)``. Reports contain no
timing or platform data, so equal seeds give byte-identical output.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .discord import OptimizerConfig, closed_form, minimize_numeric
from .dynamics import (
    PhaseFlipParams,
    detect_sudden_change,
    phase_flip_kraus,
    sudden_change_time,
    trajectory,
)
from .family import coefficients_of, random_family_state, to_density_matrix
from .measurement import (
    MeasurementNode,
    MeasurementTree,
    apply_chain,
    direction_coeffs,
    residual_analytic,
)
from .qcore import apply_kraus, hs_distance_sq

QUBIT_COUNTS = (2, 3, 4)


def oracle_suite(rng: np.random.Generator, samples: int) -> tuple[int, int]:
    """Analytic residual against the explicit post-measurement matrix."""
    passed = total = 0
    for n in QUBIT_COUNTS:
        for _ in range(samples):
            s = random_family_state(n, rng)
            tree = MeasurementTree.random(n - 1, rng)
            rho = to_density_matrix(s)
            explicit = hs_distance_sq(rho, apply_chain(rho, tree).chi)
            total += 1
            passed += abs(residual_analytic(s, tree) - explicit) <= 1e-10
    return passed, total


def optimizer_suite(rng: np.random.Generator, samples: int) -> tuple[int, int]:
    """Numerical minimum against the closed form on a subsample."""
    passed = total = 0
    count = max(1, samples // 20)
    for n in QUBIT_COUNTS:
        for _ in range(count):
            s = random_family_state(n, rng)
            cfg = OptimizerConfig(restarts=4, seed=int(rng.integers(2**63)))
            res = minimize_numeric(to_density_matrix(s), cfg)
            total += 1
            passed += abs(res.value - closed_form(s)) <= 1e-6
    return passed, total


def invariant_suite(rng: np.random.Generator, samples: int) -> tuple[int, int]:
    passed = total = 0
    for v in rng.standard_normal((samples, 4)):
        d = direction_coeffs(MeasurementNode.from_vector(v))
        total += 1
        passed += abs(float(d @ d) - 1.0) <= 1e-12
    for n in QUBIT_COUNTS:
        for _ in range(max(1, samples // 10)):
            s = random_family_state(n, rng)
            tree = MeasurementTree.random(n - 1, rng)
            post = apply_chain(to_density_matrix(s), tree)
            probs = np.array(post.branch_probabilities)
            again = apply_chain(post.chi, tree).chi
            gamma = float(rng.uniform())
            out = apply_kraus(to_density_matrix(s), phase_flip_kraus(n, gamma))
            checks = [
                abs(probs.sum() - 1.0) <= 1e-12,
                np.max(np.abs(probs - 2.0 ** (1 - n))) <= 1e-12,
                np.max(np.abs(again - post.chi)) <= 1e-10,
                abs(np.trace(out) - 1.0) <= 1e-12,
            ]
            total += len(checks)
            passed += sum(bool(x) for x in checks)
    return passed, total


def dynamics_suite(rng: np.random.Generator, samples: int) -> tuple[int, int]:
    """Channel/coefficient agreement and kink detection against the predicted time."""
    passed = total = 0
    for i in range(samples):
        n = QUBIT_COUNTS[i % len(QUBIT_COUNTS)]
        s = random_family_state(n, rng)
        gamma = float(rng.uniform())
        out = apply_kraus(to_density_matrix(s), phase_flip_kraus(n, gamma))
        expected = (gamma * s.c[0], gamma * s.c[1], s.c[2])
        total += 1
        passed += np.max(np.abs(np.subtract(coefficients_of(out), expected))) <= 1e-12

        tau = float(rng.uniform(0.5, 2.0))
        params = PhaseFlipParams(tau, 4.0, 200)
        t0 = sudden_change_time(s, tau)
        found = detect_sudden_change(trajectory(s, params))
        if t0 is not None and min(abs(t0), abs(t0 - params.t_max)) < 0.1:
            continue  # kink too close to the window edge to resolve
        if t0 is not None and 0.0 < t0 < params.t_max:
            if abs(s.c[2]) < 0.1:
                continue  # slope jump tau c3^2 / 2^N too weak to score
            total += 1
            passed += found is not None and abs(found - t0) <= 1e-3
        else:
            total += 1
            passed += found is None
    return passed, total


SUITES: list[tuple[str, Callable[[np.random.Generator, int], tuple[int, int]]]] = [
    ("oracle", oracle_suite),
    ("optimizer", optimizer_suite),
    ("invariants", invariant_suite),
    ("dynamics", dynamics_suite),
]


def run_verify(seed: int, samples: int) -> tuple[str, bool]:
    """Run every suite and return ``(csv_report, all_passed)``."""
    lines = [f"# geodiscord verify seed={seed} samples={samples}", "suite,passed,total"]
    ok = True
    for idx, (name, suite) in enumerate(SUITES):
        rng = np.random.default_rng([seed, idx])
        passed, total = suite(rng, samples)
        ok &= passed == total
        lines.append(f"{name},{passed},{total}")
    lines.append(f"# result={'PASS' if ok else 'FAIL'}")
    return "\n".join(lines) + "\n", ok
