"""Command-line front end: ``geodiscord {compute,dynamics,surface,verify}``.

Exit status is 0 on success, 1 on a validation failure and 2 on a usage
error. Floats are written with ``repr`` (shortest round-trip form), so
outputs are exact and byte-stable for equal inputs.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import sys
from typing import Iterator, Optional, Sequence, TextIO

from .discord import OptimizerConfig, closed_form, minimize_numeric
from .dynamics import PhaseFlipParams, sudden_change_time, trajectory
from .family import PauliFamilyState, is_physical, parse_coeffs, to_density_matrix
from .qcore import ParameterError, ValidationError
from .surface import SurfaceGridSpec, surface_points
from .verify import run_verify

EXIT_OK, EXIT_INVALID, EXIT_USAGE = 0, 1, 2
GAP_LIMIT = 1e-5


def fmt(x: float) -> str:
    return repr(float(x))


@contextlib.contextmanager
def _open_out(path: str) -> Iterator[TextIO]:
    if path in ("-", "stdout"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _coeff_arg(text: str):
    try:
        return parse_coeffs(text)
    except ParameterError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _family_state(args) -> PauliFamilyState:
    """Build the state, raising ValidationError with the eigenvalue if unphysical."""
    ok, lam = is_physical(args.n, args.c)
    if not ok and not args.allow_unphysical:
        raise ValidationError(
            f"c={args.c} is unphysical for N={args.n}: smallest eigenvalue {lam:.6g}"
        )
    return PauliFamilyState(args.n, args.c, check=False)


def compute_report(
    n: int, c, mode: str, cfg: OptimizerConfig, allow_unphysical: bool = False
) -> dict:
    s = PauliFamilyState(n, c, check=not allow_unphysical)
    physical = s.physical
    report: dict = {"n": n, "c": list(s.c), "mode": mode, "physical": physical}
    if mode in ("closed", "both"):
        report["closed_form"] = closed_form(s, allow_unphysical=allow_unphysical)
    if mode in ("numeric", "both"):
        res = minimize_numeric(to_density_matrix(s), cfg, validate=physical)
        report.update(
            numeric=res.value,
            converged=res.converged,
            restarts_used=res.restarts_used,
            seed=cfg.seed,
            tree=[list(row) for row in res.arg_tree.to_rows()],
        )
    if mode == "both":
        report["gap"] = abs(report["numeric"] - report["closed_form"])
    return report


def cmd_compute(args) -> int:
    cfg = OptimizerConfig(restarts=args.restarts, seed=args.seed)
    _family_state(args)
    report = compute_report(args.n, args.c, args.mode, cfg, args.allow_unphysical)
    with _open_out(args.out) as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if args.mode == "both" and report["gap"] > GAP_LIMIT:
        print(f"error: closed/numeric gap {report['gap']:.3g} exceeds {GAP_LIMIT}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


def write_dynamics(fh: TextIO, s: PauliFamilyState, params: PhaseFlipParams) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["t", "gamma", "c1_eff", "c2_eff", "c3_eff", "discord"])
    for p in trajectory(s, params):
        w.writerow([fmt(p.t), fmt(p.gamma), *map(fmt, p.c_effective), fmt(p.discord)])
    t0 = sudden_change_time(s, params.tau)
    fh.write(f"# sudden_change_t0={'none' if t0 is None else fmt(t0)}\n")


def cmd_dynamics(args) -> int:
    s = _family_state(args)
    params = PhaseFlipParams(args.tau, args.t_max, args.steps)
    with _open_out(args.out) as fh:
        write_dynamics(fh, s, params)
    return EXIT_OK


def write_surface(fh: TextIO, spec: SurfaceGridSpec) -> int:
    coeffs, discord = surface_points(spec)
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["c1", "c2", "c3", "discord"])
    for c, d in zip(coeffs, discord):
        w.writerow([*map(fmt, c), fmt(d)])
    return len(coeffs)


def cmd_surface(args) -> int:
    spec = SurfaceGridSpec(args.n, args.target, args.band, args.resolution, args.physical_only)
    with _open_out(args.out) as fh:
        write_surface(fh, spec)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.samples < 1:
        raise ParameterError("--samples must be >= 1")
    report, ok = run_verify(args.seed, args.samples)
    with _open_out(args.out) as fh:
        fh.write(report)
    return EXIT_OK if ok else EXIT_INVALID


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="geodiscord", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def state_args(p, n_default=2):
        p.add_argument("--n", type=int, default=n_default, help="number of qubits (>= 2)")
        p.add_argument("--c", type=_coeff_arg, required=True, help="coefficients 'c1,c2,c3'")
        p.add_argument(
            "--allow-unphysical",
            action="store_true",
            help="evaluate formulas on a non-positive coefficient triple instead of failing",
        )

    def out_arg(p):
        p.add_argument("--out", default="stdout", help="output path or 'stdout'")

    p = sub.add_parser("compute", help="closed-form and/or numerical discord of a family state")
    state_args(p)
    p.add_argument("--mode", choices=("closed", "numeric", "both"), default="closed")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=OptimizerConfig.restarts)
    out_arg(p)
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("dynamics", help="discord trajectory under phase flip on qubit 1 (CSV)")
    state_args(p)
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--t-max", type=float, default=4.0)
    p.add_argument("--steps", type=int, default=200)
    out_arg(p)
    p.set_defaults(func=cmd_dynamics)

    p = sub.add_parser("surface", help="level-surface point cloud of closed-form discord (CSV)")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--target", type=float, required=True)
    p.add_argument("--band", type=float, default=0.005)
    p.add_argument("--resolution", type=int, default=81)
    p.add_argument("--physical-only", action="store_true", help="drop non-positive grid points")
    out_arg(p)
    p.set_defaults(func=cmd_surface)

    p = sub.add_parser("verify", help="run the self-check suites")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--samples", type=int, default=100)
    out_arg(p)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ParameterError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
