"""Command-line surface: eval, sweep, figure, verify, twirl.

Exit codes: 0 success / all checks pass, 1 usage error, 2 verification
failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import measures, oracle, states
from .spin_algebra import HALF, Spin
from .states import DensityMatrix

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY = 2
EXIT_IO = 3

_SIG_DIGITS = 12


class UsageError(Exception):
    pass


def _fmt(x: float) -> str:
    return f"{x:.{_SIG_DIGITS}g}"


def _parse_spin(text: str) -> Spin:
    try:
        return Spin.parse(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"invalid spin {text!r}: {exc}") from exc


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise UsageError(f"invalid number list {text!r}") from exc


def _parse_p(text: str) -> float:
    try:
        # accept fractions like 6/7 for exact thresholds
        if "/" in text:
            num, den = text.split("/")
            p = float(num) / float(den)
        else:
            p = float(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"invalid p {text!r}") from exc
    if not 0.0 <= p <= 1.0:
        raise UsageError(f"p must lie in [0, 1], got {p}")
    return p


def state_to_json(rho: DensityMatrix) -> dict:
    data = [[float(z.real), float(z.imag)] for z in rho.data.ravel()]
    return {"dims": [rho.dim_a, rho.dim_b], "data": data}


def state_from_json(obj: dict) -> DensityMatrix:
    try:
        dim_a, dim_b = (int(d) for d in obj["dims"])
        pairs = obj["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed state file: missing or bad field ({exc})") from exc
    d = dim_a * dim_b
    if len(pairs) != d * d:
        raise UsageError(
            f"malformed state file: expected {d * d} entries, got {len(pairs)}"
        )
    flat = np.empty(d * d, dtype=complex)
    for k, pair in enumerate(pairs):
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise UsageError(f"malformed state file: entry {k} is not a [re, im] pair")
        flat[k] = complex(pair[0], pair[1])
    try:
        return DensityMatrix(dim_a, dim_b, flat.reshape(d, d))
    except ValueError as exc:
        raise UsageError(f"state file fails density-matrix validation: {exc}") from exc


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise IOError(f"cannot write {path}: {exc}") from exc


def _convert(value: float, kind: measures.MeasureKind, bits: bool) -> float:
    # only entropic measures carry units
    if bits and kind in (measures.MeasureKind.EOF, measures.MeasureKind.EPSILON):
        return value / math.log(2)
    return value


def cmd_eval(args) -> int:
    j = _parse_spin(args.j)
    p = _parse_p(args.p)
    kinds = [measures.parse_measure_kind(m) for m in args.measure.split(",")]
    try:
        reports = [measures.evaluate(k, j, p) for k in kinds]
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.format == "json":
        payload = [
            {
                "measure": r.kind.value,
                "j": str(r.j),
                "p": r.p,
                "value": _convert(r.value, r.kind, args.bits),
                "units": "bits" if args.bits else "nats",
                "method": r.method,
            }
            for r in reports
        ]
        text = json.dumps(payload, indent=2) + "\n"
    else:
        lines = [f"{'measure':<14} value"]
        for r in reports:
            lines.append(f"{r.kind.value:<14} {_fmt(_convert(r.value, r.kind, args.bits))}")
        text = "\n".join(lines) + "\n"
    if args.out:
        _write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _sweep_rows(j: Spin, p_grid, kinds, bits):
    rows = []
    for p in p_grid:
        vals = [_convert(measures.evaluate(k, j, float(p)).value, k, bits) for k in kinds]
        rows.append((float(p), vals))
    return rows


def cmd_sweep(args) -> int:
    j = _parse_spin(args.j)
    if not (0.0 <= args.p_min <= args.p_max <= 1.0):
        raise UsageError("need 0 <= p-min <= p-max <= 1")
    if args.steps < 2:
        raise UsageError("steps must be >= 2")
    kinds = [measures.parse_measure_kind(m) for m in args.measures.split(",")]
    p_grid = np.linspace(args.p_min, args.p_max, args.steps)
    rows = _sweep_rows(j, p_grid, kinds, args.bits)
    header = "p," + ",".join(k.value for k in kinds)
    lines = [header]
    for p, vals in rows:
        lines.append(",".join([_fmt(p)] + [_fmt(v) for v in vals]))
    _write_text(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


FIGURE_SPINS = [Spin(1), Spin(2), Spin(6)]  # j = 1/2, 1, 3
FIGURE1_POINTS = 400
FIGURE1_EDGE = 1e-4


def figure1_grid(j: Spin) -> np.ndarray:
    """400 points in (threshold, 1 - 1e-4], log-spaced toward p = 1."""
    thr = states.separability_threshold(j)
    gap = np.geomspace(1.0 - thr, FIGURE1_EDGE, FIGURE1_POINTS + 1)[1:]
    return 1.0 - gap


def cmd_figure(args) -> int:
    if args.which == 1:
        # shared grid anchored at the smallest threshold (j = 1/2)
        p_grid = figure1_grid(Spin(1))
        cols = []
        for j in FIGURE_SPINS:
            thr = states.separability_threshold(j)
            col = []
            for p in p_grid:
                if p <= thr:
                    col.append("")
                else:
                    col.append(_fmt(math.log(measures.epsilon_second_derivative(j, float(p)))))
            cols.append(col)
        header = "p," + ",".join(f"log_epsilon_pp_j_{j}".replace("/", "_") for j in FIGURE_SPINS)
        lines = [header]
        for i, p in enumerate(p_grid):
            lines.append(",".join([_fmt(float(p))] + [c[i] for c in cols]))
    else:
        p_grid = np.linspace(0.0, 1.0, 401)
        header = "p," + ",".join(f"eof_j_{j}".replace("/", "_") for j in FIGURE_SPINS)
        lines = [header]
        for p in p_grid:
            vals = [measures.eof(j, float(p)) for j in FIGURE_SPINS]
            lines.append(",".join([_fmt(float(p))] + [_fmt(v) for v in vals]))
    _write_text(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


_VERIFY_TOL = {"roof": 1e-3, "eof": 1e-3, "epsilon": 1e-4, "pmu": 1e-5}
_BELOW_THRESHOLD_TOL = 1e-6
_LOWER_SLACK = 1e-9


def cmd_verify(args) -> int:
    j = _parse_spin(args.j)
    cfg = oracle.OptimizerConfig(restarts=args.restarts, seed=args.seed)
    tol = args.tol if args.tol is not None else _VERIFY_TOL[args.target]
    records = []
    all_pass = True

    if args.target == "pmu":
        if not args.mu:
            raise UsageError("--target pmu requires --mu")
        for mu in _parse_floats(args.mu):
            closed = measures.p_mu(j, mu)
            res = oracle.max_p_mu_over_u(j, mu, cfg)
            gap = closed - res.value
            ok = res.value <= closed + _LOWER_SLACK and gap <= tol
            all_pass &= ok
            records.append({
                "j": str(j), "mu": mu, "closed_form": closed,
                "oracle_value": res.value, "gap": gap, "pass": ok,
                "converged": res.converged, "iterations": res.iterations,
            })
    else:
        if not args.p:
            raise UsageError(f"--target {args.target} requires --p")
        for p in [_parse_p(tok) for tok in args.p.split(",")]:
            if args.target in ("roof", "eof"):
                closed = measures.eof(j, p)
                res = oracle.convex_roof_numeric(states.rho_p(j, p), "entropy", None, cfg)
            else:
                closed = measures.epsilon(j, p)
                res = oracle.min_epsilon_numeric(j, p, cfg)
            gap = res.value - closed
            if closed == 0.0:
                ok = -_LOWER_SLACK <= res.value <= _BELOW_THRESHOLD_TOL
            else:
                ok = -_LOWER_SLACK <= gap <= tol
            all_pass &= ok
            records.append({
                "j": str(j), "p": p, "closed_form": closed,
                "oracle_value": res.value, "gap": gap, "pass": ok,
                "converged": res.converged, "iterations": res.iterations,
            })

    report = {"target": args.target, "tolerance": tol, "all_pass": all_pass,
              "records": records}
    text = json.dumps(report, indent=2) + "\n"
    if args.out:
        _write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if all_pass else EXIT_VERIFY


def _build_input_state(args) -> tuple[DensityMatrix, Spin, Spin]:
    if args.input:
        try:
            with open(args.input) as fh:
                obj = json.load(fh)
        except OSError as exc:
            raise IOError(f"cannot read {args.input}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise UsageError(f"malformed state file {args.input}: {exc}") from exc
        rho = state_from_json(obj)
        j1 = _parse_spin(args.j1) if args.j1 else Spin(rho.dim_a - 1)
        j2 = _parse_spin(args.j2) if args.j2 else Spin(rho.dim_b - 1)
        return rho, j1, j2
    if not args.builder:
        raise UsageError("twirl requires --input FILE or --builder NAME")
    name = args.builder
    if name == "rho_p":
        j = _parse_spin(args.j)
        rho = states.rho_p(j, _parse_p(args.p))
        return rho, j, HALF
    if name == "chi":
        j = _parse_spin(args.j)
        if args.mu is None:
            raise UsageError("builder chi requires --mu")
        return states.chi_state(j, float(args.mu)).density(), j, HALF
    if name == "phi":
        j = _parse_spin(args.j)
        if args.nu is None:
            raise UsageError("builder phi requires --nu")
        return states.phi_product_state(j, float(args.nu)).density(), j, HALF
    if name == "random":
        j1 = _parse_spin(args.j1) if args.j1 else _parse_spin(args.j)
        j2 = _parse_spin(args.j2) if args.j2 else HALF
        rng = np.random.default_rng(args.seed)
        return states.random_density_matrix(j1.dim, j2.dim, rng), j1, j2
    raise UsageError(f"unknown builder {name!r}; known: rho_p, chi, phi, random")


def cmd_twirl(args) -> int:
    sigma, j1, j2 = _build_input_state(args)
    exact = states.twirl_exact(sigma, j1, j2)
    overlaps = states.subspace_overlaps(sigma, j1, j2)
    summary = {
        "j1": str(j1),
        "j2": str(j2),
        "overlaps_p_J": {f"{J:g}": p for J, p in sorted(overlaps.items())},
        "input_to_exact_trace_distance": states.trace_distance(sigma.data, exact.data),
    }
    if args.samples > 0:
        _, dist = states.twirl_monte_carlo(sigma, j1, j2, args.samples, args.seed)
        summary["monte_carlo"] = {"samples": args.samples, "seed": args.seed,
                                  "trace_distance_to_exact": dist}
    if args.out:
        _write_text(args.out, json.dumps(state_to_json(exact)) + "\n")
        summary["out"] = args.out
    if args.format == "json":
        sys.stdout.write(json.dumps(summary, indent=2) + "\n")
    else:
        for J, p in sorted(overlaps.items()):
            sys.stdout.write(f"p_J(J={J:g}) = {_fmt(p)}\n")
        if "monte_carlo" in summary:
            mc = summary["monte_carlo"]
            sys.stdout.write(
                f"monte carlo ({mc['samples']} samples): trace distance to exact = "
                f"{_fmt(mc['trace_distance_to_exact'])}\n"
            )
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rotsym",
                     description="Entanglement measures of rotationally symmetric "
                                 "spin-j x spin-1/2 states")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp):
        sp.add_argument("--bits", action="store_true",
                        help="report entropic values in bits instead of nats")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--tol", type=float, default=None)
        sp.add_argument("--out", default=None)
        sp.add_argument("--format", choices=["csv", "json", "table"], default="table")

    p_eval = sub.add_parser("eval", help="closed-form measures at one (j, p)")
    p_eval.add_argument("--j", required=True)
    p_eval.add_argument("--p", required=True)
    p_eval.add_argument("--measure", required=True,
                        help="comma-separated: eof,epsilon,concurrence,tangle,"
                             "negativity,crnegativity")
    add_common(p_eval)
    p_eval.set_defaults(func=cmd_eval)

    p_sweep = sub.add_parser("sweep", help="uniform p-grid of measures to CSV")
    p_sweep.add_argument("--j", required=True)
    p_sweep.add_argument("--p-min", type=float, default=0.0)
    p_sweep.add_argument("--p-max", type=float, default=1.0)
    p_sweep.add_argument("--steps", type=int, default=101)
    p_sweep.add_argument("--measures", required=True)
    add_common(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)

    p_fig = sub.add_parser("figure", help="emit data for figure 1 or 2")
    p_fig.add_argument("--which", type=int, choices=[1, 2], required=True)
    add_common(p_fig)
    p_fig.set_defaults(func=cmd_figure)

    p_verify = sub.add_parser("verify", help="closed form vs brute-force oracle")
    p_verify.add_argument("--j", required=True)
    p_verify.add_argument("--p", default=None, help="comma-separated p values")
    p_verify.add_argument("--mu", default=None, help="comma-separated mu values (pmu)")
    p_verify.add_argument("--target", choices=["eof", "epsilon", "roof", "pmu"],
                          required=True)
    p_verify.add_argument("--restarts", type=int, default=6)
    add_common(p_verify)
    p_verify.set_defaults(func=cmd_verify)

    p_twirl = sub.add_parser("twirl", help="exact and Monte Carlo twirling")
    p_twirl.add_argument("--input", default=None, help="state file (JSON)")
    p_twirl.add_argument("--builder", default=None,
                         help="rho_p | chi | phi | random")
    p_twirl.add_argument("--j", default="1/2")
    p_twirl.add_argument("--p", default="0.5")
    p_twirl.add_argument("--mu", type=float, default=None)
    p_twirl.add_argument("--nu", type=float, default=None)
    p_twirl.add_argument("--j1", default=None)
    p_twirl.add_argument("--j2", default=None)
    p_twirl.add_argument("--samples", type=int, default=0)
    add_common(p_twirl)
    p_twirl.set_defaults(func=cmd_twirl)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IOError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
