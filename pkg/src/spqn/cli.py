"""``spqn`` command line: table reproduction, optimization, sweeps, thresholds.

Exit codes: 0 success, 1 invalid input or I/O failure, 2 no violation or no
numerical convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from typing import Optional, Sequence

import numpy as np

from .exceptions import ConvergenceError, NoViolationError, SpqnError
from .optimizer import OptimizationResult, OptimizerConfig, optimize_scenario
from .robustness import find_threshold, sweep
from .scenario import (
    PATTERNS,
    SLOT_NAMES,
    VARIANTS,
    get_scenario,
    pack_params,
    scenario_evaluate,
    unpack_params,
)
from .validation import check_efficiency, check_positive_int

logger = logging.getLogger("spqn")

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NUMERIC = 2

# (row id, scenario, variant, reported value or None for "<= 2")
TABLE1_ROWS = [
    ("4h", "4h", "do", None),
    ("3h-sdo", "3h", "sdo", None),
    ("2h-i-do", "2h-i", "do", None),
    ("2h-i-sdo", "2h-i", "sdo", 2.126),
    ("2h-ii-do", "2h-ii", "do", 2.166),
    ("2h-ii-sdo", "2h-ii", "sdo", 2.231),
    ("1h-do", "1h", "do", 2.543),
    ("1h-sdo", "1h", "sdo", 2.557),
    ("0h-do", "0h", "do", 2.688),
    ("0h-sdo", "0h", "sdo", 2.782),
]

_ONOFF_TEXT = {"do": "On-off with D", "sdo": "On-off with D & S", "squeeze-only": "On-off with S"}


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_INPUT):
        super().__init__(message)
        self.code = code


def fmt(x: float) -> str:
    """Twelve significant digits, used for every CSV number."""
    return f"{x:.12g}"


def slot_description(scenario_name: str, variant: str, party: str) -> str:
    pattern = PATTERNS[scenario_name]
    kinds = pattern[:2] if party == "A" else pattern[2:]
    return ", ".join("HD" if k == "H" else _ONOFF_TEXT[variant] for k in kinds)


def _config(args, restarts: Optional[int] = None) -> OptimizerConfig:
    return OptimizerConfig(
        restarts=check_positive_int(args.restarts if restarts is None else restarts, "restarts", minimum=0),
        seed=int(args.seed),
        cutoff=check_positive_int(args.cutoff, "cutoff", minimum=2),
        n_jobs=args.jobs,
    )


def _emit(text: str, out: Optional[str]) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(f"cannot write {out}: {exc}") from None


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _restart_summary(res: OptimizationResult) -> dict:
    s = np.asarray(res.per_restart_S)
    finite = s[np.isfinite(s)]
    return {
        "starts": len(s),
        "best_start": res.start_labels[res.best_index],
        "max": float(finite.max()),
        "median": float(np.median(finite)),
        "min": float(finite.min()),
        "above_2": int(np.sum(finite > 2.0)),
        "failures": len(res.failures),
    }


def result_to_dict(res: OptimizationResult) -> dict:
    sc = get_scenario(res.scenario, res.variant)
    return {
        "scenario": res.scenario,
        "variant": res.variant,
        "eta": res.eta,
        "p": res.p,
        "seed": res.seed,
        "cutoff": res.cutoff,
        "best_S": res.best_S,
        "best_params": unpack_params(sc, res.best_params),
        "per_restart_summary": _restart_summary(res),
    }


def cmd_table1(args) -> int:
    config = _config(args)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["row_id", "alice_slots", "bob_slots", "variant", "S_max", "paper_S"])
    for row_id, name, variant, reported in TABLE1_ROWS:
        res = optimize_scenario(get_scenario(name, variant), 1.0, 1.0, config)
        logger.info("%s: S = %.6f", row_id, res.best_S)
        w.writerow([
            row_id,
            slot_description(name, variant, "A"),
            slot_description(name, variant, "B"),
            variant,
            fmt(res.best_S),
            "<=2" if reported is None else fmt(reported),
        ])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_optimize(args) -> int:
    sc = get_scenario(args.scenario, args.variant)
    eta = check_efficiency(args.eta, "eta")
    p = check_efficiency(args.p, "p", allow_zero=True)
    res = optimize_scenario(sc, eta, p, _config(args))
    data = result_to_dict(res)
    if args.format == "json":
        _emit(_json(data), args.out)
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        labels = [f"{slot}.{label}" for slot, label in sc.labels]
        w.writerow(["scenario", "variant", "eta", "p", "best_S"] + labels)
        w.writerow([res.scenario, res.variant, fmt(eta), fmt(p), fmt(res.best_S)] + [fmt(v) for v in res.best_params])
        _emit(buf.getvalue(), args.out)
    return EXIT_OK


def _axis(lo: float, hi: float, steps: int, name: str) -> list[float]:
    steps = check_positive_int(steps, f"{name} steps")
    check_efficiency(lo, f"{name} min")
    check_efficiency(hi, f"{name} max")
    if steps == 1:
        return [float(hi)]
    if not lo < hi:
        raise CliError(f"{name} min must be below {name} max")
    return [float(v) for v in np.linspace(lo, hi, steps)]


def cmd_sweep(args) -> int:
    sc = get_scenario(args.scenario, args.variant)
    etas = _axis(args.eta_min, args.eta_max, args.eta_steps, "eta")
    ps = _axis(args.p_min, args.p_max, args.p_steps, "p")
    grid = sweep(sc, etas, ps, _config(args), fresh_restarts=args.fresh_restarts)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["eta", "p", "s_max"] + [f"{slot}.{label}" for slot, label in sc.labels])
    for eta, p, s, x in grid.rows():
        w.writerow([fmt(eta), fmt(p), fmt(s)] + [fmt(v) for v in x])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_threshold(args) -> int:
    sc = get_scenario(args.scenario, args.variant)
    t = find_threshold(sc, args.axis, _config(args), fresh_restarts=args.fresh_restarts)
    _emit(_json(t.as_dict()), args.out)
    return EXIT_OK


def load_params(path: str, scenario) -> np.ndarray:
    """Parameter vector from a JSON file.

    Accepts the structured form ``{"A1": {"alpha_re": ...}, ...}``, the same
    mapping under a ``best_params`` or ``params`` key (e.g. ``optimize``
    output), or a flat list in layout order.
    """
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read parameters from {path}: {exc}") from None
    if isinstance(data, dict):
        for key in ("best_params", "params"):
            if key in data:
                data = data[key]
                break
    if isinstance(data, list):
        from .scenario import _check_layout

        return _check_layout(scenario, data)
    if not isinstance(data, dict):
        raise CliError("parameter file must hold a JSON object or list")
    structured = {slot: d for slot, d in data.items() if slot in SLOT_NAMES and d}
    return pack_params(scenario, structured)


def cmd_eval(args) -> int:
    sc = get_scenario(args.scenario, args.variant)
    eta = check_efficiency(args.eta, "eta")
    p = check_efficiency(args.p, "p", allow_zero=True)
    x = load_params(args.params, sc)
    s = scenario_evaluate(sc, x, eta, p)
    _emit(f"{s:.10g}\n", args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spqn",
        description="CHSH tests of a single-photon entangled state with Gaussian-assisted on-off and homodyne detection.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, scenario=True, restarts=200):
        if scenario:
            p.add_argument("--scenario", required=True, choices=list(PATTERNS))
            p.add_argument("--variant", default="sdo", choices=list(VARIANTS))
        p.add_argument("--restarts", type=int, default=restarts, help="random starts (default %(default)s)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--cutoff", type=int, default=40, help="starting Fock cutoff")
        p.add_argument("--jobs", type=int, default=None, help="worker processes (default: SPQN_THREADS or CPU count)")
        p.add_argument("--out", default=None, help="output file (default stdout)")

    p = sub.add_parser("table1", help="maximize all ten catalog rows at eta = p = 1")
    common(p, scenario=False)
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("optimize", help="maximize S for one scenario")
    common(p)
    p.add_argument("--eta", type=float, default=1.0)
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("sweep", help="maximize S on an (eta, p) grid")
    common(p)
    for name in ("eta", "p"):
        p.add_argument(f"--{name}-min", type=float, default=0.7)
        p.add_argument(f"--{name}-max", type=float, default=1.0)
        p.add_argument(f"--{name}-steps", type=int, default=7)
    p.add_argument("--fresh-restarts", type=int, default=50, help="random starts per grid point after the first")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("threshold", help="efficiency at which max S drops to 2 (other axis at 1)")
    common(p)
    p.add_argument("--axis", required=True, choices=["eta", "p"])
    p.add_argument("--fresh-restarts", type=int, default=20, help="random starts per bisection point")
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("eval", help="evaluate S for a parameter file")
    p.add_argument("--scenario", required=True, choices=list(PATTERNS))
    p.add_argument("--variant", default="sdo", choices=list(VARIANTS))
    p.add_argument("--params", required=True, help="JSON parameter file")
    p.add_argument("--eta", type=float, default=1.0)
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors; map to the input-error code
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (NoViolationError, ConvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (SpqnError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
