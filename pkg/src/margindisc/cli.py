"""Command-line front end.

Subcommands::

    baselines   zero-error / zero-abstention success and the critical margin
    curve       success vs global margin for both conditions (CSV/JSON)
    allocate    per-block margins for one global margin (CSV/JSON)
    verify      cross-check closed forms against the numerical oracles

Exit statuses: 0 success, 1 usage error, 2 verification failure, 3 I/O
error.  Output is deterministic: numbers are printed with 12 significant
digits and randomized checks take an explicit ``--seed``.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

import numpy as np

from .allocator import (
    _pinned_grid,
    _success_many,
    allocate_weak,
    build_ladder,
    strong_global,
    weak_success_global,
)
from .known_pair import critical_margin, strong_success, weak_success
from .machine import (
    JordanSpectrum,
    PortConfig,
    global_critical_margin,
    minimum_error_baseline,
    unambiguous_baseline,
)
from .oracle import (
    _MAX_DENSE_QUBITS,
    build_sigma,
    concave_allocate,
    jordan_overlaps_numeric,
    monte_carlo_check,
    povm_scan,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY = 2
EXIT_IO = 3


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad flags; this interface promises 1."""

    def error(self, message: str):  # noqa: D102 - argparse hook
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from exc
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _unit_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from exc
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"expected a value in [0, 1], got {value}")
    return value


def _fmt(x) -> str:
    return format(float(x), ".12g")


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="ascii", newline="") as fh:
            fh.write(text)


def _emit(args, header: list[str], rows: list[list[str]]) -> None:
    """Serialize rows as CSV or as a JSON array of flat objects.

    All cells are pre-formatted numbers, so the JSON text can be assembled
    directly; this keeps the 12-significant-digit policy byte-stable.
    """
    if args.format == "csv":
        text = ",".join(header) + "\n" + "".join(",".join(row) + "\n" for row in rows)
    else:
        body = ",\n".join(
            "  {" + ", ".join(f'"{k}": {v}' for k, v in zip(header, row)) + "}"
            for row in rows
        )
        text = "[\n" + body + "\n]\n"
    _write(args.out, text)


def _cmd_baselines(args) -> int:
    config = PortConfig(args.n, args.nprime)
    spectrum = JordanSpectrum.from_config(config)
    header = ["n", "nprime", "Ps_unambiguous", "Ps_minimum_error", "R_critical"]
    row = [
        str(config.n),
        str(config.nprime),
        _fmt(unambiguous_baseline(config)),
        _fmt(minimum_error_baseline(config)),
        _fmt(global_critical_margin(spectrum)),
    ]
    _emit(args, header, [row])
    return EXIT_OK


def _cmd_curve(args) -> int:
    spectrum = JordanSpectrum.from_config(PortConfig(args.n, args.nprime))
    ladder = build_ladder(spectrum)
    hi = min(1.0, 1.2 * ladder.critical_margin)
    pins = np.concatenate((ladder.breakpoints, ladder.strong_breakpoints))
    grid = _pinned_grid(hi, pins, args.samples)
    weak_vals = _success_many(ladder, grid)
    rows = [
        [_fmt(r), _fmt(w), _fmt(strong_global(spectrum, float(r), ladder=ladder).success)]
        for r, w in zip(grid, weak_vals)
    ]
    _emit(args, ["R", "Ps_weak", "Ps_strong"], rows)
    return EXIT_OK


def _cmd_allocate(args) -> int:
    spectrum = JordanSpectrum.from_config(PortConfig(args.n, args.nprime))
    if args.kind == "weak":
        alloc = allocate_weak(spectrum, args.R)
    else:
        alloc = strong_global(spectrum, args.R)
    header = ["alpha", "c_alpha", "p_alpha", "r_crit", "r_weak", "r_strong", "frozen"]
    rows = [
        [
            str(i + 1),
            _fmt(spectrum.c[i]),
            _fmt(spectrum.p[i]),
            _fmt(spectrum.r_crit[i]),
            _fmt(alloc.r_weak[i]),
            _fmt(alloc.r_strong[i]),
            str(int(frozen)),
        ]
        for i, frozen in enumerate(alloc.frozen)
    ]
    _emit(args, header, rows)
    return EXIT_OK


def _check_allocation_agreement(spectrum, ladder, tol_value, tol_margin):
    grid = np.linspace(0.0, ladder.critical_margin, 50)
    dev_value = 0.0
    dev_margin = 0.0
    for R in grid:
        margins, value = concave_allocate(spectrum, float(R))
        alloc = allocate_weak(spectrum, float(R), ladder=ladder)
        dev_value = max(dev_value, abs(value - alloc.success))
        dev_margin = max(dev_margin, float(np.max(np.abs(margins - alloc.r_weak))))
    ok = dev_value <= tol_value and dev_margin <= tol_margin
    return ok, f"max|dPs|={dev_value:.3e} max|dr|={dev_margin:.3e}"


def _check_scan_agreement(seed, pairs, tol):
    rng = np.random.default_rng(seed)
    dev = 0.0
    for _ in range(pairs):
        c = float(rng.uniform(0.05, 0.95))
        r = float(rng.uniform(0.0, 1.2)) * critical_margin(c)
        _, ps_weak = povm_scan(c, r, "weak")
        _, ps_strong = povm_scan(c, r, "strong")
        dev = max(dev, abs(ps_weak - weak_success(c, r)), abs(ps_strong - strong_success(c, r)))
    return dev <= tol, f"pairs={pairs} max|dPs|={dev:.3e}"


def _check_dense_overlaps(config, spectrum, tol):
    sigma1, sigma2 = build_sigma(config)
    gram = jordan_overlaps_numeric(sigma1, sigma2)
    expected_mult = 2 * np.arange(1, config.blocks + 1) + config.nprime - 1
    if len(gram.block_overlaps) != config.blocks:
        return False, f"found {len(gram.block_overlaps)} blocks, expected {config.blocks}"
    dev = float(np.max(np.abs(gram.overlap_values - spectrum.c)))
    mult_ok = bool(np.array_equal(gram.multiplicities, expected_mult))
    return dev <= tol and mult_ok, f"max|dc|={dev:.3e} multiplicities_ok={mult_ok}"


def _cmd_verify(args) -> int:
    config = PortConfig(args.n, args.nprime)
    spectrum = JordanSpectrum.from_config(config)
    ladder = build_ladder(spectrum)
    tol_value = args.tol if args.tol is not None else 1e-8
    tol_margin = args.tol if args.tol is not None else 1e-6
    tol_scan = args.tol if args.tol is not None else 1e-6
    tol_dense = args.tol if args.tol is not None else 1e-8

    results: list[tuple[str, bool | None, str]] = []
    ok, detail = _check_allocation_agreement(spectrum, ladder, tol_value, tol_margin)
    results.append(("allocation-agreement", ok, detail))
    ok, detail = _check_scan_agreement(args.seed, 20, tol_scan)
    results.append(("scan-agreement", ok, detail))

    if config.total_qubits <= _MAX_DENSE_QUBITS:
        ok, detail = _check_dense_overlaps(config, spectrum, tol_dense)
        results.append(("dense-overlaps", ok, detail))
    elif args.dense:
        print(
            f"error: --dense needs 2n + nprime <= {_MAX_DENSE_QUBITS} qubits, "
            f"got {config.total_qubits}",
            file=sys.stderr,
        )
        return EXIT_USAGE
    else:
        results.append(
            ("dense-overlaps", None, f"needs 2n + nprime <= {_MAX_DENSE_QUBITS} qubits")
        )

    if args.trials is not None:
        R = args.R if args.R is not None else 0.5 * ladder.critical_margin
        result = monte_carlo_check(config, R, args.trials, args.seed)
        target = weak_success_global(spectrum, R, ladder=ladder)
        dev = abs(result.outcome.p_success - target)
        bound = 3.0 * result.stderr_success
        ok = dev <= bound
        results.append(
            (
                "monte-carlo",
                ok,
                f"rng={result.rng} seed={result.seed} trials={result.trials} "
                f"|dPs|={dev:.3e} 3sigma={bound:.3e}",
            )
        )

    failed = False
    for name, ok, detail in results:
        status = "SKIP" if ok is None else ("PASS" if ok else "FAIL")
        print(f"{status} {name} ({detail})")
        failed = failed or ok is False
    return EXIT_VERIFY if failed else EXIT_OK


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="margindisc",
        description="Success probabilities and margin allocations for "
        "programmable two-state discrimination.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--n", type=_positive_int, required=True,
                       help="copies per program port")
        p.add_argument("--nprime", type=_positive_int, required=True,
                       help="copies in the data port")

    def add_output(p: argparse.ArgumentParser) -> None:
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", default=None, help="output path (default: stdout)")

    p = sub.add_parser("baselines", help="print the two baselines and the critical margin")
    add_common(p)
    add_output(p)
    p.set_defaults(func=_cmd_baselines)

    p = sub.add_parser("curve", help="sample both success curves over the margin range")
    add_common(p)
    add_output(p)
    p.add_argument("--samples", type=_positive_int, default=512)
    p.set_defaults(func=_cmd_curve)

    p = sub.add_parser("allocate", help="per-block margins for one global margin")
    add_common(p)
    add_output(p)
    p.add_argument("--R", type=_unit_float, required=True, help="global margin")
    p.add_argument("--kind", choices=("weak", "strong"), default="weak")
    p.set_defaults(func=_cmd_allocate)

    p = sub.add_parser("verify", help="run the numerical cross-checks")
    add_common(p)
    p.add_argument("--R", type=_unit_float, default=None,
                   help="margin for the Monte Carlo check (default: R_c / 2)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=_positive_int, default=None,
                   help="enable the Monte Carlo check with this many pairs")
    p.add_argument("--dense", action="store_true",
                   help="require the dense oracle check (errors beyond the qubit cap)")
    p.add_argument("--tol", type=float, default=None,
                   help="override the per-check agreement tolerances")
    p.set_defaults(func=_cmd_verify)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, OverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
