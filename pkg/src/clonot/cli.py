"""Batch verification front end.

Examples::

    clonot relation --n 1 --m 2 --samples 1000 --seed 7
    clonot optimal --n 1-3 --m 2-6 --format json
    clonot equivalence --copies 2 --samples 100 --seed 3
    clonot sweep --n 1-4 --m 2-12 --samples 200 --output sweep.csv
    clonot ledger --n 1 --m 2-5 --reservoir 10

Exit status: 0 when every row is within tolerance, 1 when a check fails,
2 on a usage error.  ``CLONOT_OUTPUT_DIR`` is the base directory for
relative ``--output`` paths.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterator, Optional, TextIO

import numpy as np

from . import cloning_machine as cm
from . import conservation as cons
from . import fock_algebra as fa
from . import universal_machines as um

COMMANDS = ("relation", "optimal", "equivalence", "sweep", "ledger")
COLUMNS = ("command", "N", "M", "a", "sample", "quantity", "value", "expected", "deviation", "pass")
OUTPUT_DIR_ENV = "CLONOT_OUTPUT_DIR"
EXACT_TOL = 1e-12
DEFAULT_TOL = 1e-9


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    n_values: tuple[int, ...] = (1,)
    m_values: tuple[int, ...] = (2,)
    copies: tuple[int, ...] = (2,)
    samples: int = 100
    seed: int = 0
    tolerance: Optional[float] = None
    format: str = "csv"
    reservoir: Optional[int] = None

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.format not in ("csv", "json"):
            raise UsageError(f"unknown format {self.format!r}")
        if self.tolerance is not None and not self.tolerance > 0:
            raise UsageError("tolerance must be positive")
        if self.samples < 1:
            raise UsageError("samples must be positive")
        if not 0 <= self.seed < 2**64:
            raise UsageError("seed must be a 64-bit unsigned integer")
        if self.command == "equivalence":
            if not self.copies or min(self.copies) < 1:
                raise UsageError("copies must be a non-empty range of positive integers")
        elif not self.pairs():
            raise UsageError(f"no (N, M) pair with 1 <= N < M in N={self.n_values}, M={self.m_values}")
        if self.command == "optimal" and max(m for _, m in self.pairs()) > um.MAX_CLONES:
            raise UsageError(f"optimal needs M <= {um.MAX_CLONES}")

    def pairs(self) -> list[tuple[int, int]]:
        return sorted((n, m) for n in set(self.n_values) for m in set(self.m_values) if 1 <= n < m)

    def tol(self, exact: bool) -> float:
        if self.tolerance is not None:
            return self.tolerance
        return EXACT_TOL if exact else DEFAULT_TOL


def _row(cfg: RunConfig, quantity: str, value, expected, *, exact: bool, N="", M="", a="", sample="") -> dict:
    deviation = value - expected
    return {
        "command": cfg.command, "N": N, "M": M, "a": a, "sample": sample, "quantity": quantity,
        "value": value, "expected": expected, "deviation": deviation,
        "pass": bool(abs(deviation) <= cfg.tol(exact)),
    }


def _rng(cfg: RunConfig, *cell: int) -> np.random.Generator:
    # one stream per cell, so rows do not depend on the order cells are run
    return np.random.default_rng([cfg.seed, *cell])


def relation_rows(cfg: RunConfig, N: int, M: int) -> Iterator[dict]:
    probs = cm.random_distributions(_rng(cfg, N, M), N, M, cfg.samples)
    f_clone, f_not = cm.fidelities_batch(probs, N, M)
    for i in range(cfg.samples):
        yield _row(cfg, "relation", float((M - N) * f_not[i]), float(M * f_clone[i] - N),
                   exact=True, N=N, M=M, sample=i)


def optimal_rows(cfg: RunConfig, N: int, M: int) -> Iterator[dict]:
    expected_clone = um.optimal_clone_fidelity(N, M)
    expected_not = um.optimal_not_fidelity(N)
    if M <= um.MAX_CLONES:
        zero = np.array([1.0, 0.0])
        rho = um.projection_cloner(N, M, zero)
        dist = um.zeros_distribution(rho, cons.CloneSpec.canonical(N, M))
        yield _row(cfg, "f_clone", um.single_copy_fidelity(rho, zero), expected_clone, exact=False, N=N, M=M)
        yield _row(cfg, "f_not", cm.fidelity_not(dist), expected_not, exact=False, N=N, M=M)
    yield _row(cfg, "f_not_from_relation", cm.not_from_clone(expected_clone, N, M), expected_not,
               exact=True, N=N, M=M)


def equivalence_rows(cfg: RunConfig, copies: int) -> Iterator[dict]:
    rng = _rng(cfg, copies)
    for i in range(cfg.samples):
        q = fa.random_qubit(rng)
        yield _row(cfg, "overlap", fa.equivalence_overlap(q, copies), 1.0, exact=True, N=1, M=copies, sample=i)


def sweep_rows(cfg: RunConfig, N: int, M: int) -> Iterator[dict]:
    probs = cm.random_distributions(_rng(cfg, N, M), N, M, cfg.samples)
    f_clone, f_not = cm.fidelities_batch(probs, N, M)
    residual = (M - N) * f_not - (M * f_clone - N)
    yield _row(cfg, "max_abs_relation_residual", float(np.abs(residual).max()), 0.0, exact=True, N=N, M=M)
    violations = int(np.count_nonzero(f_not > f_clone + EXACT_TOL))
    yield _row(cfg, "not_exceeds_clone_count", violations, 0, exact=True, N=N, M=M)
    yield from optimal_rows(cfg, N, M)


def ledger_rows(cfg: RunConfig, N: int, M: int) -> Iterator[dict]:
    L = cfg.reservoir if cfg.reservoir is not None else M
    try:
        spec = cons.CloneSpec.canonical(N, M, L)
    except cons.ReservoirExhausted as exc:
        raise UsageError(str(exc)) from exc
    for a in spec.a_range:
        b = M - a
        if not cons.check_constraint(a, b, spec):
            raise AssertionError(f"b = M - a fails the balance at a={a}")
        yield _row(cfg, "angular_momentum_balance", 2 * (a + b), N + spec.K + M, exact=True, N=N, M=M, a=a)
    emission = cons.validate_emission_ledger(spec.L, spec.Lprime, N, M)
    yield _row(cfg, "excitations", emission.n_out, emission.n_in, exact=True, N=N, M=M)
    rng = _rng(cfg, N, M)
    state_in = cm.input_state(N, L)
    for i in range(cfg.samples):
        out = cm.build_output_state(cm.CoefficientVector.random(spec, rng), L)
        report = cons.audit(state_in, out)
        j_out = report.j_out if report.j_out is not None else float("nan")
        n_out = report.n_out if report.n_out is not None else float("nan")
        yield _row(cfg, "audit_angular_momentum", j_out, report.j_in, exact=True, N=N, M=M, sample=i)
        yield _row(cfg, "audit_particles", n_out, report.n_in, exact=True, N=N, M=M, sample=i)


def iter_rows(cfg: RunConfig) -> Iterator[dict]:
    if cfg.command == "equivalence":
        for copies in sorted(set(cfg.copies)):
            yield from equivalence_rows(cfg, copies)
        return
    producer = {
        "relation": relation_rows,
        "optimal": optimal_rows,
        "sweep": sweep_rows,
        "ledger": ledger_rows,
    }[cfg.command]
    for N, M in cfg.pairs():
        yield from producer(cfg, N, M)


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_report(cfg: RunConfig, rows: list[dict], stream: TextIO) -> None:
    if cfg.format == "json":
        doc = {"config": asdict(cfg), "passed": all(r["pass"] for r in rows), "rows": rows}
        json.dump(doc, stream, indent=1)
        stream.write("\n")
        return
    tol = "default" if cfg.tolerance is None else repr(cfg.tolerance)
    stream.write(f"# clonot {cfg.command} seed={cfg.seed} tolerance={tol} samples={cfg.samples}\n")
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(COLUMNS)
    for r in rows:
        writer.writerow([_fmt(r[c]) for c in COLUMNS])


def run(cfg: RunConfig, stream: TextIO) -> int:
    """Run one verification and write its report; returns the exit status."""
    rows = list(iter_rows(cfg))
    write_report(cfg, rows, stream)
    return 0 if all(r["pass"] for r in rows) else 1


def parse_range(text: str) -> tuple[int, ...]:
    """``"3"``, ``"1-5"`` or ``"1,2,7"`` (pieces may be combined)."""
    values: list[int] = []
    try:
        for piece in text.split(","):
            lo, sep, hi = piece.strip().partition("-")
            if sep:
                values.extend(range(int(lo), int(hi) + 1))
            else:
                values.append(int(lo))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return tuple(values)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="clonot", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        if name == "equivalence":
            p.add_argument("--copies", type=parse_range, default=(2,))
        else:
            p.add_argument("--n", type=parse_range, default=(1,))
            p.add_argument("--m", type=parse_range, default=(2,))
        p.add_argument("--samples", type=int, default=100)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tolerance", type=float, default=None,
                       help="override the per-check tolerance (1e-12 exact identities, 1e-9 otherwise)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--output", default="-", help=f"file path, or - for stdout; relative to ${OUTPUT_DIR_ENV} if set")
        if name == "ledger":
            p.add_argument("--reservoir", type=int, default=None, help="initial reservoir pairs L (default M)")
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    kw = dict(command=args.command, samples=args.samples, seed=args.seed,
              tolerance=args.tolerance, format=args.format)
    if args.command == "equivalence":
        kw["copies"] = args.copies
    else:
        kw["n_values"], kw["m_values"] = args.n, args.m
    if args.command == "ledger":
        kw["reservoir"] = args.reservoir
    return RunConfig(**kw)


def _output_path(target: str) -> Path:
    path = Path(target)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not path.is_absolute():
        path = Path(base) / path
    return path


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config_from_args(args)
        # render first so a usage error never leaves a half-written file
        buf = io.StringIO()
        status = run(cfg, buf)
    except UsageError as exc:
        parser.error(str(exc))
    if args.output == "-":
        sys.stdout.write(buf.getvalue())
    else:
        path = _output_path(args.output)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(buf.getvalue(), encoding="utf-8")
    return status


if __name__ == "__main__":
    raise SystemExit(main())
