"""Command-line entry point: feasibility reports, construction checks, SNR sweeps.

Exit codes: 0 success, 1 runtime or check failure, 2 bad configuration or
infeasible antenna setup.
"""
import argparse
import io
import logging
import sys
from dataclasses import dataclass

import numpy as np

from .channel import TrialSeed, sample_channel_set
from .core import (
    PAIR_ORDER,
    allocate_streams,
    alignment_residual,
    build_scheme,
    dof_upper_bound,
    exclusion_residuals,
    gsa_feasible,
    min_relay_antennas,
    required_block_height,
    sa_feasible,
)
from .errors import GsaError, Infeasible, InsufficientPoints
from .metrics import DEFAULT_TRIALS, estimate_dof, monte_carlo_sweep
from .transceiver import intended_symbols, random_frame, transmit

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

ALIGNMENT_TOL = 1e-8
EXCLUSION_TOL = 1e-8
RECOVERY_TOL = 1e-6
DOF_WINDOW_DB = 9.0
CSV_HEADER = "snr_db,mean_sum_rate_bits,std_err,trials"


@dataclass(frozen=True)
class RunConfig:
    mode: str
    m_antennas: int
    n_antennas: int
    snr_start_db: float = 0.0
    snr_stop_db: float = 50.0
    snr_step_db: float = 5.0
    trials: int = DEFAULT_TRIALS
    master_seed: int = 42
    output_path: str = "-"
    workers: int = 1

    def __post_init__(self):
        if self.mode not in ("feasibility", "verify", "sweep"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.m_antennas < 1 or self.n_antennas < 1:
            raise ValueError("antenna counts must be positive")
        if self.trials < 1:
            raise ValueError("trials must be positive")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.mode == "sweep":
            if self.snr_start_db > self.snr_stop_db:
                raise ValueError("snr start must not exceed snr stop")
            if self.snr_step_db <= 0:
                raise ValueError("snr step must be positive")

    def snr_grid(self):
        count = int(np.floor((self.snr_stop_db - self.snr_start_db) / self.snr_step_db + 1e-9)) + 1
        return np.round(self.snr_start_db + self.snr_step_db * np.arange(count), 10)


def _describe_allocation(m):
    alloc = allocate_streams(m)
    if m % 2 == 0:
        return f"d_ij = {m // 2} each"
    big = " = ".join(f"d_{i}{j}" for i, j in ((1, 3), (2, 4), (3, 1), (4, 2)))
    small = " = ".join(f"d_{i}{j}" for i, j in ((1, 4), (2, 3), (3, 2), (4, 1)))
    return f"{big} = {alloc.d[(1, 3)]}, {small} = {alloc.d[(1, 4)]}"


def run_feasibility(m, n):
    """Human-readable feasibility report for one (M, N)."""
    sa = sa_feasible(m, n)
    gsa = gsa_feasible(m, n)
    bound = dof_upper_bound(m, n)
    if n < 2 * m:
        head = f"SA: {'feasible' if sa else 'infeasible'}; GSA (N ≥ 2M branch): not applicable"
    elif gsa:
        head = f"GSA: feasible; DoF bound {bound}; {_describe_allocation(m)}"
    else:
        head = f"GSA: infeasible (need N ≥ {min_relay_antennas(m)} for M = {m})"
    lines = [
        head,
        f"M = {m}, N = {n}",
        f"sa_feasible: {sa}",
        f"gsa_feasible: {gsa}",
        f"dof_upper_bound: {bound}",
    ]
    if gsa:
        alloc = allocate_streams(m)
        lines.append("stream allocation: " + ", ".join(
            f"d_{i}{j}={alloc.d[(i, j)]}" for p in PAIR_ORDER for i, j in (p, p[::-1])
        ))
    if n < 2 * m:
        lines.append("binding constraint: relay antennas (bound 2N)")
    else:
        lines.append(
            f"binding constraint: source antennas (bound 4M); null-space dimension "
            f"N - 2M = {n - 2 * m}, required block height {required_block_height(m)}"
        )
    return "\n".join(lines)


def run_verify(m, n, trials, master_seed):
    """Check the construction invariants over seeded draws; returns (report, exit code)."""
    if not gsa_feasible(m, n):
        return f"GSA: infeasible (need N ≥ {min_relay_antennas(m)} for M = {m})", EXIT_CONFIG
    worst_align = worst_excl = worst_recovery = 0.0
    errors = 0
    for t in range(trials):
        try:
            ch = sample_channel_set(m, n, TrialSeed(master_seed, t))
            scheme = build_scheme(ch)
        except GsaError as exc:
            logger.warning("trial %d: %s", t, exc)
            errors += 1
            continue
        worst_align = max(worst_align, alignment_residual(scheme, ch))
        worst_excl = max(worst_excl, max(exclusion_residuals(scheme, ch).values()))
        frame = random_frame(scheme.alloc, 1.0, np.random.default_rng([master_seed, t, 1]))
        result = transmit(scheme, ch, frame, sigma2=0.0)
        for node in (1, 2, 3, 4):
            want = intended_symbols(frame.s, scheme.alloc, node)
            worst_recovery = max(worst_recovery, float(np.max(np.abs(result.recovered[node - 1] - want))))
    ok = (
        errors == 0
        and worst_align < ALIGNMENT_TOL
        and worst_excl < EXCLUSION_TOL
        and worst_recovery < RECOVERY_TOL
    )
    report = "\n".join([
        f"M = {m}, N = {n}, trials = {trials}, seed = {master_seed}",
        f"max alignment residual: {worst_align:.3e} (limit {ALIGNMENT_TOL:g})",
        f"max exclusion residual: {worst_excl:.3e} (limit {EXCLUSION_TOL:g})",
        f"max zero-noise recovery error: {worst_recovery:.3e} (limit {RECOVERY_TOL:g})",
        f"construction errors: {errors}",
        "PASS" if ok else "FAIL",
    ])
    return report, EXIT_OK if ok else EXIT_FAIL


def sweep_csv(config):
    """CSV text for a sweep run."""
    grid = config.snr_grid()
    sweep = monte_carlo_sweep(
        config.m_antennas, config.n_antennas, grid, config.trials,
        config.master_seed, workers=config.workers,
    )
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for p in sweep.points:
        buf.write(f"{p.snr_db:g},{p.mean_sum_rate:.10g},{p.std_error:.10g},{p.trials}\n")
    window = (grid[-1] - DOF_WINDOW_DB, grid[-1])
    try:
        dof = estimate_dof(sweep, window)
    except InsufficientPoints:
        pass
    else:
        buf.write(f"# dof_estimate={dof:.6f} window={window[0]:g}-{window[1]:g}dB\n")
    return buf.getvalue()


def run_sweep(config):
    if not gsa_feasible(config.m_antennas, config.n_antennas):
        raise Infeasible(config.m_antennas, config.n_antennas)
    text = sweep_csv(config)
    if config.output_path == "-":
        sys.stdout.write(text)
    else:
        with open(config.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gsa-relay",
        description="Generalized signal alignment for the MIMO two-way X relay channel.",
    )
    parser.add_argument("--mode", choices=("feasibility", "verify", "sweep"), required=True)
    parser.add_argument("--m-antennas", "-M", type=int, required=True, help="antennas per source")
    parser.add_argument("--n-antennas", "-N", type=int, required=True, help="relay antennas")
    parser.add_argument("--snr-start", type=float, default=0.0)
    parser.add_argument("--snr-stop", type=float, default=50.0)
    parser.add_argument("--snr-step", type=float, default=5.0)
    parser.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--output", default="-", help='CSV path, or "-" for stdout')
    parser.add_argument("--workers", type=int, default=1,
                        help="worker processes for sweep trials (output is identical for any value)")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        config = RunConfig(
            mode=args.mode,
            m_antennas=args.m_antennas,
            n_antennas=args.n_antennas,
            snr_start_db=args.snr_start,
            snr_stop_db=args.snr_stop,
            snr_step_db=args.snr_step,
            trials=args.trials,
            master_seed=args.seed,
            output_path=args.output,
            workers=args.workers,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if config.mode == "feasibility":
        print(run_feasibility(config.m_antennas, config.n_antennas))
        return EXIT_OK
    if config.mode == "verify":
        report, code = run_verify(config.m_antennas, config.n_antennas, config.trials, config.master_seed)
        print(report)
        return code
    try:
        return run_sweep(config)
    except Infeasible as exc:
        print(f"error: {exc}; need N ≥ {min_relay_antennas(config.m_antennas)}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except GsaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
