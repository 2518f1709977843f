"""Command-line entry point: sweep subcommands and the convergence check.

Exit codes: 0 on success, 1 for configuration errors, 2 when a numerical
check fails or too many trials failed.
"""

import argparse
import json
import sys

import numpy as np

from .channel import complex_gaussian
from .errors import ConfigurationError, MimosecError
from .harness import SweepConfig, emit_results, load_config, run_sweep
from .metrics import secrecy_limit, secrecy_rate

_METRIC_FOR = {"ber-sweep": "ber", "secrecy-sweep": "secrecy_rate",
               "an-sweep": "secrecy_rate", "flops": "flops"}


def _add_common(sub):
    sub.add_argument("--config", help="JSON config matching the SweepConfig field names")
    sub.add_argument("--out", default="results.csv", help="output path")
    sub.add_argument("--format", choices=["csv", "json"], default="csv")
    sub.add_argument("--seed", type=int, help="master seed override")
    sub.add_argument("--trials", type=int, help="trial count override")
    sub.add_argument("--threads", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mimosec",
        description="MU-MIMO physical-layer security sweeps (BER, secrecy rate, FLOPs)")
    subs = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
            ("ber-sweep", "Monte-Carlo BER vs SNR"),
            ("secrecy-sweep", "average secrecy rate vs SNR"),
            ("an-sweep", "secrecy rate with artificial noise"),
            ("flops", "measured FLOP totals per algorithm")]:
        sub = subs.add_parser(name, help=help_text)
        _add_common(sub)
    limit = subs.add_parser("limit-check",
                            help="high-SNR secrecy convergence check")
    limit.add_argument("--pairs", type=int, default=20)
    limit.add_argument("--seed", type=int, default=0)
    limit.add_argument("--tolerance", type=float, default=0.01)
    return parser


def _config_from_args(args) -> SweepConfig:
    cfg = load_config(args.config) if args.config else SweepConfig()
    if args.seed is not None:
        cfg.seed = args.seed
    if args.trials is not None:
        cfg.trials = args.trials
    return cfg.validate()


def _run_limit_check(args) -> int:
    """Construct admissible channel pairs and verify the secrecy rate at high
    transmit power matches the closed-form limit."""
    rng = np.random.default_rng(np.random.SeedSequence((args.seed, 31)))
    n = 4
    worst = 0.0
    for i in range(args.pairs):
        H_ea = complex_gaussian(rng, (n, n))
        W = complex_gaussian(rng, (n, n))
        gram = H_ea.conj().T @ H_ea + W @ W.conj().T + 0.1 * np.eye(n)
        eigvals, eigvecs = np.linalg.eigh(gram)
        H_ba = eigvecs @ np.diag(np.sqrt(eigvals)) @ eigvecs.conj().T
        E_s = 1e6
        report = secrecy_rate(H_ba, H_ea, (E_s / n) * np.eye(n))
        limit = secrecy_limit(H_ba, H_ea)
        rel = abs(report.c_secrecy - limit) / abs(limit)
        worst = max(worst, rel)
        print(f"pair {i:2d}: rate {report.c_secrecy:10.4f}  "
              f"limit {limit:10.4f}  rel.err {rel:.2e}")
    print(f"worst relative error: {worst:.2e} (tolerance {args.tolerance:.2e})")
    if worst > args.tolerance:
        print("limit-check FAILED", file=sys.stderr)
        return 2
    print("limit-check passed")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "limit-check":
        return _run_limit_check(args)
    try:
        cfg = _config_from_args(args)
        if args.command == "an-sweep":
            cfg.scenario = "imperfect_csi_an"
        failures: list = []
        records = run_sweep(cfg, metric=_METRIC_FOR[args.command],
                            threads=args.threads, failures=failures)
        emit_results(records, args.out, fmt=args.format)
        if failures:
            sidecar = args.out + ".failures.json"
            with open(sidecar, "w") as fh:
                json.dump(failures, fh, indent=2)
            print(f"wrote {len(records)} records to {args.out}; "
                  f"{len(failures)} cells had failures (see {sidecar})")
            if any(cell["flagged"] for cell in failures):
                return 2
        else:
            print(f"wrote {len(records)} records to {args.out}")
        return 0
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 1
    except MimosecError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
