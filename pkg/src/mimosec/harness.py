"""Seeded Monte-Carlo sweeps over SNR, algorithms, and scenarios.

One trial draws a network realization, builds the requested precoder, and
evaluates BER or secrecy rate on the true channels. Trials own derived RNG
streams keyed by (master seed, purpose, trial index), so parallel and
sequential execution produce identical results and the same seed reproduces
the same records byte for byte.
"""

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import ChannelSet, an_null_precoder, complex_gaussian, \
    generate_channels, perturb_csi
from .errors import ConfigurationError, MimosecError
from .metrics import BerCounter, ber_accumulate, flops_measured, \
    secrecy_rate, secrecy_rate_an
from .modem import demap_symbols, map_symbols, qam_tau
from .precoders import ALGORITHM_INNERS, PrecodingSolution, so_thp_solve, \
    thp_receive, thp_transmit, zf_precoder, mmse_precoder

__all__ = ["SweepConfig", "SweepRecord", "run_sweep", "emit_results",
           "read_records", "load_config", "ALGORITHMS", "SCENARIOS",
           "ber_trial", "secrecy_trial"]

SCENARIOS = ("perfect_csi", "imperfect_csi", "imperfect_csi_an")
LINEAR_ALGORITHMS = ("ZF", "MMSE")
ALGORITHMS = LINEAR_ALGORITHMS + tuple(ALGORITHM_INNERS)

# Fixed MMSE loading used when the noiseless sentinel (infinite SNR) disables
# the noise-derived regularizer; keeps the inversions well posed.
ALPHA_FLOOR = 1e-9


@dataclass
class SweepConfig:
    """One sweep: scenario, algorithm list, SNR grid, and channel geometry.

    ``dims`` is ``(T, K, N_t, N_r, N_k)``. ``m`` is the eavesdropper gain
    ratio, ``rho`` the signal power fraction for AN runs, ``sigma_e2`` the
    CSI error variance, ``M_qam`` the constellation order.
    """

    scenario: str = "perfect_csi"
    algorithms: tuple = ("SO-THP+S-GMI",)
    snr_db: tuple = (10.0,)
    trials: int = 10
    dims: tuple = (2, 1, 4, 2, 2)
    m: float = 0.5
    rho: float = 0.6
    sigma_e2: float = 0.0
    M_qam: int = 4
    seed: int = 0
    n_symbols: int = 256
    rho_grid: tuple | None = None
    qs_model: str = "nominal"

    def validate(self) -> "SweepConfig":
        T, K, N_t, N_r, N_k = self.dims
        if self.trials < 1:
            raise ConfigurationError("trials must be at least 1")
        if not self.snr_db:
            raise ConfigurationError("snr_db list must be non-empty")
        if N_t < T * N_r:
            raise ConfigurationError(
                f"antenna budget violated: N_t={N_t} < T*N_r={T * N_r}")
        if self.scenario not in SCENARIOS:
            raise ConfigurationError(f"unknown scenario {self.scenario!r}")
        for name in self.algorithms:
            if name.upper() not in ALGORITHMS:
                raise ConfigurationError(f"unknown algorithm {name!r}")
        if not 0.0 < self.rho <= 1.0:
            raise ConfigurationError("rho must lie in (0, 1]")
        if self.qs_model not in ("nominal", "thp"):
            raise ConfigurationError("qs_model must be 'nominal' or 'thp'")
        return self


@dataclass
class SweepRecord:
    algorithm: str
    snr_db: float
    metric: str
    value: float
    trials: int
    seed: int


def load_config(path: str) -> SweepConfig:
    """Read a JSON config whose keys match the SweepConfig field names."""
    with open(path) as fh:
        raw = json.load(fh)
    known = {f for f in SweepConfig.__dataclass_fields__}
    unknown = set(raw) - known
    if unknown:
        raise ConfigurationError(f"unknown config fields: {sorted(unknown)}")
    for key in ("algorithms", "snr_db", "dims", "rho_grid"):
        if key in raw and raw[key] is not None:
            raw[key] = tuple(raw[key])
    if "snr_db" in raw:
        raw["snr_db"] = tuple(float(v) for v in raw["snr_db"])
    return SweepConfig(**raw).validate()


def _trial_seed(master: int, purpose: int, trial: int) -> int:
    return int(np.random.SeedSequence((master, purpose, trial)).generate_state(1)[0])


def _snr_to_sigma2(snr_db: float) -> float:
    """Noise variance per receive antenna at unit symbol energy; the infinite
    sentinel means noiseless."""
    if np.isinf(snr_db):
        return 0.0
    return float(10.0 ** (-snr_db / 10.0))


def _design_channels(cfg: SweepConfig, channels: ChannelSet, trial: int) -> ChannelSet:
    """Transmitter-side channel knowledge: users are always known perfectly;
    eavesdropper knowledge is perturbed in the imperfect-CSI scenarios."""
    if cfg.scenario == "perfect_csi" or cfg.sigma_e2 == 0.0:
        return channels
    eves = [perturb_csi(H, cfg.sigma_e2, _trial_seed(cfg.seed, 23 + k, trial))
            for k, H in enumerate(channels.H_eves)]
    return ChannelSet(H_users=channels.H_users, H_eves=eves,
                      m=channels.m, sigma_e2=cfg.sigma_e2)


def _solve(algorithm: str, design: ChannelSet, sigma2: float):
    """Build the transmit solution for one algorithm at one noise level."""
    name = algorithm.upper()
    T, N_r = design.n_users, design.n_rx
    H = design.stacked()
    alpha = max(T * N_r * sigma2, ALPHA_FLOOR)
    if name == "ZF":
        return zf_precoder(H)
    if name == "MMSE":
        return mmse_precoder(H, alpha)
    inner = ALGORITHM_INNERS[name]
    noise_cov = max(sigma2, ALPHA_FLOOR) * np.eye(N_r)
    return so_thp_solve(design, inner, alpha=alpha, noise_cov=noise_cov)


def ber_trial(cfg: SweepConfig, algorithm: str, snr_db: float, trial: int) -> BerCounter:
    """One BER trial: draw, solve, send one frame, count bit errors."""
    T, K, N_t, N_r, N_k = cfg.dims
    channels = generate_channels(T, K, N_t, N_r, N_k, cfg.m,
                                 seed=_trial_seed(cfg.seed, 7, trial))
    design = _design_channels(cfg, channels, trial)
    sigma2 = _snr_to_sigma2(snr_db)
    solution = _solve(algorithm, design, sigma2)
    tau = qam_tau(cfg.M_qam)
    bits_rng = np.random.default_rng(
        np.random.SeedSequence((cfg.seed, 13, trial)))
    noise_rng = np.random.default_rng(
        np.random.SeedSequence((cfg.seed, 17, trial)))

    n_streams = T * N_r
    bits_per_symbol = int(np.log2(cfg.M_qam))
    bits = bits_rng.integers(0, 2, size=n_streams * cfg.n_symbols * bits_per_symbol)
    frames = map_symbols(bits, cfg.M_qam).symbols.reshape(n_streams, cfg.n_symbols)
    noise = (complex_gaussian(noise_rng, (n_streams, cfg.n_symbols), var=sigma2)
             if sigma2 > 0 else np.zeros((n_streams, cfg.n_symbols), dtype=complex))

    H_true = channels.stacked()
    counter = BerCounter()
    if isinstance(solution, PrecodingSolution):
        perm = solution.order
        row_map = np.concatenate([np.arange(u * N_r, (u + 1) * N_r) for u in perm])
        S_pos = frames[row_map]
        x_tilde = thp_transmit(S_pos, solution.B, tau)
        X = solution.beta * (solution.F @ x_tilde)
        Y = H_true[row_map] @ X + noise
        S_hat_pos = thp_receive(solution, Y / solution.beta, tau)
        S_hat = np.empty_like(S_hat_pos)
        S_hat[row_map] = S_hat_pos
    else:
        P = solution
        beta = np.sqrt(1.0 / np.linalg.norm(P) ** 2)
        X = beta * (P @ frames)
        Y = H_true @ X + noise
        E = H_true @ P
        S_hat = (Y / beta) / np.diagonal(E)[:, None]
    rx_bits = demap_symbols(S_hat.reshape(-1), cfg.M_qam)
    return ber_accumulate(bits, rx_bits, counter)


def _qs_from_solution(solution, E_s: float):
    """Transmit covariance model: nominal P P^H scaled to trace E_s."""
    P = solution.F if isinstance(solution, PrecodingSolution) else solution
    gram = P @ P.conj().T
    trace = float(np.real(np.trace(gram)))
    return gram * (E_s / trace)


def secrecy_trial(cfg: SweepConfig, algorithm: str, snr_db: float, trial: int) -> float:
    """One secrecy trial: aggregate (or per-user, with AN) secrecy rate against
    the worst eavesdropper, evaluated on the true channels."""
    T, K, N_t, N_r, N_k = cfg.dims
    channels = generate_channels(T, K, N_t, N_r, N_k, cfg.m,
                                 seed=_trial_seed(cfg.seed, 7, trial))
    design = _design_channels(cfg, channels, trial)
    sigma2 = _snr_to_sigma2(snr_db)
    solution = _solve(algorithm, design, sigma2)
    E_s = float(10.0 ** (snr_db / 10.0)) if not np.isinf(snr_db) else 1e9

    if cfg.scenario != "imperfect_csi_an":
        H_ba = channels.stacked()
        Q_s = _qs_from_solution(solution, E_s)
        reports = [secrecy_rate(H_ba, H_k, Q_s, snr_db=snr_db)
                   for H_k in channels.H_eves]
        return min(r.c_secrecy for r in reports)

    # AN scenario: per-user links with per-user null-space jamming, summed.
    rho = cfg.rho
    total = 0.0
    for r in range(T):
        H_r_true = channels.H_users[r]
        if isinstance(solution, PrecodingSolution):
            pos = solution.position_of(r)
            P_r = solution.F[:, pos * N_r:(pos + 1) * N_r]
        else:
            P_r = solution[:, r * N_r:(r + 1) * N_r]
        an_dims = N_t - N_r
        P_an = an_null_precoder(design.H_users[r], an_dims)
        Q_s = P_r @ P_r.conj().T
        Q_s *= rho * E_s / float(np.real(np.trace(Q_s)))
        Q_an = P_an @ P_an.conj().T * ((1.0 - rho) * E_s / an_dims)
        per_eve = [secrecy_rate_an(H_r_true, H_k, Q_s, Q_an, snr_db=snr_db)
                   for H_k in channels.H_eves]
        total += min(rep.c_secrecy for rep in per_eve)
    return total


def _cells(cfg: SweepConfig, metric: str):
    if metric == "secrecy_rate" and cfg.scenario == "imperfect_csi_an" and cfg.rho_grid:
        # AN power-ratio sweep: the sweep variable column carries rho.
        return [(algo, float(rho)) for algo in cfg.algorithms for rho in cfg.rho_grid]
    return [(algo, float(snr)) for algo in cfg.algorithms for snr in cfg.snr_db]


def run_sweep(cfg: SweepConfig, metric: str = "ber", threads: int = 1,
              failures: list | None = None) -> list:
    """Run every (algorithm, sweep point) cell of the config.

    Each cell averages the metric over ``cfg.trials`` independent draws.
    Trials that raise a package error are excluded from the average, counted,
    and reported through ``failures``; a cell with more than 1% failed trials
    is flagged there as well. Results are reduced in trial order, so any
    thread count yields identical records.
    """
    cfg.validate()
    if metric not in ("ber", "secrecy_rate", "flops"):
        raise ConfigurationError(f"unknown metric {metric!r}")
    records = []

    if metric == "flops":
        T, K, N_t, N_r, N_k = cfg.dims
        for algo in cfg.algorithms:
            ledger = flops_measured(algo, (T, N_t, N_r), seed=cfg.seed)
            records.append(SweepRecord(algorithm=algo.upper(), snr_db=float(N_t),
                                       metric="flops", value=float(ledger.total),
                                       trials=1, seed=cfg.seed))
        return records

    rho_sweep = metric == "secrecy_rate" and cfg.scenario == "imperfect_csi_an" \
        and bool(cfg.rho_grid)

    for algo, point in _cells(cfg, metric):
        if rho_sweep:
            cell_cfg = SweepConfig(**{**asdict_shallow(cfg), "rho": point})
            snr = cfg.snr_db[0]
        else:
            cell_cfg, snr = cfg, point

        def one_trial(trial: int):
            try:
                if metric == "ber":
                    return ber_trial(cell_cfg, algo, snr, trial)
                return secrecy_trial(cell_cfg, algo, snr, trial)
            except MimosecError as exc:
                return exc

        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                outcomes = list(pool.map(one_trial, range(cfg.trials)))
        else:
            outcomes = [one_trial(t) for t in range(cfg.trials)]

        failed = [(t, str(o)) for t, o in enumerate(outcomes) if isinstance(o, Exception)]
        good = [o for o in outcomes if not isinstance(o, Exception)]
        if failed and failures is not None:
            failures.append({"algorithm": algo.upper(), "snr_db": point,
                             "metric": metric, "failures": len(failed),
                             "trials": cfg.trials,
                             "flagged": len(failed) > 0.01 * cfg.trials,
                             "errors": [msg for _, msg in failed[:5]]})
        if not good:
            continue
        if metric == "ber":
            errors = sum(c.errors for c in good)
            total = sum(c.total for c in good)
            value = errors / total
        else:
            value = float(np.mean(good))
        records.append(SweepRecord(algorithm=algo.upper(), snr_db=point,
                                   metric=metric, value=float(value),
                                   trials=cfg.trials, seed=cfg.seed))
    return records


def asdict_shallow(cfg: SweepConfig) -> dict:
    return {name: getattr(cfg, name) for name in SweepConfig.__dataclass_fields__}


CSV_HEADER = ["algorithm", "snr_db", "metric", "value", "trials", "seed"]


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def emit_results(records: list, path: str, fmt: str = "csv") -> str:
    """Write sweep records as CSV (fixed header) or JSON, 12 significant digits."""
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_HEADER)
            for rec in records:
                writer.writerow([rec.algorithm, _fmt(rec.snr_db), rec.metric,
                                 _fmt(rec.value), rec.trials, rec.seed])
    elif fmt == "json":
        payload = [{"algorithm": r.algorithm, "snr_db": float(_fmt(r.snr_db)),
                    "metric": r.metric, "value": float(_fmt(r.value)),
                    "trials": r.trials, "seed": r.seed} for r in records]
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    else:
        raise ConfigurationError(f"unknown output format {fmt!r}")
    return path


def read_records(path: str, fmt: str = "csv") -> list:
    """Parse a results file back into SweepRecord objects (round trip of
    :func:`emit_results`)."""
    records = []
    if fmt == "csv":
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            missing = [c for c in CSV_HEADER if c not in (reader.fieldnames or [])]
            if missing:
                raise ConfigurationError(f"results file missing columns: {missing}")
            for row in reader:
                records.append(SweepRecord(
                    algorithm=row["algorithm"], snr_db=float(row["snr_db"]),
                    metric=row["metric"], value=float(row["value"]),
                    trials=int(row["trials"]), seed=int(row["seed"])))
    elif fmt == "json":
        with open(path) as fh:
            for row in json.load(fh):
                records.append(SweepRecord(**row))
    else:
        raise ConfigurationError(f"unknown output format {fmt!r}")
    return records
