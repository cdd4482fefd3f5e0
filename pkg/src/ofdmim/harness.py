"""Monte Carlo BER experiments for the uplink and downlink OFDM-IM chains.

Every trial (one OFDM-IM block per stream over one block-fading channel) draws
from its own random stream, keyed by ``(seed, snr_index, trial_index)``.
Trials are processed in fixed-size chunks for vectorization, and the stopping
rule is evaluated trial by trial in index order, so a sweep's counters do not
depend on chunking or on how many worker processes are used.
"""

import csv
import hashlib
import io
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from functools import cached_property

import numpy as np

from . import __version__
from ._validation import ConfigError, check_positive_int
from .channel import complex_normal, draw_taps, frequency_response, tapped_delay_line
from .frame import deinterleave, interleave, place_symbols, power_scale, to_freq_domain, to_time_domain
from .linkproc import build_precoder, detect_group, equalize_uplink, precode, receiver_scale
from .lookup import bits_to_row, build_lookup, row_to_bits
from .modem import SUPPORTED_ORDERS, bits_to_symbol_index, qam

logger = logging.getLogger(__name__)

DIRECTIONS = ("uplink", "downlink")
RUNNABLE_SCHEMES = ("OFDM-IM", "OFDM")
CSV_COLUMNS = (
    "scheme", "direction", "snr_db", "trials", "total_bits",
    "index_bit_errors", "symbol_bit_errors", "ber", "seed",
)

# complex entries of the largest per-chunk channel tensor
_CHUNK_BUDGET = 1 << 19


@dataclass(frozen=True)
class LinkConfig:
    """Scalar system parameters of one BER experiment.

    ``snr_db`` is the system SNR ``rho = U * p_s / sigma^2`` in dB, with the
    block power ``p_s`` fixed to 1 (unit mean power per subcarrier).
    For ``scheme="OFDM"`` the group is fully active (K = N, no index bits).
    """

    direction: str = "uplink"
    scheme: str = "OFDM-IM"
    n_tot: int = 128
    n_cp: int = 16
    n_group: int = 8
    k_active: int = 6
    order: int = 4
    users: int = 2
    n_tx: int = 1
    n_rx: int = 2
    n_taps: int = 8
    snr_db: tuple = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0)
    min_trials: int = 10_000
    min_bit_errors: int = 100
    max_trials: int | None = None
    seed: int = 0
    power_normalize: bool = True
    metric: str = "abs"
    domain: str = "frequency"
    chunk_size: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "snr_db", tuple(float(s) for s in np.atleast_1d(self.snr_db)))
        if self.direction not in DIRECTIONS:
            raise ConfigError(f"direction must be one of {DIRECTIONS}, got {self.direction!r}")
        if self.scheme not in RUNNABLE_SCHEMES:
            raise ConfigError(
                f"scheme must be one of {RUNNABLE_SCHEMES}, got {self.scheme!r}"
                " (SIM-OFDM is analytic only)"
            )
        for name in ("n_tot", "n_group", "k_active", "users", "n_tx", "n_rx", "n_taps",
                     "min_trials"):
            check_positive_int(getattr(self, name), name)
        check_positive_int(self.n_cp, "n_cp", minimum=0)
        check_positive_int(self.min_bit_errors, "min_bit_errors", minimum=0)
        check_positive_int(self.seed, "seed", minimum=0)
        if self.max_trials is not None:
            check_positive_int(self.max_trials, "max_trials", minimum=self.min_trials)
        if self.chunk_size is not None:
            check_positive_int(self.chunk_size, "chunk_size")
        if self.n_tot % self.n_group:
            raise ConfigError(f"N={self.n_group} does not divide N_tot={self.n_tot}")
        if self.scheme == "OFDM-IM" and self.k_active > self.n_group:
            raise ConfigError(f"K={self.k_active} exceeds N={self.n_group}")
        if self.order not in SUPPORTED_ORDERS:
            raise ConfigError(f"order must be one of {SUPPORTED_ORDERS}, got {self.order}")
        if self.n_cp < self.n_taps - 1:
            raise ConfigError(f"N_CP={self.n_cp} shorter than the channel memory L-1={self.n_taps - 1}")
        if self.n_taps > self.n_tot:
            raise ConfigError("more channel taps than subcarriers")
        if self.direction == "uplink" and self.n_rx < self.users * self.n_tx:
            raise ConfigError(f"uplink needs N_R >= U*N_T ({self.n_rx} < {self.users * self.n_tx})")
        if self.direction == "downlink" and self.n_tx < self.users * self.n_rx:
            raise ConfigError(f"downlink needs N_T >= U*N_R ({self.n_tx} < {self.users * self.n_rx})")
        if self.metric not in ("abs", "abs2"):
            raise ConfigError(f"metric must be 'abs' or 'abs2', got {self.metric!r}")
        if self.domain not in ("frequency", "time"):
            raise ConfigError(f"domain must be 'frequency' or 'time', got {self.domain!r}")

    @classmethod
    def from_mapping(cls, mapping):
        known = {f.name for f in fields(cls)}
        unknown = set(mapping) - known
        if unknown:
            raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
        return cls(**mapping)

    def replace(self, **changes):
        data = asdict(self)
        data.update(changes)
        return type(self)(**data)

    @property
    def k_eff(self):
        return self.n_group if self.scheme == "OFDM" else self.k_active

    @property
    def n_groups(self):
        return self.n_tot // self.n_group

    @property
    def streams(self):
        """Independent OFDM-IM blocks per trial (user antennas)."""
        per_user = self.n_tx if self.direction == "uplink" else self.n_rx
        return self.users * per_user

    @cached_property
    def table(self):
        return build_lookup(self.n_group, self.k_eff)

    @cached_property
    def constellation(self):
        return qam(self.order)

    @property
    def bits_per_group(self):
        return self.table.p1 + self.k_eff * self.constellation.bits_per_symbol

    @property
    def bits_per_trial(self):
        return self.streams * self.n_groups * self.bits_per_group

    @property
    def amplitude(self):
        if not self.power_normalize:
            return 1.0
        return float(power_scale(self.n_tot, self.n_groups, self.k_eff))

    @property
    def channel_shape(self):
        """(rx, tx) of the stacked per-subcarrier channel."""
        if self.direction == "uplink":
            return self.n_rx, self.users * self.n_tx
        return self.users * self.n_rx, self.n_tx

    @property
    def trials_cap(self):
        return self.max_trials if self.max_trials is not None else 10 * self.min_trials

    @property
    def effective_chunk(self):
        if self.chunk_size is not None:
            return self.chunk_size
        rx, tx = self.channel_shape
        return int(max(1, min(256, _CHUNK_BUDGET // (self.n_tot * rx * tx))))

    def noise_variance(self, snr_db):
        return self.users / (10.0 ** (snr_db / 10.0))

    def digest(self):
        payload = json.dumps(asdict(self), sort_keys=True).encode()
        return hashlib.sha256(payload).hexdigest()[:16]

    def __getstate__(self):
        # drop cached properties; they are rebuilt lazily in worker processes
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def __setstate__(self, state):
        for key, value in state.items():
            object.__setattr__(self, key, value)


@dataclass
class TrialCounts:
    """Error counters for a set of trials (arrays of shape (trials,) or scalars)."""

    index_bit_errors: np.ndarray
    symbol_bit_errors: np.ndarray
    symbol_bit_errors_misdetected: np.ndarray
    index_misdetections: np.ndarray

    @property
    def bit_errors(self):
        return self.index_bit_errors + self.symbol_bit_errors

    def take(self, n):
        return TrialCounts(*(getattr(self, f.name)[:n] for f in fields(self)))

    @classmethod
    def concat(cls, parts):
        return cls(*(np.concatenate([getattr(p, f.name) for p in parts]) for f in fields(cls)))


@dataclass(frozen=True)
class BerRecord:
    scheme: str
    direction: str
    snr_db: float
    trials: int
    total_bits: int
    index_bit_errors: int
    symbol_bit_errors: int
    seed: int
    symbol_bit_errors_misdetected: int = 0
    index_misdetections: int = 0
    sum_sq_errors: int = 0
    wall_time: float = field(default=0.0, compare=False)

    @property
    def bit_errors(self):
        return self.index_bit_errors + self.symbol_bit_errors

    @property
    def ber(self):
        return self.bit_errors / self.total_bits if self.total_bits else 0.0

    def binomial_sigma(self):
        """sqrt(p (1 - p) / n) treating every bit as an independent draw."""
        p = self.ber
        return float(np.sqrt(p * (1.0 - p) / self.total_bits)) if self.total_bits else 0.0

    def clustered_sigma(self):
        """Standard error of the BER when bits sharing a trial are correlated.

        Uses the between-trial variance of per-trial error counts.
        """
        n = self.trials
        if n < 2:
            return float("inf")
        mean = self.bit_errors / n
        var = (self.sum_sq_errors - n * mean * mean) / (n - 1)
        per_trial_bits = self.total_bits / n
        return float(np.sqrt(max(var, 0.0) / n) / per_trial_bits)

    def as_row(self):
        return {
            "scheme": self.scheme,
            "direction": self.direction,
            "snr_db": repr(float(self.snr_db)),
            "trials": self.trials,
            "total_bits": self.total_bits,
            "index_bit_errors": self.index_bit_errors,
            "symbol_bit_errors": self.symbol_bit_errors,
            "ber": repr(float(self.ber)),
            "seed": self.seed,
        }

    def as_dict(self):
        row = asdict(self)
        row["ber"] = self.ber
        return row


def trial_rng(seed, snr_index, trial_index):
    """Independent generator for one trial of one SNR point."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(snr_index, trial_index)))


def _draw(config, rng):
    """All random inputs of one trial, in a fixed draw order."""
    rx, tx = config.channel_shape
    bits = rng.integers(0, 2, size=(config.streams, config.n_groups, config.bits_per_group),
                        dtype=np.uint8)
    taps = draw_taps(rng, config.n_taps, rx, tx)
    n_samples = config.n_tot + (config.n_cp if config.domain == "time" else 0)
    noise = complex_normal(rng, (rx, n_samples))
    return bits, taps, noise


def _channel_output(config, taps, H, x, noise):
    """Per-antenna frequency-domain receive signal for ``(B, tx, N_tot)`` inputs."""
    if config.domain == "time":
        s = to_time_domain(x, config.n_cp)
        r = tapped_delay_line(taps, s) + noise
        return to_freq_domain(r, config.n_tot, config.n_cp)
    y = np.matmul(H, np.swapaxes(x, -1, -2)[..., None])[..., 0]
    return np.swapaxes(y, -1, -2) + noise


def _process(config, snr_db, bits, taps, noise):
    """Run the full chain on stacked trial inputs and count errors per trial."""
    table = config.table
    const = config.constellation
    p1 = table.p1
    k = config.k_eff
    m = const.bits_per_symbol
    rho = 10.0 ** (snr_db / 10.0)
    sigma = np.sqrt(config.noise_variance(snr_db))
    amp = config.amplitude

    # transmitter
    tx_row = bits_to_row(bits[..., :p1], p1)
    sym_bits = bits[..., p1:].reshape(bits.shape[:-1] + (k, m))
    symbols = const.points[bits_to_symbol_index(sym_bits, const)] * amp
    groups = place_symbols(table.rows[tx_row], symbols, config.n_group)
    blocks = interleave(groups)  # (B, S, N_tot)

    H = frequency_response(taps, config.n_tot)  # (B, N_tot, rx, tx)
    noise = sigma * noise

    if config.direction == "uplink":
        y = _channel_output(config, taps, H, blocks, noise)
        x_tilde = equalize_uplink(np.swapaxes(y, -1, -2), H, rho)
        x_tilde = np.swapaxes(x_tilde, -1, -2)
    else:
        prec = build_precoder(H, rho, config.users)
        x_bar = np.swapaxes(precode(prec, np.swapaxes(blocks, -1, -2)), -1, -2)
        y = _channel_output(config, taps, H, x_bar, noise)
        x_tilde = np.swapaxes(receiver_scale(np.swapaxes(y, -1, -2), prec.gamma), -1, -2)

    # receiver
    det = detect_group(deinterleave(x_tilde, config.n_groups), table, const, scale=amp,
                       metric=config.metric)
    miss = det.row != tx_row
    if p1:
        idx_err = (row_to_bits(det.row, p1) != row_to_bits(tx_row, p1)).sum(axis=-1)
    else:
        idx_err = np.zeros(miss.shape, dtype=np.int64)
    sym_err = (det.symbol_bits != bits[..., p1:]).sum(axis=-1)
    axes = (-2, -1)
    return TrialCounts(
        idx_err.sum(axis=axes).astype(np.int64),
        sym_err.sum(axis=axes).astype(np.int64),
        (sym_err * miss).sum(axis=axes).astype(np.int64),
        miss.sum(axis=axes).astype(np.int64),
    )


def simulate_trials(config, snr_index, trials):
    """Counters for the given trial indices of one SNR point."""
    trials = list(trials)
    draws = [_draw(config, trial_rng(config.seed, snr_index, t)) for t in trials]
    bits, taps, noise = (np.stack(parts) for parts in zip(*draws))
    return _process(config, config.snr_db[snr_index], bits, taps, noise)


def _run_single(config, rng, snr_db):
    bits, taps, noise = _draw(config, rng)
    counts = _process(config, snr_db, bits[None], taps[None], noise[None])
    return TrialCounts(*(int(getattr(counts, f.name)[0]) for f in fields(counts)))


def run_uplink_trial(config, rng, snr_db=None):
    """One uplink block through the full chain; returns scalar counters."""
    if config.direction != "uplink":
        config = config.replace(direction="uplink")
    return _run_single(config, rng, config.snr_db[0] if snr_db is None else snr_db)


def run_downlink_trial(config, rng, snr_db=None):
    """One downlink block through the full chain; returns scalar counters."""
    if config.direction != "downlink":
        config = config.replace(direction="downlink")
    return _run_single(config, rng, config.snr_db[0] if snr_db is None else snr_db)


def _chunk_job(args):
    config, snr_index, start, stop = args
    return simulate_trials(config, snr_index, range(start, stop))


def _stop_index(errors, min_trials, min_errors):
    """Number of trials after which the stopping rule is first satisfied, or None."""
    cum = np.cumsum(errors)
    if len(cum) < min_trials:
        return None
    hit = np.nonzero(cum[min_trials - 1:] >= min_errors)[0]
    if hit.size == 0:
        return None
    return min_trials + int(hit[0])


def _run_point(config, snr_index, pool):
    chunk = config.effective_chunk
    cap = config.trials_cap
    parts = []
    done = 0
    target = config.min_trials
    while True:
        jobs = [(config, snr_index, s, min(s + chunk, target)) for s in range(done, target, chunk)]
        if pool is None:
            parts.extend(_chunk_job(j) for j in jobs)
        else:
            parts.extend(pool.map(_chunk_job, jobs))
        done = target
        counts = TrialCounts.concat(parts)
        stop = _stop_index(counts.bit_errors, config.min_trials, config.min_bit_errors)
        if stop is not None:
            return counts.take(stop)
        if done >= cap:
            return counts.take(cap)
        target = min(cap, done + config.min_trials)


@dataclass
class SweepResult:
    config: LinkConfig
    records: list
    wall_time: float = 0.0

    def metadata(self):
        return {
            "version": __version__,
            "seed": self.config.seed,
            "config_hash": self.config.digest(),
            "config": asdict(self.config),
            "index_bits_per_group": self.config.table.p1,
            "bits_per_trial": self.config.bits_per_trial,
            "wall_time": self.wall_time,
        }

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for rec in self.records:
            writer.writerow(rec.as_row())
        return buf.getvalue()

    def to_json(self):
        doc = {"metadata": self.metadata(), "records": [r.as_dict() for r in self.records]}
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def run_sweep(config, workers=1):
    """Run every SNR point of `config` until its stopping rule is met."""
    check_positive_int(workers, "workers")
    start = time.perf_counter()
    records = []
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for i, snr in enumerate(config.snr_db):
            t0 = time.perf_counter()
            counts = _run_point(config, i, pool)
            n = len(counts.index_bit_errors)
            errors = counts.bit_errors
            rec = BerRecord(
                scheme=config.scheme,
                direction=config.direction,
                snr_db=snr,
                trials=n,
                total_bits=n * config.bits_per_trial,
                index_bit_errors=int(counts.index_bit_errors.sum()),
                symbol_bit_errors=int(counts.symbol_bit_errors.sum()),
                seed=config.seed,
                symbol_bit_errors_misdetected=int(counts.symbol_bit_errors_misdetected.sum()),
                index_misdetections=int(counts.index_misdetections.sum()),
                sum_sq_errors=int((errors * errors).sum()),
                wall_time=time.perf_counter() - t0,
            )
            logger.info("%s %s %.1f dB: %d trials, BER %.3e", config.scheme, config.direction,
                        snr, n, rec.ber)
            records.append(rec)
    finally:
        if pool is not None:
            pool.shutdown()
    return SweepResult(config, records, time.perf_counter() - start)
