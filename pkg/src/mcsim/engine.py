"""Monte Carlo BER engine: full-chain trials, stopping rules, SNR sweeps.

One trial covers one Alamouti pair's worth of traffic (two block periods,
2*U information bits): bits -> TDM frames -> BPSK -> Walsh-Hadamard
spreading -> inverse wavelet transform -> diversity transmit/receive/
combine -> forward wavelet transform -> despread -> hard decision. The
no-diversity and MRC paths carry two independent blocks over the same
two periods, so every scheme moves the same bit count per pair.

Determinism contract: every batch of pairs owns a private generator
seeded by mix64(point_seed, batch_index); batches are included in
ascending index order until the stopping rule fires, so results are
byte-identical for any worker count.

SNR accounting: each bit's transmitted waveform is its symbol times a
unit-power length-M code row through a unitary transform, i.e. energy M
per bit, so the per-sample channel noise variance for a target Eb/N0 is
noise_variance(snr_db, energy_per_bit=M).
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import ChannelSpec, draw_awgn, draw_fading_gain, noise_variance
from .codes import despread, generate_walsh_hadamard, spread
from .diversity import (
    ChannelRealization,
    alamouti_combine,
    alamouti_encode,
    alamouti_receive,
    mrc_combine,
    no_diversity_equalize,
)
from .mapping import bpsk_demap, bpsk_map
from .wavelet import make_plan, synthesis_transform, analysis_transform
from . import theory

__all__ = [
    "SchemeConfig",
    "StoppingRule",
    "BerRecord",
    "SweepConfig",
    "SCHEMES",
    "mix64",
    "wilson_interval",
    "run_trial_block",
    "run_point",
    "run_sweep",
    "selftest",
]

SCHEMES = ("none", "mrc", "alamouti")

# one batch carries ~80k bits (10^4 pairs at the default 4 users)
DEFAULT_BATCH_BITS = 80_000

_MASK64 = (1 << 64) - 1
_Z95 = 1.959963984540054


def mix64(seed: int, index: int) -> int:
    """Derive an independent 64-bit stream seed from (seed, index).

    splitmix64: add (index+1) golden-ratio increments to the seed, then
    apply the splitmix64 avalanche finalizer. Any two distinct indices give
    uncorrelated generator seeds, which is what makes parallel sweeps
    deterministic without coordination.
    """
    z = (int(seed) + (int(index) + 1) * 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def wilson_interval(errors: int, n: int, z: float = _Z95) -> tuple:
    """Wilson score interval for a binomial proportion; sane at low counts."""
    if n <= 0:
        raise ValueError("interval needs at least one trial")
    p = errors / n
    denom = 1.0 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * np.sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom
    low = 0.0 if errors == 0 else max(0.0, centre - half)
    high = 1.0 if errors == n else min(1.0, centre + half)
    return low, high


@dataclass(frozen=True)
class SchemeConfig:
    """Diversity scheme plus the shared link dimensions."""

    scheme: str = "none"
    users: int = 4
    channels: int = 4
    wavelet_family: str = "haar"
    power_split: bool = True

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; expected {SCHEMES}")
        if self.channels < 1 or self.channels & (self.channels - 1):
            raise ValueError(f"channel count must be a power of two, got {self.channels}")
        if not 1 <= self.users <= self.channels:
            raise ValueError(
                f"users must be in 1..{self.channels} (code length), got {self.users}"
            )


@dataclass(frozen=True)
class StoppingRule:
    """Stop a point after min_bit_errors errors or max_bits bits, whichever
    comes first. Bits are sent in whole pair periods, so max_bits is a floor
    rounded up to the next pair."""

    min_bit_errors: int = 100
    max_bits: int = 10_000_000

    def __post_init__(self):
        if self.min_bit_errors < 1:
            raise ValueError("min_bit_errors must be positive")
        if self.max_bits < 1:
            raise ValueError("max_bits must be positive")


@dataclass(frozen=True)
class BerRecord:
    """One measured BER point with its provenance."""

    scheme: str
    channel: str
    snr_db: float
    users: int
    bits_sent: int
    bit_errors: int
    ber: float
    ci95_low: float
    ci95_high: float
    master_seed: int


@dataclass(frozen=True)
class SweepConfig:
    """Cartesian sweep: schemes x channels x SNR grid."""

    schemes: tuple
    channels: tuple
    snr_start: float = 0.0
    snr_step: float = 2.0
    snr_stop: float = 20.0
    stopping: StoppingRule = StoppingRule()
    master_seed: int = 1

    def __post_init__(self):
        if not self.schemes:
            raise ValueError("sweep needs at least one scheme")
        if not self.channels:
            raise ValueError("sweep needs at least one channel")
        if self.snr_step <= 0:
            raise ValueError(f"snr_step must be positive, got {self.snr_step}")
        if self.snr_stop < self.snr_start:
            raise ValueError("snr_stop must not be below snr_start")

    def snr_points(self) -> tuple:
        count = int(np.floor((self.snr_stop - self.snr_start) / self.snr_step + 1e-9)) + 1
        return tuple(self.snr_start + i * self.snr_step for i in range(count))


def _draw_gains(spec, rng, count):
    """One fading gain per entry; exact-zero draws are rejected and redrawn."""
    gains = np.atleast_1d(np.asarray(draw_fading_gain(spec, rng, size=count)))
    while True:
        dead = gains == 0.0
        if not dead.any():
            return gains
        gains[dead] = np.atleast_1d(draw_fading_gain(spec, rng, size=int(dead.sum())))


def _draw_gain_pairs(spec, rng, count):
    """Two independent gains per entry; pairs where both faded to exactly
    zero are redrawn together."""
    g0 = np.atleast_1d(np.asarray(draw_fading_gain(spec, rng, size=count)))
    g1 = np.atleast_1d(np.asarray(draw_fading_gain(spec, rng, size=count)))
    while True:
        dead = (g0 == 0.0) & (g1 == 0.0)
        if not dead.any():
            return g0, g1
        k = int(dead.sum())
        g0[dead] = np.atleast_1d(draw_fading_gain(spec, rng, size=k))
        g1[dead] = np.atleast_1d(draw_fading_gain(spec, rng, size=k))


def _simulate_pairs(cfg, spec, code_rows, plan, sigma2, rng, n_pairs):
    """Push n_pairs pair-periods through the full chain; return (bits, errors)."""
    n_users, n_chan = cfg.users, cfg.channels
    bits = rng.integers(0, 2, size=(n_pairs, 2, n_users))
    frames = bpsk_map(bits)
    tx = synthesis_transform(plan, spread(frames, code_rows))

    if cfg.scheme == "alamouti":
        h0, h1 = _draw_gain_pairs(spec, rng, n_pairs)
        ch = ChannelRealization(h0[:, None], h1[:, None], sigma2)
        pair = alamouti_encode(tx[:, 0, :], tx[:, 1, :], power_split=cfg.power_split)
        noise = (
            draw_awgn((n_pairs, n_chan), sigma2, rng),
            draw_awgn((n_pairs, n_chan), sigma2, rng),
        )
        r0, r1 = alamouti_receive(pair, ch, noise)
        z0, z1 = alamouti_combine(r0, r1, ch)
        received = np.stack([z0, z1], axis=1)
    elif cfg.scheme == "mrc":
        blocks = tx.reshape(-1, n_chan)
        ha, hb = _draw_gain_pairs(spec, rng, blocks.shape[0])
        ra = ha[:, None] * blocks + draw_awgn(blocks.shape, sigma2, rng)
        rb = hb[:, None] * blocks + draw_awgn(blocks.shape, sigma2, rng)
        combined = mrc_combine(ra, rb, ha[:, None], hb[:, None])
        received = combined.reshape(n_pairs, 2, n_chan)
    else:
        blocks = tx.reshape(-1, n_chan)
        h = _draw_gains(spec, rng, blocks.shape[0])
        r = h[:, None] * blocks + draw_awgn(blocks.shape, sigma2, rng)
        received = no_diversity_equalize(r, h[:, None]).reshape(n_pairs, 2, n_chan)

    subchannels = analysis_transform(plan, received)
    estimates = np.stack(
        [despread(subchannels, code_rows[u]) for u in range(n_users)], axis=-1
    )
    decided = bpsk_demap(estimates)
    return bits.size, int(np.count_nonzero(decided != bits))


def _point_noise_variance(scheme_cfg, channel_spec, snr_db):
    if channel_spec.kind == "ideal":
        return 0.0
    return noise_variance(snr_db, float(scheme_cfg.channels))


def run_trial_block(scheme_cfg: SchemeConfig, channel_spec: ChannelSpec,
                    snr_db: float, rng: np.random.Generator) -> tuple:
    """Run one Alamouti pair's worth of traffic; return (bits_sent, bit_errors)."""
    code_rows = generate_walsh_hadamard(scheme_cfg.channels)
    plan = make_plan(scheme_cfg.channels, scheme_cfg.wavelet_family)
    sigma2 = _point_noise_variance(scheme_cfg, channel_spec, snr_db)
    return _simulate_pairs(scheme_cfg, channel_spec, code_rows, plan, sigma2, rng, 1)


def run_point(scheme_cfg: SchemeConfig, channel_spec: ChannelSpec, snr_db: float,
              stopping: StoppingRule, seed: int, threads: int = 1,
              batch_pairs: int = None) -> BerRecord:
    """Estimate the BER of one (scheme, channel, SNR) point.

    Batch i is a pure function of mix64(seed, i); batches accumulate in
    index order until the stopping rule fires, so the record is identical
    for any ``threads`` value. With threads > 1 whole waves of batches run
    speculatively and any past the stopping index are discarded.
    """
    bits_per_pair = 2 * scheme_cfg.users
    if batch_pairs is None:
        batch_pairs = max(1, -(-DEFAULT_BATCH_BITS // bits_per_pair))
    total_pairs = -(-stopping.max_bits // bits_per_pair)
    code_rows = generate_walsh_hadamard(scheme_cfg.channels)
    plan = make_plan(scheme_cfg.channels, scheme_cfg.wavelet_family)
    sigma2 = _point_noise_variance(scheme_cfg, channel_spec, snr_db)

    def pairs_in_batch(index):
        return max(0, min(batch_pairs, total_pairs - index * batch_pairs))

    def run_batch(index, n_pairs):
        rng = np.random.Generator(np.random.PCG64(mix64(seed, index)))
        return _simulate_pairs(
            scheme_cfg, channel_spec, code_rows, plan, sigma2, rng, n_pairs
        )

    bits_sent = 0
    bit_errors = 0

    def should_stop():
        return bit_errors >= stopping.min_bit_errors or bits_sent >= stopping.max_bits

    if threads <= 1:
        index = 0
        while not should_stop():
            n_pairs = pairs_in_batch(index)
            if n_pairs == 0:
                break
            b, e = run_batch(index, n_pairs)
            bits_sent += b
            bit_errors += e
            index += 1
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            next_index = 0
            stopped = False
            while not stopped:
                wave = []
                for index in range(next_index, next_index + threads):
                    n_pairs = pairs_in_batch(index)
                    if n_pairs == 0:
                        break
                    wave.append(pool.submit(run_batch, index, n_pairs))
                if not wave:
                    break
                for future in wave:
                    b, e = future.result()
                    if stopped:
                        continue
                    bits_sent += b
                    bit_errors += e
                    if should_stop():
                        stopped = True
                next_index += len(wave)

    if bits_sent == 0:
        raise ValueError("no bits were sent; stopping rule admits zero pairs")
    low, high = wilson_interval(bit_errors, bits_sent)
    return BerRecord(
        scheme=scheme_cfg.scheme,
        channel=channel_spec.kind,
        snr_db=float(snr_db),
        users=scheme_cfg.users,
        bits_sent=bits_sent,
        bit_errors=bit_errors,
        ber=bit_errors / bits_sent,
        ci95_low=low,
        ci95_high=high,
        master_seed=int(seed),
    )


def run_sweep(config: SweepConfig, threads: int = 1) -> list:
    """Run every (scheme, channel, SNR) triple of the sweep in order.

    Records are ordered by scheme, then channel (as configured), then
    ascending SNR; point k draws its seed as mix64(master_seed, k).
    """
    records = []
    index = 0
    for scheme_cfg in config.schemes:
        for channel_spec in config.channels:
            for snr_db in config.snr_points():
                point_seed = mix64(config.master_seed, index)
                records.append(
                    run_point(
                        scheme_cfg,
                        channel_spec,
                        snr_db,
                        config.stopping,
                        point_seed,
                        threads=threads,
                    )
                )
                index += 1
    return records


@dataclass(frozen=True)
class SelftestResult:
    name: str
    passed: bool
    detail: str


def _oracle_point(scheme, channel, snr_db, seed, min_errors=300, max_bits=2_000_000,
                  threads=1, **cfg_kwargs):
    cfg = SchemeConfig(scheme=scheme, **cfg_kwargs)
    spec = ChannelSpec(kind=channel)
    rule = StoppingRule(min_bit_errors=min_errors, max_bits=max_bits)
    return run_point(cfg, spec, snr_db, rule, seed, threads=threads)


def selftest(seed: int = 2024, threads: int = 1) -> list:
    """Check the simulator against its closed-form oracles.

    Returns one SelftestResult per oracle; BER comparisons use a 3-sigma
    binomial band around the closed form.
    """
    results = []

    def check(name, passed, detail):
        results.append(SelftestResult(name=name, passed=bool(passed), detail=detail))

    for order in (2, 4, 8):
        h = generate_walsh_hadamard(order)
        ok = np.array_equal(h @ h.T, order * np.eye(order, dtype=np.int64))
        check(f"walsh-orthogonality-M{order}", ok, "H @ H.T == M*I")

    rng = np.random.default_rng(seed)
    for family in ("haar", "db4"):
        worst = 0.0
        for order in (2, 4, 8):
            plan = make_plan(order, family)
            x = rng.standard_normal((200, order)) + 1j * rng.standard_normal((200, order))
            err = np.abs(analysis_transform(plan, synthesis_transform(plan, x)) - x).max()
            worst = max(worst, float(err))
        check(
            f"perfect-reconstruction-{family}",
            worst < 1e-10,
            f"max roundtrip error {worst:.2e} (tol 1e-10)",
        )

    for offset, scheme in enumerate(SCHEMES):
        rec = _oracle_point(scheme, "ideal", 0.0, mix64(seed, 10 + offset),
                            min_errors=1, max_bits=20_000, threads=threads)
        check(
            f"noiseless-zero-errors-{scheme}",
            rec.bit_errors == 0,
            f"{rec.bit_errors} errors over {rec.bits_sent} bits",
        )

    def ber_check(name, rec, expected):
        sigma = theory.binomial_sigma(expected, rec.bits_sent)
        ok = abs(rec.ber - expected) <= 3.0 * sigma
        check(
            name,
            ok,
            f"measured {rec.ber:.3e}, expected {expected:.3e} "
            f"+/- {3.0 * sigma:.1e} ({rec.bit_errors} errors)",
        )

    rec = _oracle_point("none", "awgn", 5.0, mix64(seed, 101), threads=threads)
    ber_check("awgn-q-function-5dB", rec, float(theory.awgn_bpsk_ber(5.0)))

    rec = _oracle_point("none", "rayleigh", 10.0, mix64(seed, 102), threads=threads)
    ber_check("rayleigh-single-branch-10dB", rec, float(theory.rayleigh_bpsk_ber(10.0)))

    rec = _oracle_point("mrc", "rayleigh", 10.0, mix64(seed, 103),
                        max_bits=4_000_000, threads=threads)
    ber_check("rayleigh-mrc-1x2-10dB", rec, float(theory.rayleigh_mrc2_ber(10.0)))

    rec = _oracle_point("alamouti", "rayleigh", 10.0, mix64(seed, 104),
                        max_bits=4_000_000, threads=threads)
    ber_check("rayleigh-alamouti-2x1-10dB", rec,
              float(theory.rayleigh_alamouti21_ber(10.0)))

    rng = np.random.default_rng(mix64(seed, 105))
    for kind in ("rayleigh", "rician"):
        spec = ChannelSpec(kind=kind)
        gains = draw_fading_gain(spec, rng, size=1_000_000)
        power = np.abs(gains) ** 2
        band = 3.0 * power.std() / np.sqrt(power.size)
        mean = float(power.mean())
        check(
            f"unit-fading-energy-{kind}",
            abs(mean - 1.0) <= band,
            f"E|h|^2 = {mean:.4f} (band +/- {band:.1e})",
        )

    return results
