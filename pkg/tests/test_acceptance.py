"""Acceptance suite: one test per criterion, each printing a pass line.

Run with ``pytest tests/test_acceptance.py -s`` to see the per-criterion
lines; the whole suite is seeded and deterministic.
"""

import time

import numpy as np
from scipy import stats

from mcsim import theory
from mcsim.channel import ChannelSpec, draw_fading_gain
from mcsim.cli import main
from mcsim.codes import generate_walsh_hadamard
from mcsim.diversity import (
    ChannelRealization,
    alamouti_combine,
    alamouti_encode,
    alamouti_receive,
)
from mcsim.engine import SchemeConfig, StoppingRule, run_point
from mcsim.wavelet import analysis_transform, make_plan, synthesis_transform

AWGN = ChannelSpec("awgn")
RAYLEIGH = ChannelSpec("rayleigh")
RICIAN = ChannelSpec("rician", rician_k_db=6.0)


class _Criterion:
    def __init__(self, number, title, budget_s):
        self.number = number
        self.title = title
        self.budget_s = budget_s
        self.start = time.perf_counter()

    def done(self, detail=""):
        elapsed = time.perf_counter() - self.start
        suffix = f" [{detail}]" if detail else ""
        print(f"PASS criterion {self.number} ({self.title}): {elapsed:.1f}s{suffix}")
        assert elapsed < self.budget_s, (
            f"criterion {self.number} took {elapsed:.1f}s, budget {self.budget_s}s"
        )


def _assert_within_3sigma(record, expected, label):
    sigma = theory.binomial_sigma(expected, record.bits_sent)
    assert abs(record.ber - expected) <= 3.0 * sigma, (
        f"{label}: measured {record.ber:.4e}, expected {expected:.4e} "
        f"+/- {3 * sigma:.2e} ({record.bit_errors} errors / {record.bits_sent} bits)"
    )
    assert record.bit_errors >= 300, f"{label}: only {record.bit_errors} errors collected"


def test_criterion_01_walsh_orthogonality():
    crit = _Criterion(1, "Walsh-Hadamard orthogonality", 1.0)
    for order in (2, 4, 8):
        h = generate_walsh_hadamard(order)
        assert np.array_equal(h @ h.T, order * np.eye(order, dtype=np.int64))
    crit.done("H @ H.T == M*I exactly for M in {2,4,8}")


def test_criterion_02_perfect_reconstruction_and_parseval():
    crit = _Criterion(2, "perfect reconstruction", 5.0)
    rng = np.random.default_rng(202)
    worst_pr = 0.0
    worst_parseval = 0.0
    for family in ("haar", "db4"):
        for channels in (2, 4, 8):
            plan = make_plan(channels, family)
            blocks = rng.standard_normal((1000, channels)) + 1j * rng.standard_normal(
                (1000, channels)
            )
            time_samples = synthesis_transform(plan, blocks)
            back = analysis_transform(plan, time_samples)
            worst_pr = max(worst_pr, float(np.abs(back - blocks).max()))
            norms_in = np.linalg.norm(blocks, axis=-1)
            norms_out = np.linalg.norm(time_samples, axis=-1)
            worst_parseval = max(worst_parseval, float(np.abs(norms_in - norms_out).max()))
    assert worst_pr < 1e-10
    assert worst_parseval < 1e-10
    crit.done(f"roundtrip {worst_pr:.1e}, Parseval {worst_parseval:.1e}")


def test_criterion_03_noiseless_end_to_end():
    crit = _Criterion(3, "noiseless end-to-end", 10.0)
    ideal = ChannelSpec("ideal")
    rule = StoppingRule(min_bit_errors=1, max_bits=100_000)
    for scheme in ("none", "mrc", "alamouti"):
        record = run_point(SchemeConfig(scheme=scheme, users=4), ideal, 0.0, rule, seed=303)
        assert record.bits_sent >= 100_000
        assert record.bit_errors == 0, f"{scheme}: {record.bit_errors} errors"
    crit.done("zero errors over 1e5 bits for none/mrc/alamouti")


def test_criterion_04_alamouti_algebra_and_decision_rules():
    crit = _Criterion(4, "Alamouti algebra", 5.0)
    rng = np.random.default_rng(404)
    n = 10_000
    h0 = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2)
    h1 = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2)
    x0 = 1.0 - 2.0 * rng.integers(0, 2, (n, 4)) + 0j
    x1 = 1.0 - 2.0 * rng.integers(0, 2, (n, 4)) + 0j
    ch = ChannelRealization(h0[:, None], h1[:, None], 0.0)
    pair = alamouti_encode(x0, x1, power_split=False)
    zeros = (np.zeros((n, 4), complex), np.zeros((n, 4), complex))
    s0, s1 = alamouti_combine(*alamouti_receive(pair, ch, zeros), ch)
    scale = (np.abs(h0) ** 2 + np.abs(h1) ** 2)[:, None]
    worst = max(
        float(np.abs(s0 - scale * x0).max()), float(np.abs(s1 - scale * x1).max())
    )
    assert worst < 1e-10

    # full ML metric (with the energy term) vs the distance-only rule
    m = 100_000
    z = 3.0 * (rng.standard_normal(m) + 1j * rng.standard_normal(m))
    alpha_sq = rng.uniform(0.0, 10.0, m)
    symbols = np.array([1.0 + 0j, -1.0 + 0j])
    d_sq = (z[:, None] - symbols) * np.conj(z[:, None] - symbols)
    eq7 = np.argmin((alpha_sq[:, None] - 1.0) * np.abs(symbols) ** 2 + d_sq.real, axis=1)
    eq9 = np.argmin(d_sq.real, axis=1)
    assert np.array_equal(eq7, eq9)
    crit.done(f"combine error {worst:.1e}; decision rules agree on {m} inputs")


def test_criterion_05_awgn_q_function_oracle():
    crit = _Criterion(5, "AWGN Q-function oracle", 120.0)
    rule = StoppingRule(min_bit_errors=300, max_bits=120_000_000)
    for users in (1, 4):
        for snr_db in (0.0, 2.0, 4.0, 6.0, 8.0, 10.0):
            record = run_point(
                SchemeConfig("none", users=users), AWGN, snr_db, rule,
                seed=505 + users * 100 + int(snr_db), threads=4,
            )
            expected = float(theory.awgn_bpsk_ber(snr_db))
            _assert_within_3sigma(record, expected, f"U={users} {snr_db:g} dB")
    crit.done("U in {1,4}, 0..10 dB vs Q(sqrt(2*gamma)), >=300 errors each")


def test_criterion_06_rayleigh_diversity_oracles():
    crit = _Criterion(6, "Rayleigh closed-form oracles", 180.0)
    rule = StoppingRule(min_bit_errors=300, max_bits=20_000_000)

    record = run_point(SchemeConfig("none"), RAYLEIGH, 10.0, rule, seed=601)
    _assert_within_3sigma(record, float(theory.rayleigh_bpsk_ber(10.0)), "none 10 dB")

    record = run_point(SchemeConfig("mrc"), RAYLEIGH, 10.0, rule, seed=602)
    _assert_within_3sigma(record, float(theory.rayleigh_mrc2_ber(10.0)), "mrc 10 dB")

    record = run_point(SchemeConfig("alamouti"), RAYLEIGH, 10.0, rule, seed=603)
    _assert_within_3sigma(
        record, float(theory.rayleigh_alamouti21_ber(10.0)), "alamouti 10 dB"
    )

    # across the grid: Alamouti with the power split equals the MRC formula
    # evaluated at half the mean SNR
    for snr_db in (0.0, 4.0, 8.0, 12.0, 16.0, 20.0):
        record = run_point(
            SchemeConfig("alamouti"), RAYLEIGH, snr_db, rule,
            seed=610 + int(snr_db), threads=4,
        )
        expected = float(theory.rayleigh_mrc2_ber(snr_db - 10.0 * np.log10(2.0)))
        _assert_within_3sigma(record, expected, f"alamouti {snr_db:g} dB")
    crit.done("none/mrc/alamouti at 10 dB plus alamouti grid vs MRC(g/2)")


def test_criterion_07_paper_orderings():
    crit = _Criterion(7, "paper BER orderings", 180.0)
    # AWGN at 5 dB: full per-antenna power (no split) reproduces the paper's
    # Alamouti-beats-direct ordering with disjoint confidence intervals.
    rule = StoppingRule(min_bit_errors=300, max_bits=8_000_000)
    none_rec = run_point(SchemeConfig("none"), AWGN, 5.0, rule, seed=701)
    alam_rec = run_point(
        SchemeConfig("alamouti", power_split=False), AWGN, 5.0, rule, seed=702
    )
    assert alam_rec.ber < none_rec.ber
    assert alam_rec.ci95_high < none_rec.ci95_low, (
        f"CIs overlap: alamouti high {alam_rec.ci95_high:.3e} vs "
        f"none low {none_rec.ci95_low:.3e}"
    )

    # fading channels: diversity gain over the no-diversity baseline holds
    # with the default power split at every grid SNR >= 2 dB
    rule = StoppingRule(min_bit_errors=600, max_bits=3_000_000)
    for spec in (RICIAN, RAYLEIGH):
        for i, snr_db in enumerate(np.arange(2.0, 21.0, 2.0)):
            none_rec = run_point(
                SchemeConfig("none"), spec, snr_db, rule, seed=710 + i, threads=4
            )
            alam_rec = run_point(
                SchemeConfig("alamouti"), spec, snr_db, rule, seed=750 + i, threads=4
            )
            assert alam_rec.ber < none_rec.ber, (
                f"{spec.kind} {snr_db:g} dB: alamouti {alam_rec.ber:.3e} "
                f"not below none {none_rec.ber:.3e}"
            )
    crit.done("AWGN 5 dB disjoint CIs; alamouti < none on rician/rayleigh, 2..20 dB")


def test_criterion_08_deterministic_csv(tmp_path):
    crit = _Criterion(8, "byte-identical CSV across threads", 120.0)
    cfg = tmp_path / "sweep.cfg"
    cfg.write_text("snr_start = 0\nsnr_step = 4\nsnr_stop = 8\nmax_bits = 200000\n")
    outputs = []
    for name, threads in (("a.csv", "1"), ("b.csv", "8"), ("c.csv", "1")):
        out = tmp_path / name
        code = main(
            ["run", "--config", str(cfg), "--seed", "42",
             "--out", str(out), "--threads", threads]
        )
        assert code == 0
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1] == outputs[2]
    assert len(outputs[0].splitlines()) == 1 + 3 * 3 * 3
    crit.done("threads 1 vs 8 and repeat runs all byte-identical")


def test_criterion_09_channel_statistics():
    crit = _Criterion(9, "fading channel statistics", 30.0)
    for kind, spec in (("rayleigh", RAYLEIGH), ("rician", RICIAN)):
        gains = draw_fading_gain(spec, np.random.default_rng(901), size=1_000_000)
        power = np.abs(gains) ** 2
        band = 3.0 * power.std() / np.sqrt(power.size)
        assert abs(power.mean() - 1.0) <= band, f"{kind}: E|h|^2 = {power.mean():.4f}"

    n = 100_000
    ray = np.abs(draw_fading_gain(RAYLEIGH, np.random.default_rng(902), size=n))
    ric = np.abs(
        draw_fading_gain(
            ChannelSpec("rician", rician_k_db=-300.0), np.random.default_rng(903), size=n
        )
    )
    statistic = stats.ks_2samp(ray, ric).statistic
    critical = 1.628 * np.sqrt(2.0 / n)
    assert statistic < critical, f"KS {statistic:.4f} >= {critical:.4f}"
    crit.done(f"unit fading energy at 3-sigma; KS statistic {statistic:.4f} < {critical:.4f}")
