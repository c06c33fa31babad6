"""Command-line front end: config parsing, sweep execution, CSV output.

Config files are plain ``key = value`` lines (UTF-8, ``#`` starts a
comment). Every key is optional; defaults reproduce the reference setup
of 4 users on length-4 Walsh-Hadamard codes, all three schemes, all
three channels, SNR 0..20 dB in 2 dB steps. The resolved configuration
is echoed as a valid config block on stderr, so piping it back into
``--config`` reproduces the run byte-for-byte.

Exit codes: 0 success, 1 validation/selftest/IO failure, 2 usage error.
"""

import argparse
import os
import sys

from .channel import CHANNEL_KINDS, ChannelSpec
from .engine import (
    SCHEMES,
    SchemeConfig,
    StoppingRule,
    SweepConfig,
    run_sweep,
    selftest,
)
from .wavelet import make_filter_pair

__all__ = ["ConfigError", "parse_config", "format_config", "emit_csv", "main"]

DEFAULT_SEED = 1

_DEFAULTS = {
    "users": "4",
    "code_length": "4",
    "wavelet": "haar",
    "schemes": "none,mrc,alamouti",
    "channels": "awgn,rayleigh,rician",
    "snr_start": "0",
    "snr_step": "2",
    "snr_stop": "20",
    "rician_k_db": "6",
    "power_split": "on",
    "min_errors": "100",
    "max_bits": "10000000",
    "seed": str(DEFAULT_SEED),
    "output": "-",
}

_CSV_HEADER = "scheme,channel,snr_db,users,bits_sent,bit_errors,ber,ci95_low,ci95_high,seed"


class ConfigError(ValueError):
    """A config line or value failed validation."""


def _parse_items(text: str) -> dict:
    items = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _DEFAULTS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if not value:
            raise ConfigError(f"line {lineno}: empty value for key {key!r}")
        items[key] = value
    return items


def _to_int(key, raw):
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        as_float = float(raw)
    except ValueError:
        raise ConfigError(f"key {key!r}: expected an integer, got {raw!r}") from None
    if as_float != int(as_float):
        raise ConfigError(f"key {key!r}: expected an integer, got {raw!r}")
    return int(as_float)


def _to_float(key, raw):
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"key {key!r}: expected a number, got {raw!r}") from None


def _to_flag(key, raw):
    lowered = raw.lower()
    if lowered in ("on", "true", "1", "yes"):
        return True
    if lowered in ("off", "false", "0", "no"):
        return False
    raise ConfigError(f"key {key!r}: expected on/off, got {raw!r}")


def _to_list(key, raw, allowed):
    names = [name.strip() for name in raw.split(",") if name.strip()]
    if not names:
        raise ConfigError(f"key {key!r}: empty list")
    for name in names:
        if name not in allowed:
            raise ConfigError(
                f"key {key!r}: unknown entry {name!r}; expected one of {allowed}"
            )
    return names


def _resolve(items: dict) -> dict:
    resolved = dict(_DEFAULTS)
    resolved.update(items)

    users = _to_int("users", resolved["users"])
    code_length = _to_int("code_length", resolved["code_length"])
    if code_length < 1 or code_length & (code_length - 1):
        raise ConfigError(f"key 'code_length': must be a power of two, got {code_length}")
    if users < 1:
        raise ConfigError(f"key 'users': must be positive, got {users}")
    if users > code_length:
        raise ConfigError(f"key 'users': users exceeds code_length ({users} > {code_length})")
    try:
        make_filter_pair(resolved["wavelet"])
    except ValueError as exc:
        raise ConfigError(f"key 'wavelet': {exc}") from None

    schemes = _to_list("schemes", resolved["schemes"], SCHEMES)
    channels = _to_list("channels", resolved["channels"], CHANNEL_KINDS)

    snr_start = _to_float("snr_start", resolved["snr_start"])
    snr_step = _to_float("snr_step", resolved["snr_step"])
    snr_stop = _to_float("snr_stop", resolved["snr_stop"])
    if snr_step <= 0:
        raise ConfigError(f"key 'snr_step': must be positive, got {snr_step}")
    if snr_stop < snr_start:
        raise ConfigError("key 'snr_stop': must not be below snr_start")

    min_errors = _to_int("min_errors", resolved["min_errors"])
    max_bits = _to_int("max_bits", resolved["max_bits"])
    if min_errors < 1:
        raise ConfigError(f"key 'min_errors': must be positive, got {min_errors}")
    if max_bits < 1:
        raise ConfigError(f"key 'max_bits': must be positive, got {max_bits}")

    return {
        "users": users,
        "code_length": code_length,
        "wavelet": resolved["wavelet"],
        "schemes": schemes,
        "channels": channels,
        "snr_start": snr_start,
        "snr_step": snr_step,
        "snr_stop": snr_stop,
        "rician_k_db": _to_float("rician_k_db", resolved["rician_k_db"]),
        "power_split": _to_flag("power_split", resolved["power_split"]),
        "min_errors": min_errors,
        "max_bits": max_bits,
        "seed": _to_int("seed", resolved["seed"]),
        "output": resolved["output"],
    }


def _build_sweep(resolved: dict) -> SweepConfig:
    scheme_cfgs = tuple(
        SchemeConfig(
            scheme=name,
            users=resolved["users"],
            channels=resolved["code_length"],
            wavelet_family=resolved["wavelet"],
            power_split=resolved["power_split"],
        )
        for name in resolved["schemes"]
    )
    channel_specs = tuple(
        ChannelSpec(kind=name, rician_k_db=resolved["rician_k_db"])
        for name in resolved["channels"]
    )
    return SweepConfig(
        schemes=scheme_cfgs,
        channels=channel_specs,
        snr_start=resolved["snr_start"],
        snr_step=resolved["snr_step"],
        snr_stop=resolved["snr_stop"],
        stopping=StoppingRule(
            min_bit_errors=resolved["min_errors"], max_bits=resolved["max_bits"]
        ),
        master_seed=resolved["seed"],
    )


def parse_config(text: str) -> SweepConfig:
    """Parse config text, merging file values over the defaults."""
    return _build_sweep(_resolve(_parse_items(text)))


def _format_value(key, value):
    if key in ("schemes", "channels"):
        return ",".join(value)
    if key == "power_split":
        return "on" if value else "off"
    if isinstance(value, float):
        return f"{value:g}"
    return str(value)


def format_config(resolved: dict) -> str:
    """Render a resolved config as valid config-file text (round-trippable)."""
    lines = [f"{key} = {_format_value(key, resolved[key])}" for key in _DEFAULTS]
    return "\n".join(lines) + "\n"


def emit_csv(records, destination) -> None:
    """Write BER records as CSV, byte-for-byte deterministic.

    ``destination`` is a path or a text file object. BER and interval
    bounds are printed in scientific notation with 6 significant digits.
    """
    if not records:
        raise ValueError("no records to write")
    rows = [_CSV_HEADER]
    for r in records:
        rows.append(
            f"{r.scheme},{r.channel},{r.snr_db:.2f},{r.users},{r.bits_sent},"
            f"{r.bit_errors},{r.ber:.5e},{r.ci95_low:.5e},{r.ci95_high:.5e},"
            f"{r.master_seed}"
        )
    payload = "\n".join(rows) + "\n"
    if hasattr(destination, "write"):
        destination.write(payload)
    else:
        with open(destination, "w", encoding="utf-8", newline="") as handle:
            handle.write(payload)


def _snr_triple(raw):
    parts = raw.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(
            f"expected start:step:stop, got {raw!r}"
        )
    try:
        start, step, stop = (float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"non-numeric SNR grid {raw!r}") from None
    if step <= 0:
        raise argparse.ArgumentTypeError(f"SNR step must be positive, got {step:g}")
    if stop < start:
        raise argparse.ArgumentTypeError("SNR stop must not be below start")
    return start, step, stop


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="mcsim",
        description="Wavelet MC-CDMA link simulator: BER vs SNR sweeps with "
        "selectable antenna diversity.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a sweep and write CSV")
    run.add_argument("--config", help="config file (key = value lines)")
    run.add_argument("--seed", type=int, help="master seed (overrides config/env)")
    run.add_argument("--out", help="output CSV path ('-' for stdout)")
    run.add_argument(
        "--scheme", action="append", choices=SCHEMES,
        help="restrict to this scheme (repeatable)",
    )
    run.add_argument(
        "--channel", action="append", choices=CHANNEL_KINDS,
        help="restrict to this channel (repeatable)",
    )
    run.add_argument(
        "--snr", type=_snr_triple, metavar="START:STEP:STOP",
        help="SNR grid in dB",
    )
    run.add_argument(
        "--threads", type=int, default=1,
        help="worker threads (0 = auto, 1 = single-threaded reference)",
    )

    self_test = sub.add_parser("selftest", help="run the closed-form oracle suite")
    self_test.add_argument("--seed", type=int, default=2024)
    self_test.add_argument("--threads", type=int, default=1)
    return parser


def _resolve_threads(threads):
    if threads < 0:
        raise ConfigError(f"--threads must be >= 0, got {threads}")
    return threads if threads > 0 else (os.cpu_count() or 1)


def _cmd_run(args) -> int:
    items = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as handle:
                text = handle.read()
        except OSError as exc:
            print(f"mcsim: cannot read config: {exc}", file=sys.stderr)
            return 1
        items = _parse_items(text)
    if "seed" not in items and args.seed is None:
        env_seed = os.environ.get("MCSIM_SEED")
        if env_seed is not None:
            items["seed"] = env_seed
    if args.seed is not None:
        items["seed"] = str(args.seed)
    if args.scheme:
        items["schemes"] = ",".join(dict.fromkeys(args.scheme))
    if args.channel:
        items["channels"] = ",".join(dict.fromkeys(args.channel))
    if args.snr:
        start, step, stop = args.snr
        items["snr_start"] = f"{start:g}"
        items["snr_step"] = f"{step:g}"
        items["snr_stop"] = f"{stop:g}"
    if args.out:
        items["output"] = args.out

    resolved = _resolve(items)
    config = _build_sweep(resolved)
    threads = _resolve_threads(args.threads)

    print("# resolved configuration", file=sys.stderr)
    sys.stderr.write(format_config(resolved))

    records = run_sweep(config, threads=threads)
    if resolved["output"] == "-":
        emit_csv(records, sys.stdout)
    else:
        emit_csv(records, resolved["output"])
    return 0


def _cmd_selftest(args) -> int:
    threads = _resolve_threads(args.threads)
    results = selftest(seed=args.seed, threads=threads)
    failed = 0
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        failed += not result.passed
        print(f"{status} {result.name}: {result.detail}")
    print(f"{len(results) - failed}/{len(results)} oracles passed")
    return 0 if failed == 0 else 1


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_selftest(args)
    except ConfigError as exc:
        print(f"mcsim: config error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"mcsim: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
