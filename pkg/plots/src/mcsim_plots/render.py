"""Render BER-vs-SNR figures from a simulator sweep CSV.

One semilog-y figure per channel, one labeled curve per diversity
scheme, with optional 95% CI whiskers. Zero-BER points cannot sit on a
log axis, so they are clamped to a configurable floor and drawn with a
distinct marker.

The CSV-to-curves transformation is a pure function
(``build_figure_data``) so tests check grouping, ordering, clamping and
labels on data rather than on rendered pixels.
"""

import argparse
import csv
import sys
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

REQUIRED_COLUMNS = (
    "scheme",
    "channel",
    "snr_db",
    "users",
    "bits_sent",
    "bit_errors",
    "ber",
    "ci95_low",
    "ci95_high",
    "seed",
)

SCHEME_STYLE = {
    "none": dict(color="tab:red", marker="o", linestyle="-", label="no diversity"),
    "mrc": dict(color="tab:green", marker="s", linestyle="--", label="MRC 1x2"),
    "alamouti": dict(color="tab:blue", marker="^", linestyle="-", label="Alamouti 2x1"),
}


class SchemaError(ValueError):
    """The CSV is missing required columns."""


class NoDataError(ValueError):
    """Nothing left to plot after filtering."""


@dataclass(frozen=True)
class PlotSpec:
    """What to read, where to write, and how to treat zero-BER points."""

    input_csv: str
    output_prefix: str
    channels: tuple = ()  # empty tuple = every channel present
    floor: float = 1e-5
    whiskers: bool = True


@dataclass
class Curve:
    """One scheme's points on one channel's figure."""

    scheme: str
    snr_db: list = field(default_factory=list)
    ber: list = field(default_factory=list)
    ci_low: list = field(default_factory=list)
    ci_high: list = field(default_factory=list)
    clamped: list = field(default_factory=list)


def load_records(path):
    """Read the sweep CSV into a list of typed row dicts."""
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        header = reader.fieldnames or []
        missing = [col for col in REQUIRED_COLUMNS if col not in header]
        if missing:
            raise SchemaError(f"CSV is missing columns: {', '.join(missing)}")
        rows = []
        for row in reader:
            rows.append(
                {
                    "scheme": row["scheme"],
                    "channel": row["channel"],
                    "snr_db": float(row["snr_db"]),
                    "ber": float(row["ber"]),
                    "ci95_low": float(row["ci95_low"]),
                    "ci95_high": float(row["ci95_high"]),
                }
            )
    return rows


def build_figure_data(records, floor=1e-5, channels=()):
    """Group records into per-channel, per-scheme curves.

    Returns {channel: {scheme: Curve}} with points sorted by SNR and
    zero (or sub-floor) BERs clamped to the floor, flagged in
    ``Curve.clamped``.
    """
    wanted = set(channels) if channels else None
    grouped = {}
    for row in records:
        if wanted is not None and row["channel"] not in wanted:
            continue
        curves = grouped.setdefault(row["channel"], {})
        curve = curves.setdefault(row["scheme"], Curve(scheme=row["scheme"]))
        clamp = row["ber"] < floor
        curve.snr_db.append(row["snr_db"])
        curve.ber.append(floor if clamp else row["ber"])
        curve.ci_low.append(max(row["ci95_low"], floor))
        curve.ci_high.append(max(row["ci95_high"], floor))
        curve.clamped.append(clamp)
    if not grouped:
        raise NoDataError("no records match the requested channels")
    for curves in grouped.values():
        for curve in curves.values():
            order = sorted(range(len(curve.snr_db)), key=curve.snr_db.__getitem__)
            for attr in ("snr_db", "ber", "ci_low", "ci_high", "clamped"):
                setattr(curve, attr, [getattr(curve, attr)[i] for i in order])
    return grouped


def _draw_channel(channel, curves, spec):
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    for scheme, curve in sorted(curves.items()):
        style = SCHEME_STYLE.get(scheme, dict(marker="x", linestyle="-", label=scheme))
        if spec.whiskers:
            lower = [max(b - lo, 0.0) for b, lo in zip(curve.ber, curve.ci_low)]
            upper = [max(hi - b, 0.0) for b, hi in zip(curve.ber, curve.ci_high)]
            ax.errorbar(
                curve.snr_db, curve.ber, yerr=[lower, upper],
                capsize=2, elinewidth=0.8, **style,
            )
        else:
            ax.plot(curve.snr_db, curve.ber, **style)
        clamped_x = [x for x, c in zip(curve.snr_db, curve.clamped) if c]
        if clamped_x:
            ax.plot(
                clamped_x, [spec.floor] * len(clamped_x),
                marker="v", linestyle="none", color=style.get("color", "k"),
                markerfacecolor="white", label=None,
            )
    ax.set_yscale("log")
    ax.set_xlabel("SNR (dB)")
    ax.set_ylabel("BER")
    ax.set_ylim(bottom=spec.floor / 2)
    ax.set_title(f"{channel} channel")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    path = f"{spec.output_prefix}_{channel}.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render(spec: PlotSpec):
    """Render one figure per channel in the CSV; returns the file paths."""
    records = load_records(spec.input_csv)
    grouped = build_figure_data(records, floor=spec.floor, channels=spec.channels)
    return [
        _draw_channel(channel, curves, spec) for channel, curves in sorted(grouped.items())
    ]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="mcsim-plots",
        description="Render semilog BER-vs-SNR figures from an mcsim sweep CSV.",
    )
    parser.add_argument("--input", required=True, help="sweep CSV path")
    parser.add_argument(
        "--out-prefix", required=True,
        help="output path prefix; figures land at <prefix>_<channel>.png",
    )
    parser.add_argument(
        "--channel", action="append", default=[],
        help="only plot this channel (repeatable; default: all present)",
    )
    parser.add_argument("--floor", type=float, default=1e-5,
                        help="y-axis floor for zero-BER points")
    parser.add_argument("--no-whiskers", action="store_true",
                        help="skip the confidence-interval whiskers")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    spec = PlotSpec(
        input_csv=args.input,
        output_prefix=args.out_prefix,
        channels=tuple(args.channel),
        floor=args.floor,
        whiskers=not args.no_whiskers,
    )
    try:
        paths = render(spec)
    except (OSError, SchemaError, NoDataError) as exc:
        print(f"mcsim-plots: {exc}", file=sys.stderr)
        return 1
    for path in paths:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
