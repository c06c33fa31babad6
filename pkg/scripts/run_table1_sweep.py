#!/usr/bin/env python3
"""Run the reference sweep (4 users, length-4 codes, all schemes and
channels, SNR 0..20 dB step 2) and write results/ber.csv.

Tighten or loosen the error target with --min-errors; 100 errors per
point keeps the full sweep to a few minutes on a laptop.
"""

import argparse
import pathlib
import sys

from mcsim.cli import emit_csv, format_config, _resolve
from mcsim.cli import _build_sweep
from mcsim.engine import run_sweep


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--min-errors", type=int, default=100)
    parser.add_argument("--max-bits", type=int, default=10_000_000)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--out", default="results/ber.csv")
    args = parser.parse_args()

    resolved = _resolve(
        {
            "seed": str(args.seed),
            "min_errors": str(args.min_errors),
            "max_bits": str(args.max_bits),
        }
    )
    config = _build_sweep(resolved)
    sys.stderr.write(format_config(resolved))

    records = run_sweep(config, threads=args.threads)
    out = pathlib.Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    emit_csv(records, out)
    print(f"wrote {len(records)} points to {out}")


if __name__ == "__main__":
    main()
