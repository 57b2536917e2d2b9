#!/usr/bin/env python3
"""Generate synthetic marker tracks for the gamma sweep experiment.

Writes one CSV per (gamma, repeat) into the output directory, following
the lab protocol: gamma from 60 to 300 degrees in steps of 60, three
repeats each, 12 periods per run. Position noise is optional and seeded.
"""

import argparse
import math
from pathlib import Path

import numpy as np

from ringbot.synth import gamma_sweep
from ringbot.tracks import write_track_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-o", "--out-dir", default="data/tracks")
    ap.add_argument("--noise-std", type=float, default=0.0,
                    help="Gaussian position noise, meters")
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--periods", type=int, default=12)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(args.seed)
    runs = gamma_sweep(repeats=args.repeats, num_periods=args.periods,
                       rng=rng, noise_std=args.noise_std)
    counts = {}
    specs = []
    for gamma, track in runs:
        deg = round(math.degrees(gamma))
        rep = counts.get(deg, 0)
        counts[deg] = rep + 1
        path = out_dir / f"g{deg:03d}_r{rep}.csv"
        write_track_csv(path, track, header_comments=[
            f"synthetic track gamma_deg={deg} repeat={rep} "
            f"noise_std={args.noise_std} seed={args.seed}",
        ])
        specs.append(f"{deg}:{path}:{args.periods}")
        print(f"wrote {path}")
    print("\nfit them with:\n  ringbot fit " + " ".join(specs)
          + f" -o {out_dir / 'curves.json'}")


if __name__ == "__main__":
    main()
