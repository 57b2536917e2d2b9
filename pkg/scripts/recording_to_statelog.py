#!/usr/bin/env python3
"""Convert a server-side session recording (inbound commands + period
indices) into a state log the browser console can load: the recording is
replayed deterministically and every resulting state is written as a
`state` message line."""

import argparse
import json
import math
from pathlib import Path

from ringbot.server import replay_recording


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("recording", help="session_*.ndjson written by the server")
    ap.add_argument("-o", "--out", help="default: <recording>.states.ndjson")
    args = ap.parse_args()

    driver = replay_recording(args.recording)
    out = Path(args.out) if args.out \
        else Path(args.recording).with_suffix(".states.ndjson")
    with open(out, "w") as fh:
        for s in driver.trail:
            fh.write(json.dumps({
                "type": "state",
                "k": s.period_index,
                "t": s.sim_time,
                "x": s.pose.x,
                "y": s.pose.y,
                "heading_deg": math.degrees(s.pose.heading),
                "gamma_deg": math.degrees(s.gamma),
                "contact": s.contact[0] if s.contact else None,
            }, sort_keys=True) + "\n")
    print(f"{len(driver.trail)} states -> {out}")


if __name__ == "__main__":
    main()
