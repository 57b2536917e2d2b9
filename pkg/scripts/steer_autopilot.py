#!/usr/bin/env python3
"""Scripted operator for the steering server: follows a 1 m straight
overlay and a 90-degree turn using only set_gamma messages, like the
manual trajectory-control experiment. Run `ringbot serve` first, then
point this script at it; the server leaves a replayable recording.

Example:
    ringbot serve --curves curves.json --scenario free --speed-factor 50 &
    python scripts/steer_autopilot.py --port 8770
"""

import argparse
import asyncio
import json
import math

from ringbot.pilot import LinePilot


async def steer(host: str, port: int, course, max_periods: int) -> None:
    reader, writer = await asyncio.open_connection(host, port)
    pilot = LinePilot(course)

    async def recv_type(wanted):
        while True:
            line = await reader.readline()
            if not line:
                raise ConnectionError("server closed the connection")
            msg = json.loads(line)
            if msg["type"] == wanted:
                return msg

    for _ in range(max_periods):
        state = await recv_type("state")
        gamma = pilot.gamma_for(state["x"], state["y"],
                                math.radians(state["heading_deg"]))
        if gamma is None:
            print(f"course complete at k={state['k']} "
                  f"pos=({state['x']:.3f}, {state['y']:.3f})")
            break
        await writer_send(writer, {"type": "set_gamma",
                                   "deg": math.degrees(gamma)})
        await recv_type("ack")
    else:
        print("ran out of periods before completing the course")
    writer.close()


async def writer_send(writer, obj):
    writer.write(json.dumps(obj).encode() + b"\n")
    await writer.drain()


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--host", default="127.0.0.1")
    ap.add_argument("--port", type=int, default=8770)
    ap.add_argument("--max-periods", type=int, default=300)
    ap.add_argument("--course", default="0,0 1,0 1,0.6",
                    help="waypoints as 'x,y x,y ...'")
    args = ap.parse_args()
    course = [tuple(float(v) for v in wp.split(","))
              for wp in args.course.split()]
    asyncio.run(steer(args.host, args.port, course, args.max_periods))


if __name__ == "__main__":
    main()
