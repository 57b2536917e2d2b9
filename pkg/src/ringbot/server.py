"""Live steering session server.

One session per connection: the simulation advances one period every
period_T/speed_factor seconds of wall clock, and a human (or script)
steers by sending messages. Simulation-affecting messages (set_gamma,
reset, scenario) are queued and applied at the next period boundary; the
ack reports the period index at which they took effect, so a recorded
session replays to a bit-identical trajectory. Wall-clock controls
(pause, resume, set_speed) apply immediately and never affect the
trajectory.

Transport: newline-delimited JSON over plain TCP, or the same messages as
WebSocket text frames - both on the same port (the first byte of a
connection distinguishes a WebSocket HTTP handshake from a JSON line).

Inbound:  set_gamma {deg}, reset {x,y,heading_deg}, scenario {name},
          pause, resume, set_speed {factor}
Outbound: state {k,t,x,y,heading_deg,gamma_deg,contact}, ack
          {applied_at_k}, verdict {...}, error {code}

Angles are degrees on the wire, radians internally.
"""

from __future__ import annotations

import asyncio
import base64
import hashlib
import json
import logging
import math
import struct
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

from . import __version__
from .arena import (
    Arena,
    SimState,
    build_scenario,
    canonical_scenario,
    lap_complete,
    params_for,
    set_gamma,
    step_period,
)
from .config import RunConfig, ScenarioConfig
from .estimation import ParamCurves
from .kinematics import MotionParams, Pose

log = logging.getLogger(__name__)

SIM_MESSAGES = ("set_gamma", "reset", "scenario")
CONTROL_MESSAGES = ("pause", "resume", "set_speed")

WS_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"


# ---------------------------------------------------------------------------
# deterministic simulation driver (shared by live sessions and replay)

@dataclass
class SimDriver:
    """Owns one session's simulation state and applies protocol messages
    at period boundaries. Everything here is wall-clock independent."""

    scenario: str
    scenario_config: ScenarioConfig
    curves: ParamCurves | None = None
    fixed_params: MotionParams | None = None
    robot_radius: float = 0.133
    start: tuple[float, float, float] | None = None  # x, y, heading rad

    arena: Arena = field(init=False)
    state: SimState = field(init=False)
    trail: list[SimState] = field(init=False)
    first_contact: SimState | None = field(init=False, default=None)
    verdict_sent: bool = field(init=False, default=False)
    stuck_sent: bool = field(init=False, default=False)

    def __post_init__(self):
        self.arena, self.state = self._build(self.scenario, self.start)
        self.trail = [self.state]

    def _build(self, name, start):
        sc = self.scenario_config
        return build_scenario(
            name,
            square_side=sc.square_side,
            wall_offset=sc.wall_offset,
            robot_radius=self.robot_radius,
            gamma=math.radians(sc.gamma_deg),
            start=start,
        )

    def current_params(self) -> MotionParams:
        return params_for(self.state, self.curves, self.fixed_params)

    def apply_message(self, msg: dict) -> dict:
        """Apply one simulation-affecting message (at a period boundary).
        Returns the ack; raises ProtocolError on bad input."""
        kind = msg["type"]
        k = self.state.period_index
        if kind == "set_gamma":
            deg = _require_number(msg, "deg")
            if self.curves is None:
                raise ProtocolError("no_curves",
                                    "set_gamma requires fitted curves")
            self.state = set_gamma(self.state, math.radians(deg), self.curves)
        elif kind == "reset":
            _, fresh = self._build(self.scenario, self._reset_pose(msg))
            self.state = replace(
                fresh,
                gamma=self.state.gamma,
                period_index=self.state.period_index,
                sim_time=self.state.sim_time,
            )
            self.first_contact = None
            self.verdict_sent = False
            self.stuck_sent = False
        elif kind == "scenario":
            name = msg.get("name")
            try:
                self.scenario = canonical_scenario(name)
            except (ValueError, TypeError) as exc:
                raise ProtocolError("bad_args", str(exc)) from None
            self.arena, fresh = self._build(self.scenario, None)
            self.state = replace(
                fresh,
                gamma=self.state.gamma,
                period_index=self.state.period_index,
                sim_time=self.state.sim_time,
            )
            self.first_contact = None
            self.verdict_sent = False
            self.stuck_sent = False
        else:
            raise ProtocolError("bad_type", f"unknown message type {kind!r}")
        self.trail.append(self.state)
        return {"type": "ack", "of": kind, "applied_at_k": k}

    def _reset_pose(self, msg) -> tuple[float, float, float] | None:
        if not any(key in msg for key in ("x", "y", "heading_deg")):
            return None  # scenario default start
        x = _require_number(msg, "x")
        y = _require_number(msg, "y")
        heading = math.radians(_require_number(msg, "heading_deg"))
        return (x, y, heading)

    def step(self) -> SimState:
        sc = self.scenario_config
        self.state = step_period(
            self.state, self.current_params(), self.arena,
            substeps=sc.substeps, slide_efficiency=sc.slide_efficiency,
            penetration_tol=sc.penetration_tol, stall_limit=sc.stall_limit,
        )
        if self.first_contact is None and self.state.contact is not None:
            self.first_contact = self.state
        self.trail.append(self.state)
        return self.state

    def pending_verdict(self) -> dict | None:
        """Verdict message to emit after the latest step, at most once."""
        if self.state.stuck and not self.stuck_sent:
            self.stuck_sent = True
            return {"type": "verdict", "kind": "stuck", "ok": False,
                    "k": self.state.period_index}
        if self.verdict_sent:
            return None
        if self.scenario == "avoidance" and self.first_contact is not None \
                and self.state.contact is None:
            self.verdict_sent = True
            return {
                "type": "verdict", "kind": "avoidance", "ok": True,
                "first_contact_k": self.first_contact.period_index,
                "detach_k": self.state.period_index,
            }
        if self.scenario == "boundary_lap":
            done = lap_complete(self.first_contact, self.state,
                                self.scenario_config.lap_tol)
            if done is not None:
                self.verdict_sent = True
                return {"type": "verdict", **done}
        return None

    def state_message(self) -> dict:
        s = self.state
        return {
            "type": "state",
            "k": s.period_index,
            "t": s.sim_time,
            "x": s.pose.x,
            "y": s.pose.y,
            "heading_deg": math.degrees(s.pose.heading),
            "gamma_deg": math.degrees(s.gamma),
            "contact": s.contact[0] if s.contact else None,
        }


class ProtocolError(Exception):
    def __init__(self, code: str, detail: str = ""):
        super().__init__(detail or code)
        self.code = code


def _require_number(msg: dict, key: str) -> float:
    value = msg.get(key)
    if not isinstance(value, (int, float)) or isinstance(value, bool) \
            or not math.isfinite(value):
        raise ProtocolError("bad_args", f"{key} must be a finite number")
    return float(value)


def parse_message(raw: str) -> dict:
    try:
        msg = json.loads(raw)
    except json.JSONDecodeError:
        raise ProtocolError("parse", "malformed JSON") from None
    if not isinstance(msg, dict) or not isinstance(msg.get("type"), str):
        raise ProtocolError("bad_type", "message must be {'type': ...}")
    return msg


# ---------------------------------------------------------------------------
# recording and replay

def driver_from_session_start(header: dict) -> SimDriver:
    curves = None
    if header.get("curves"):
        curves = ParamCurves.from_json_obj(header["curves"])
    fixed = None
    if header.get("params"):
        fixed = MotionParams(**header["params"])
    start = header.get("start")
    return SimDriver(
        scenario=header["scenario"],
        scenario_config=ScenarioConfig(**header["scenario_config"]),
        curves=curves,
        fixed_params=fixed,
        robot_radius=header.get("robot_radius", 0.133),
        start=None if start is None else (
            start["x"], start["y"], math.radians(start["heading_deg"])),
    )


def session_start_record(driver: SimDriver, speed_factor: float) -> dict:
    pose = driver.state.pose
    return {
        "type": "session_start",
        "version": __version__,
        "scenario": driver.scenario,
        "scenario_config": asdict(driver.scenario_config),
        "robot_radius": driver.robot_radius,
        "curves": driver.curves.to_json_obj() if driver.curves else None,
        "params": asdict(driver.fixed_params) if driver.fixed_params else None,
        "start": {"x": pose.x, "y": pose.y,
                  "heading_deg": math.degrees(pose.heading)},
        "gamma_deg": math.degrees(driver.state.gamma),
        "speed_factor": speed_factor,
    }


def replay_recording(lines, until_k: int | None = None) -> SimDriver:
    """Rebuild a session from its recording: apply each recorded message
    at its recorded period index and step to until_k (default: the last
    recorded index). The result is bit-identical to the live run."""
    if isinstance(lines, (str, Path)):
        lines = Path(lines).read_text().splitlines()
    header = None
    by_k: dict[int, list[dict]] = {}
    last_k = 0
    for line in lines:
        line = line.strip()
        if not line:
            continue
        obj = json.loads(line)
        if obj["type"] == "session_start":
            header = obj
        elif obj["type"] == "msg":
            k = obj["applied_at_k"]
            last_k = max(last_k, k)
            if obj["msg"]["type"] in SIM_MESSAGES:
                by_k.setdefault(k, []).append(obj["msg"])
        elif obj["type"] == "session_end":
            last_k = max(last_k, obj.get("k", 0))
    if header is None:
        raise ValueError("recording has no session_start line")
    driver = driver_from_session_start(header)
    target = until_k if until_k is not None else last_k
    while driver.state.period_index < target:
        for msg in by_k.get(driver.state.period_index, ()):
            driver.apply_message(msg)
        driver.step()
    return driver


# ---------------------------------------------------------------------------
# transports

class NdjsonTransport:
    """Newline-delimited JSON over a TCP stream."""

    def __init__(self, reader: asyncio.StreamReader,
                 writer: asyncio.StreamWriter, first_chunk: bytes = b""):
        self.reader = reader
        self.writer = writer
        self._buffer = bytearray(first_chunk)

    async def recv(self) -> str | None:
        while b"\n" not in self._buffer:
            chunk = await self.reader.read(4096)
            if not chunk:
                return None
            self._buffer.extend(chunk)
        line, _, rest = bytes(self._buffer).partition(b"\n")
        self._buffer = bytearray(rest)
        return line.decode("utf-8", errors="replace")

    async def send(self, text: str) -> None:
        self.writer.write(text.encode() + b"\n")
        await self.writer.drain()

    async def close(self) -> None:
        self.writer.close()


class WebSocketTransport:
    """Server side of RFC 6455, text frames only (enough for browsers)."""

    def __init__(self, reader: asyncio.StreamReader,
                 writer: asyncio.StreamWriter):
        self.reader = reader
        self.writer = writer
        self.closed = False

    @staticmethod
    async def handshake(reader, writer, first_chunk: bytes) -> "WebSocketTransport | None":
        data = bytearray(first_chunk)
        while b"\r\n\r\n" not in data:
            chunk = await reader.read(4096)
            if not chunk:
                return None
            data.extend(chunk)
            if len(data) > 65536:
                return None
        head, _, _ = bytes(data).partition(b"\r\n\r\n")
        lines = head.decode("latin-1").split("\r\n")
        headers = {}
        for line in lines[1:]:
            name, _, value = line.partition(":")
            headers[name.strip().lower()] = value.strip()
        key = headers.get("sec-websocket-key")
        if not key or "websocket" not in headers.get("upgrade", "").lower():
            writer.write(b"HTTP/1.1 400 Bad Request\r\n\r\n")
            await writer.drain()
            return None
        accept = base64.b64encode(
            hashlib.sha1((key + WS_GUID).encode()).digest()).decode()
        writer.write(
            b"HTTP/1.1 101 Switching Protocols\r\n"
            b"Upgrade: websocket\r\n"
            b"Connection: Upgrade\r\n"
            + f"Sec-WebSocket-Accept: {accept}\r\n\r\n".encode()
        )
        await writer.drain()
        return WebSocketTransport(reader, writer)

    async def _read_frame(self):
        head = await self.reader.readexactly(2)
        fin = bool(head[0] & 0x80)
        opcode = head[0] & 0x0F
        masked = bool(head[1] & 0x80)
        length = head[1] & 0x7F
        if length == 126:
            length = struct.unpack(">H", await self.reader.readexactly(2))[0]
        elif length == 127:
            length = struct.unpack(">Q", await self.reader.readexactly(8))[0]
        mask = await self.reader.readexactly(4) if masked else b""
        payload = await self.reader.readexactly(length) if length else b""
        if masked:
            payload = bytes(b ^ mask[i % 4] for i, b in enumerate(payload))
        return fin, opcode, payload

    async def recv(self) -> str | None:
        buffer = b""
        try:
            while True:
                fin, opcode, payload = await self._read_frame()
                if opcode == 0x8:  # close
                    await self._send_raw(0x8, b"")
                    return None
                if opcode == 0x9:  # ping
                    await self._send_raw(0xA, payload)
                    continue
                if opcode == 0xA:  # pong
                    continue
                if opcode in (0x1, 0x0):
                    buffer += payload
                    if fin:
                        return buffer.decode("utf-8", errors="replace")
                    continue
                # binary or reserved opcode: not a protocol message; the
                # session must survive, so surface it as unparsable text
                if fin:
                    return "\x00non-text frame"
        except (asyncio.IncompleteReadError, ConnectionError):
            return None

    async def _send_raw(self, opcode: int, payload: bytes) -> None:
        if self.closed:
            return
        header = bytes([0x80 | opcode])
        n = len(payload)
        if n < 126:
            header += bytes([n])
        elif n < 65536:
            header += bytes([126]) + struct.pack(">H", n)
        else:
            header += bytes([127]) + struct.pack(">Q", n)
        self.writer.write(header + payload)
        await self.writer.drain()

    async def send(self, text: str) -> None:
        await self._send_raw(0x1, text.encode())

    async def close(self) -> None:
        self.closed = True
        self.writer.close()


# ---------------------------------------------------------------------------
# live sessions

class Session:
    def __init__(self, session_id: str, driver: SimDriver, transport,
                 speed_factor: float, recording_path: Path):
        self.id = session_id
        self.driver = driver
        self.transport = transport
        self.speed_factor = speed_factor
        self.paused = False
        self.pending: list[dict] = []
        self.recording_path = recording_path
        self._rec = None

    def _record(self, obj: dict) -> None:
        self._rec.write(json.dumps(obj, sort_keys=True) + "\n")
        self._rec.flush()

    def _interval(self) -> float:
        return self.driver.current_params().period_T / self.speed_factor

    async def _send(self, obj: dict) -> None:
        await self.transport.send(json.dumps(obj, sort_keys=True))

    async def handle_inbound(self, raw: str) -> None:
        """Immediate handling: errors and wall-clock controls reply now,
        simulation messages wait for the next period boundary."""
        try:
            msg = parse_message(raw)
            kind = msg["type"]
            if kind in SIM_MESSAGES:
                self.pending.append(msg)
                return
            k = self.driver.state.period_index
            if kind == "pause":
                self.paused = True
            elif kind == "resume":
                self.paused = False
            elif kind == "set_speed":
                factor = _require_number(msg, "factor")
                if factor <= 0:
                    raise ProtocolError("bad_args", "factor must be > 0")
                self.speed_factor = factor
            else:
                raise ProtocolError("bad_type", f"unknown message type {kind!r}")
            self._record({"type": "msg", "applied_at_k": k, "msg": msg,
                          "control": True})
            await self._send({"type": "ack", "of": kind, "applied_at_k": k})
        except ProtocolError as exc:
            await self._send({"type": "error", "code": exc.code,
                              "detail": str(exc)})

    async def boundary(self) -> None:
        """Apply pending messages, step one period, broadcast."""
        mutated = False
        for msg in self.pending:
            k = self.driver.state.period_index
            try:
                ack = self.driver.apply_message(msg)
            except ProtocolError as exc:
                await self._send({"type": "error", "code": exc.code,
                                  "detail": str(exc)})
                continue
            self._record({"type": "msg", "applied_at_k": k, "msg": msg})
            await self._send(ack)
            mutated = True
        self.pending.clear()
        if mutated:
            await self._send(self.driver.state_message())
        self.driver.step()
        await self._send(self.driver.state_message())
        verdict = self.driver.pending_verdict()
        if verdict is not None:
            await self._send(verdict)

    async def run(self) -> None:
        self.recording_path.parent.mkdir(parents=True, exist_ok=True)
        self._rec = open(self.recording_path, "w")
        inbound: asyncio.Queue = asyncio.Queue()

        async def reader():
            while True:
                raw = await self.transport.recv()
                await inbound.put(raw)
                if raw is None:
                    return

        reader_task = asyncio.create_task(reader())
        try:
            self._record(session_start_record(self.driver, self.speed_factor))
            await self._send(self.driver.state_message())
            loop = asyncio.get_running_loop()
            deadline = loop.time() + self._interval()
            while True:
                timeout = None if self.paused \
                    else max(0.0, deadline - loop.time())
                try:
                    raw = await asyncio.wait_for(inbound.get(), timeout)
                except asyncio.TimeoutError:
                    await self.boundary()
                    deadline += self._interval()
                    if deadline < loop.time():  # fell behind; resync
                        deadline = loop.time() + self._interval()
                    continue
                if raw is None:
                    return
                was_paused = self.paused
                await self.handle_inbound(raw)
                if was_paused and not self.paused:
                    deadline = loop.time() + self._interval()
        except ConnectionError:
            pass
        finally:
            reader_task.cancel()
            self._record({"type": "session_end",
                          "k": self.driver.state.period_index})
            self._rec.close()
            await self.transport.close()


# ---------------------------------------------------------------------------
# server

async def _handle_connection(reader, writer, make_driver, speed_factor,
                             recording_dir, counter):
    peer = writer.get_extra_info("peername")
    try:
        first = await asyncio.wait_for(reader.read(1), timeout=0.5)
    except asyncio.TimeoutError:
        first = b""
    if first == b"G":
        transport = await WebSocketTransport.handshake(reader, writer, first)
        if transport is None:
            writer.close()
            return
    else:
        transport = NdjsonTransport(reader, writer, first)
    session_id = f"{time.strftime('%Y%m%d_%H%M%S')}_{next(counter):04d}"
    session = Session(
        session_id, make_driver(), transport, speed_factor,
        Path(recording_dir) / f"session_{session_id}.ndjson",
    )
    log.info("session %s from %s", session_id, peer)
    try:
        await session.run()
    except Exception:
        log.exception("session %s crashed", session_id)
    log.info("session %s ended at k=%d; recording %s",
             session_id, session.driver.state.period_index,
             session.recording_path)


def _counter():
    n = 0
    while True:
        yield n
        n += 1


async def start_server(
    host: str = "127.0.0.1",
    port: int = 0,
    curves: ParamCurves | None = None,
    fixed_params: MotionParams | None = None,
    scenario: str = "free",
    speed_factor: float = 10.0,
    recording_dir: str | Path = "recordings",
    run_config: RunConfig | None = None,
):
    """Bind and return (asyncio server, bound port)."""
    cfg = run_config or RunConfig()
    counter = _counter()

    def make_driver() -> SimDriver:
        return SimDriver(
            scenario=canonical_scenario(scenario),
            scenario_config=cfg.scenario,
            curves=curves,
            fixed_params=fixed_params,
            robot_radius=cfg.robot.contact_radius,
        )

    async def handler(reader, writer):
        await _handle_connection(reader, writer, make_driver, speed_factor,
                                 recording_dir, counter)

    server = await asyncio.start_server(handler, host, port)
    bound_port = server.sockets[0].getsockname()[1]
    return server, bound_port


def serve_forever(
    host: str,
    port: int,
    curves: ParamCurves | None,
    scenario: str,
    speed_factor: float,
    recording_dir: str,
    run_config: RunConfig | None = None,
    fixed_params: MotionParams | None = None,
) -> None:
    async def main():
        server, bound_port = await start_server(
            host=host, port=port, curves=curves, fixed_params=fixed_params,
            scenario=scenario, speed_factor=speed_factor,
            recording_dir=recording_dir, run_config=run_config,
        )
        print(f"listening on {host}:{bound_port} "
              f"(TCP newline-JSON and WebSocket)")
        async with server:
            await server.serve_forever()

    asyncio.run(main())
