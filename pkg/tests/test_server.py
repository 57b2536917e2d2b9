import asyncio
import base64
import hashlib
import json
import math
import os
import struct

import pytest

from ringbot.config import RunConfig, ScenarioConfig
from ringbot.kinematics import MotionParams
from ringbot.server import (
    SimDriver,
    driver_from_session_start,
    parse_message,
    replay_recording,
    session_start_record,
    start_server,
)
from ringbot.synth import TRUTH_CURVES

FIXED = MotionParams(delta_phi=math.radians(20), delta_x=0.05,
                     period_T=2.0, beta=0.2)


class TcpClient:
    def __init__(self, reader, writer):
        self.reader = reader
        self.writer = writer

    @classmethod
    async def connect(cls, port):
        reader, writer = await asyncio.open_connection("127.0.0.1", port)
        return cls(reader, writer)

    async def send(self, obj):
        line = obj if isinstance(obj, str) else json.dumps(obj)
        self.writer.write(line.encode() + b"\n")
        await self.writer.drain()

    async def recv(self, timeout=5.0):
        line = await asyncio.wait_for(self.reader.readline(), timeout)
        assert line, "connection closed unexpectedly"
        return json.loads(line)

    async def recv_type(self, wanted, timeout=5.0):
        for _ in range(200):
            msg = await self.recv(timeout)
            if msg["type"] == wanted:
                return msg
        raise AssertionError(f"no {wanted} message received")

    def close(self):
        self.writer.close()


def run(coro):
    return asyncio.run(asyncio.wait_for(coro, 30))


def server_kwargs(tmp_path, **kw):
    base = dict(
        port=0,
        fixed_params=FIXED,
        scenario="free",
        speed_factor=200.0,   # 10 ms per period at T = 2 s
        recording_dir=tmp_path / "recordings",
    )
    base.update(kw)
    return base


class TestSessionFlow:
    def test_idle_client_receives_periodic_states(self, tmp_path):
        async def scenario():
            server, port = await start_server(**server_kwargs(tmp_path))
            async with server:
                client = await TcpClient.connect(port)
                states = [await client.recv_type("state") for _ in range(4)]
                client.close()
            return states

        states = run(scenario())
        assert [s["k"] for s in states] == [0, 1, 2, 3]
        assert states[1]["x"] != states[0]["x"]
        assert states[2]["t"] == pytest.approx(2 * FIXED.period_T)

    def test_two_clients_are_isolated(self, tmp_path):
        async def scenario():
            server, port = await start_server(
                **server_kwargs(tmp_path, curves=TRUTH_CURVES,
                                fixed_params=None))
            async with server:
                a = await TcpClient.connect(port)
                b = await TcpClient.connect(port)
                await a.recv_type("state")
                await b.recv_type("state")
                await a.send({"type": "set_gamma", "deg": 250})
                await a.recv_type("ack")
                a_state = await a.recv_type("state")
                for _ in range(3):
                    b_state = await b.recv_type("state")
                a.close()
                b.close()
                return a_state, b_state

        a_state, b_state = run(scenario())
        assert a_state["gamma_deg"] == pytest.approx(250)
        assert b_state["gamma_deg"] == pytest.approx(0.0)

    def test_set_gamma_acks_with_period_index(self, tmp_path):
        async def scenario():
            server, port = await start_server(
                **server_kwargs(tmp_path, curves=TRUTH_CURVES,
                                fixed_params=None))
            async with server:
                client = await TcpClient.connect(port)
                await client.recv_type("state")
                await client.send({"type": "set_gamma", "deg": 120})
                ack = await client.recv_type("ack")
                after = await client.recv_type("state")
                client.close()
                return ack, after

        ack, after = run(scenario())
        assert ack["of"] == "set_gamma"
        assert after["k"] >= ack["applied_at_k"]
        assert after["gamma_deg"] == pytest.approx(120)

    def test_malformed_json_keeps_session_alive(self, tmp_path):
        async def scenario():
            server, port = await start_server(**server_kwargs(tmp_path))
            async with server:
                client = await TcpClient.connect(port)
                await client.recv_type("state")
                await client.send("this is not json")
                err = await client.recv_type("error")
                await client.send({"type": "pause"})
                ack = await client.recv_type("ack")
                client.close()
                return err, ack

        err, ack = run(scenario())
        assert err["code"] == "parse"
        assert ack["of"] == "pause"

    def test_unknown_type_and_bad_args(self, tmp_path):
        async def scenario():
            server, port = await start_server(**server_kwargs(tmp_path))
            async with server:
                client = await TcpClient.connect(port)
                await client.recv_type("state")
                await client.send({"type": "warp_drive"})
                e1 = await client.recv_type("error")
                await client.send({"type": "set_speed", "factor": -1})
                e2 = await client.recv_type("error")
                await client.send({"type": "set_gamma", "deg": "NaN"})
                e3 = await client.recv_type("error")
                client.close()
                return e1, e2, e3

        e1, e2, e3 = run(scenario())
        assert e1["code"] == "bad_type"
        assert e2["code"] == "bad_args"
        assert e3["code"] in ("bad_args", "no_curves")

    def test_set_gamma_without_curves_is_error(self, tmp_path):
        async def scenario():
            server, port = await start_server(**server_kwargs(tmp_path))
            async with server:
                client = await TcpClient.connect(port)
                await client.recv_type("state")
                await client.send({"type": "set_gamma", "deg": 90})
                err = await client.recv_type("error")
                state = await client.recv_type("state")
                client.close()
                return err, state

        err, state = run(scenario())
        assert err["code"] == "no_curves"
        assert state["k"] >= 1  # session kept stepping

    def test_pause_freezes_stepping(self, tmp_path):
        async def scenario():
            server, port = await start_server(**server_kwargs(tmp_path))
            async with server:
                client = await TcpClient.connect(port)
                await client.recv_type("state")
                await client.send({"type": "pause"})
                await client.recv_type("ack")
                # drain anything already in flight, then expect silence
                await asyncio.sleep(0.1)
                while True:
                    try:
                        await asyncio.wait_for(client.reader.readline(), 0.15)
                    except asyncio.TimeoutError:
                        break
                paused_quiet = True
                await client.send({"type": "resume"})
                await client.recv_type("ack")
                state = await client.recv_type("state")
                client.close()
                return paused_quiet, state

        paused_quiet, state = run(scenario())
        assert paused_quiet
        assert state["type"] == "state"

    def test_reset_moves_pose(self, tmp_path):
        async def scenario():
            server, port = await start_server(**server_kwargs(tmp_path))
            async with server:
                client = await TcpClient.connect(port)
                await client.recv_type("state")
                await client.send({"type": "reset", "x": 5.0, "y": -3.0,
                                   "heading_deg": 90.0})
                await client.recv_type("ack")
                snapshot = await client.recv_type("state")
                client.close()
                return snapshot

        snapshot = run(scenario())
        assert snapshot["x"] == pytest.approx(5.0)
        assert snapshot["y"] == pytest.approx(-3.0)
        assert snapshot["heading_deg"] == pytest.approx(90.0)


class TestRecordingAndReplay:
    def _find_recording(self, tmp_path):
        rec_dir = tmp_path / "recordings"
        files = sorted(rec_dir.glob("session_*.ndjson"))
        assert files, "no recording persisted"
        return files[-1]

    def test_recording_persisted_after_abrupt_close(self, tmp_path):
        async def scenario():
            server, port = await start_server(**server_kwargs(tmp_path))
            async with server:
                client = await TcpClient.connect(port)
                for _ in range(3):
                    await client.recv_type("state")
                client.writer.transport.abort()  # hard kill, no goodbye
                await asyncio.sleep(0.3)

        run(scenario())
        rec = self._find_recording(tmp_path)
        lines = [json.loads(l) for l in rec.read_text().splitlines()]
        assert lines[0]["type"] == "session_start"
        assert lines[0]["params"]["delta_x"] == FIXED.delta_x

    def test_replay_reproduces_live_session_bit_exactly(self, tmp_path):
        async def scenario():
            server, port = await start_server(
                **server_kwargs(tmp_path, curves=TRUTH_CURVES,
                                fixed_params=None))
            async with server:
                client = await TcpClient.connect(port)
                wire_states = [await client.recv_type("state")]
                for deg in (250, 100, 30):
                    await client.send({"type": "set_gamma", "deg": deg})
                    for _ in range(3):
                        wire_states.append(await client.recv_type("state"))
                client.close()
                await asyncio.sleep(0.2)
            return wire_states

        wire_states = run(scenario())
        driver = replay_recording(self._find_recording(tmp_path))
        replay_states = [
            {
                "k": s.period_index,
                "x": s.pose.x,
                "y": s.pose.y,
                "heading_deg": math.degrees(s.pose.heading),
                "gamma_deg": math.degrees(s.gamma),
            }
            for s in driver.trail
        ]
        assert len(replay_states) >= len(wire_states)
        for wire, rep in zip(wire_states, replay_states):
            assert wire["k"] == rep["k"]
            assert wire["x"] == rep["x"]            # bit-identical
            assert wire["y"] == rep["y"]
            assert wire["heading_deg"] == rep["heading_deg"]
            assert wire["gamma_deg"] == rep["gamma_deg"]


class TestCadence:
    def test_stepping_cadence_does_not_drift(self, tmp_path):
        """Absolute-deadline scheduling: elapsed wall time for N periods
        stays within one period of N * (period_T / speed_factor)."""
        periods = 150
        interval = FIXED.period_T / 100.0  # 20 ms per period

        async def scenario():
            server, port = await start_server(
                **server_kwargs(tmp_path, speed_factor=100.0))
            async with server:
                client = await TcpClient.connect(port)
                loop = asyncio.get_running_loop()
                first = await client.recv_type("state")
                t0 = loop.time()
                last = first
                while last["k"] < first["k"] + periods:
                    last = await client.recv_type("state")
                elapsed = loop.time() - t0
                client.close()
                return elapsed

        elapsed = run(scenario())
        drift_periods = abs(elapsed - periods * interval) / interval
        assert drift_periods < 1.0


class TestWebSocket:
    @staticmethod
    async def ws_connect(port):
        reader, writer = await asyncio.open_connection("127.0.0.1", port)
        key = base64.b64encode(os.urandom(16)).decode()
        writer.write(
            (f"GET / HTTP/1.1\r\nHost: localhost:{port}\r\n"
             f"Upgrade: websocket\r\nConnection: Upgrade\r\n"
             f"Sec-WebSocket-Key: {key}\r\n"
             f"Sec-WebSocket-Version: 13\r\n\r\n").encode())
        await writer.drain()
        head = await reader.readuntil(b"\r\n\r\n")
        assert b"101" in head.split(b"\r\n")[0]
        expect = base64.b64encode(hashlib.sha1(
            (key + "258EAFA5-E914-47DA-95CA-C5AB0DC85B11").encode()
        ).digest())
        assert expect in head
        return reader, writer

    @staticmethod
    async def ws_send(writer, text):
        payload = text.encode()
        mask = os.urandom(4)
        masked = bytes(b ^ mask[i % 4] for i, b in enumerate(payload))
        header = bytes([0x81])
        n = len(payload)
        if n < 126:
            header += bytes([0x80 | n])
        else:
            header += bytes([0x80 | 126]) + struct.pack(">H", n)
        writer.write(header + mask + masked)
        await writer.drain()

    @staticmethod
    async def ws_recv(reader, timeout=5.0):
        head = await asyncio.wait_for(reader.readexactly(2), timeout)
        opcode = head[0] & 0x0F
        length = head[1] & 0x7F
        if length == 126:
            length = struct.unpack(">H", await reader.readexactly(2))[0]
        payload = await reader.readexactly(length)
        return opcode, payload

    def test_websocket_session(self, tmp_path):
        async def scenario():
            server, port = await start_server(
                **server_kwargs(tmp_path, curves=TRUTH_CURVES,
                                fixed_params=None))
            async with server:
                reader, writer = await self.ws_connect(port)
                opcode, payload = await self.ws_recv(reader)
                first = json.loads(payload)
                await self.ws_send(writer, json.dumps(
                    {"type": "set_gamma", "deg": 200}))
                got_ack = None
                for _ in range(50):
                    opcode, payload = await self.ws_recv(reader)
                    msg = json.loads(payload)
                    if msg["type"] == "ack":
                        got_ack = msg
                        break
                writer.close()
                return first, got_ack

        first, ack = run(scenario())
        assert first["type"] == "state" and first["k"] == 0
        assert ack is not None and ack["of"] == "set_gamma"


class TestDriverAndProtocol:
    def make_driver(self, **kw):
        base = dict(scenario="free", scenario_config=ScenarioConfig(),
                    fixed_params=FIXED)
        base.update(kw)
        return SimDriver(**base)

    def test_parse_message_rejects_non_objects(self):
        from ringbot.server import ProtocolError
        for raw in ("[1,2]", '"text"', "42", "{}"):
            with pytest.raises(ProtocolError):
                parse_message(raw)

    def test_session_start_round_trip(self):
        driver = self.make_driver()
        header = session_start_record(driver, speed_factor=10)
        clone = driver_from_session_start(header)
        assert clone.state.pose == driver.state.pose
        assert clone.fixed_params == driver.fixed_params

    def test_driver_step_matches_arena_sim(self):
        driver = self.make_driver()
        states = [driver.step() for _ in range(5)]
        assert [s.period_index for s in states] == [1, 2, 3, 4, 5]

    def test_boundary_lap_verdict_over_protocol(self, tmp_path):
        driver = self.make_driver(
            scenario="boundary_lap",
            fixed_params=MotionParams(delta_phi=math.radians(-10),
                                      delta_x=0.06, period_T=2.5),
        )
        verdict = None
        for _ in range(2000):
            driver.step()
            verdict = driver.pending_verdict()
            if verdict:
                break
        assert verdict is not None
        assert verdict["ok"] and verdict["kind"] == "boundary_lap"

    def test_replay_with_until_k(self):
        driver = self.make_driver()
        header = session_start_record(driver, 10)
        lines = [json.dumps(header),
                 json.dumps({"type": "msg", "applied_at_k": 2,
                             "msg": {"type": "reset", "x": 1.0, "y": 1.0,
                                     "heading_deg": 0.0}}),
                 json.dumps({"type": "session_end", "k": 5})]
        replayed = replay_recording(lines, until_k=5)
        assert replayed.state.period_index == 5
        # pose passed through the reset at k=2 and stepped 3 more periods
        mirror = self.make_driver()
        for _ in range(2):
            mirror.step()
        mirror.apply_message({"type": "reset", "x": 1.0, "y": 1.0,
                              "heading_deg": 0.0})
        for _ in range(3):
            mirror.step()
        assert replayed.state.pose == mirror.state.pose
