"""Network front end for a live teleop session.

One control thread owns the TeleopSession and ticks it at the configured
rate. WebSocket handlers never touch session state directly: session events
go through an unbounded inbox (never dropped), leader angles through a
latest-wins slot (stale readings are overwritten, matching what a real bus
poll would deliver), and outbound state flows through per-connection queues
stamped with a per-connection seq.

Endpoints: ``GET /api/config`` (active descriptor + params), ``WS /ws``
(duplex message stream), ``/console`` (static operator console, if built).
"""

from __future__ import annotations

import asyncio
import json
import threading
import time
from contextlib import asynccontextmanager
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import HTMLResponse
from fastapi.staticfiles import StaticFiles

from .configs import ConfigDescriptor, load_config
from .encoder import EncoderFrame, FrameDecoder, MockBus, MockScript, assemble_reading, reading_from_angles
from .errors import IncompleteReading, TeleopError, TransitionError
from .follower import DEFAULT_VMAX_DPS, make_backend
from .mapping import MappingParams
from .session import Event, Phase, TeleopSession

DEFAULT_BIND = "127.0.0.1:8787"
BROADCAST_MIN_HZ = 20.0


@dataclass
class ServiceSettings:
    """Everything `serve` needs, already merged from config/env/flags."""

    config_id: str = "config1"
    source: str = "virtual"  # serial | mock | virtual
    backend: str = "sim"
    bind: str = DEFAULT_BIND
    params: MappingParams = field(default_factory=MappingParams)
    vmax_dps: float = DEFAULT_VMAX_DPS
    data_dir: str | None = None
    script_path: str | None = None
    serial_device: str | None = None
    console_dir: str | None = None


class LatestSlot:
    """Thread-safe latest-wins holder for virtual leader readings."""

    def __init__(self):
        self._lock = threading.Lock()
        self._value = None

    def put(self, value) -> None:
        with self._lock:
            self._value = value

    def get(self):
        with self._lock:
            return self._value


class Hub:
    """Fan-out of control-thread messages to websocket connections.

    Each connection registers its asyncio loop and queue; the control thread
    hands messages over with call_soon_threadsafe. seq starts at 0 per
    connection and is stamped at enqueue time, so it is strictly increasing
    per connection even when a slow consumer forces drops.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self._conns: dict[int, tuple[asyncio.AbstractEventLoop, asyncio.Queue, dict]] = {}
        self._next_id = 0

    def register(self, loop, queue) -> int:
        with self._lock:
            cid = self._next_id
            self._next_id += 1
            self._conns[cid] = (loop, queue, {"seq": 0})
        return cid

    def unregister(self, cid: int) -> None:
        with self._lock:
            self._conns.pop(cid, None)

    def connection_count(self) -> int:
        with self._lock:
            return len(self._conns)

    def send_to(self, cid: int, kind: str, payload: dict, t_ms: float) -> None:
        with self._lock:
            entry = self._conns.get(cid)
            if entry is None:
                return
            self._enqueue(entry, kind, payload, t_ms)

    def broadcast(self, kind: str, payload: dict, t_ms: float) -> None:
        with self._lock:
            for entry in self._conns.values():
                self._enqueue(entry, kind, payload, t_ms)

    @staticmethod
    def _enqueue(entry, kind: str, payload: dict, t_ms: float) -> None:
        loop, queue, meta = entry
        msg = {"kind": kind, "payload": payload, "seq": meta["seq"], "t": max(t_ms, 0.0)}
        meta["seq"] += 1

        def _put():
            if queue.full():
                try:
                    queue.get_nowait()  # drop the oldest, keep the stream fresh
                except asyncio.QueueEmpty:
                    pass
            queue.put_nowait(msg)

        try:
            loop.call_soon_threadsafe(_put)
        except RuntimeError:
            pass  # connection's loop already closed


def _make_reading_source(settings: ServiceSettings, config: ConfigDescriptor, slot: LatestSlot):
    """Build the zero-arg callable the session polls each tick."""
    if settings.source == "virtual":

        def source() -> EncoderFrame | None:
            value = slot.get()
            if value is None:
                return None
            angles, ts = value
            return reading_from_angles(config, angles, ts)

        return source

    if settings.source == "mock":
        script = (
            MockScript.from_file(settings.script_path)
            if settings.script_path
            else MockScript.constant([135.0] * config.dof, duration_s=3600.0)
        )
        bus = MockBus(script, config, rate_hz=settings.params.rate_hz)
        decoder = FrameDecoder()
        counter = {"k": 0}

        def source() -> EncoderFrame | None:
            ts, chunk = bus.cycle(counter["k"])
            counter["k"] += 1
            frames = decoder.feed(chunk, ts)
            try:
                return assemble_reading(frames, config)
            except IncompleteReading:
                return None

        return source

    if settings.source == "serial":
        from .encoder import SerialSource

        if not settings.serial_device:
            raise TeleopError("source=serial requires a serial device path")
        port = SerialSource(settings.serial_device)
        decoder = FrameDecoder()
        latest: dict[int, object] = {}

        def source() -> EncoderFrame | None:  # pragma: no cover - hardware path
            ts, data = port.read()
            for frame in decoder.feed(data, ts):
                latest[frame.servo_id] = frame
            try:
                return assemble_reading(list(latest.values()), config)
            except IncompleteReading:
                return None

        return source

    raise TeleopError(f"unknown reading source {settings.source!r}")


class SessionService:
    """Owns the control thread and everything it needs."""

    def __init__(self, settings: ServiceSettings):
        self.settings = settings
        self.config = load_config(settings.config_id)
        self.hub = Hub()
        self.slot = LatestSlot()
        self.inbox: list = []  # session events, guarded by _inbox_lock
        self._inbox_lock = threading.Lock()
        backend = make_backend(
            settings.backend,
            self.config,
            **(
                {"vmax_dps": settings.vmax_dps, "dt": settings.params.command_dt}
                if settings.backend == "sim"
                else {}
            ),
        )
        record = Path(settings.data_dir) if settings.data_dir else None
        self.session = TeleopSession(
            self.config,
            settings.params,
            backend,
            _make_reading_source(settings, self.config, self.slot),
            record_path=record,
        )
        self._t0 = time.monotonic()
        self._stop = threading.Event()
        self._thread: threading.Thread | None = None

    # -- cross-thread entry points ----------------------------------------

    def post_event(self, event_name: str) -> None:
        with self._inbox_lock:
            self.inbox.append(event_name)

    def post_leader_angles(self, angles, timestamp_ns: int | None = None) -> None:
        ts = timestamp_ns if timestamp_ns is not None else time.monotonic_ns()
        self.slot.put((list(angles), ts))

    def t_ms(self) -> float:
        return (time.monotonic() - self._t0) * 1000.0

    # -- control thread ----------------------------------------------------

    def start(self) -> None:
        if self._thread is not None:
            return
        self._thread = threading.Thread(target=self._run, name="teleop-control", daemon=True)
        self._thread.start()

    def stop(self) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=2.0)
            self._thread = None

    def _drain_inbox(self) -> None:
        with self._inbox_lock:
            events, self.inbox = self.inbox, []
        for name in events:
            try:
                self.session.dispatch(Event(name))
                self.hub.broadcast(
                    "session_event",
                    {"event": name, "phase": self.session.phase.value},
                    self.t_ms(),
                )
            except (TeleopError, ValueError) as exc:
                self.hub.broadcast("error", {"message": str(exc)}, self.t_ms())

    def _run(self) -> None:
        period = 1.0 / max(self.settings.params.rate_hz, BROADCAST_MIN_HZ)
        next_tick = time.monotonic()
        while not self._stop.is_set():
            self._drain_inbox()
            if self.session.phase is Phase.STREAMING:
                self.session.tick()
                if self.session.last_batch is not None and self.session.last_batch:
                    self.hub.broadcast(
                        "command_batch",
                        {
                            "tick": self.session.last_batch.tick,
                            "targets": {
                                str(j): v
                                for j, v in self.session.last_batch.final_targets().items()
                            },
                        },
                        self.t_ms(),
                    )
            self.hub.broadcast("follower_state", self.session.follower_state_payload(), self.t_ms())
            next_tick += period
            delay = next_tick - time.monotonic()
            if delay > 0:
                self._stop.wait(delay)
            else:
                next_tick = time.monotonic()  # fell behind; do not bank ticks
        if self.session.phase is Phase.STREAMING:
            try:
                self.session.dispatch(Event.END)
            except TransitionError:
                pass

    # -- http/ws surface ---------------------------------------------------

    def describe(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "params": self.settings.params.to_dict(),
            "vmax_dps": self.settings.vmax_dps,
            "source": self.settings.source,
            "backend": self.settings.backend,
            "phase": self.session.phase.value,
        }


_FALLBACK_CONSOLE = """<!doctype html>
<html><head><title>armteleop</title></head>
<body><h1>armteleop session service</h1>
<p>The operator console has not been built. Run <code>npm install &amp;&amp; npm run build</code>
inside <code>frontend/</code>, then restart, or point --console-dir at a build.</p>
<p>API: <a href="/api/config">/api/config</a>; socket at <code>/ws</code>.</p>
</body></html>"""


def build_app(settings: ServiceSettings | None = None) -> FastAPI:
    settings = settings or ServiceSettings()
    service = SessionService(settings)

    @asynccontextmanager
    async def lifespan(_app: FastAPI):
        service.start()
        yield
        service.stop()

    app = FastAPI(title="armteleop session service", lifespan=lifespan)
    app.state.service = service

    @app.get("/api/config")
    async def get_config():
        return service.describe()

    @app.websocket("/ws")
    async def ws_endpoint(websocket: WebSocket):
        await websocket.accept()
        loop = asyncio.get_running_loop()
        queue: asyncio.Queue = asyncio.Queue(maxsize=256)
        cid = service.hub.register(loop, queue)
        # Greet with the current state so a console can render immediately.
        service.hub.send_to(
            cid, "follower_state", service.session.follower_state_payload(), service.t_ms()
        )

        async def sender():
            while True:
                msg = await queue.get()
                await websocket.send_text(json.dumps(msg))

        send_task = asyncio.create_task(sender())
        try:
            while True:
                text = await websocket.receive_text()
                try:
                    msg = json.loads(text)
                    kind = msg["kind"]
                    payload = msg.get("payload", {})
                except (json.JSONDecodeError, KeyError, TypeError):
                    service.hub.send_to(
                        cid, "error", {"message": "malformed message"}, service.t_ms()
                    )
                    continue
                if kind == "leader_angles":
                    angles = payload.get("angles_deg")
                    if isinstance(angles, list) and len(angles) == service.config.dof:
                        service.post_leader_angles(angles, payload.get("timestamp_ns"))
                    else:
                        service.hub.send_to(
                            cid,
                            "error",
                            {"message": f"leader_angles needs {service.config.dof} values"},
                            service.t_ms(),
                        )
                elif kind == "session_event":
                    event = payload.get("event")
                    if event in Event._value2member_map_:
                        service.post_event(event)
                    else:
                        service.hub.send_to(
                            cid, "error", {"message": f"unknown event {event!r}"}, service.t_ms()
                        )
                else:
                    service.hub.send_to(
                        cid, "error", {"message": f"unsupported kind {kind!r}"}, service.t_ms()
                    )
        except WebSocketDisconnect:
            pass
        finally:
            send_task.cancel()
            service.hub.unregister(cid)

    console_dir = settings.console_dir or str(Path(__file__).resolve().parents[2] / "frontend" / "dist")
    if Path(console_dir).is_dir():
        app.mount("/console", StaticFiles(directory=console_dir, html=True), name="console")
    else:

        @app.get("/console")
        async def console_placeholder():
            return HTMLResponse(_FALLBACK_CONSOLE)

    return app


def serve(settings: ServiceSettings) -> None:  # pragma: no cover - blocking entry point
    """Run uvicorn until interrupted."""
    import uvicorn

    host, _, port = settings.bind.partition(":")
    uvicorn.run(build_app(settings), host=host or "127.0.0.1", port=int(port or 8787), log_level="info")
