#!/usr/bin/env python3
"""Drive the session service over its WebSocket, no browser required.

Uses the in-process ASGI test client, so nothing binds a port; the real
deployment is `uarm serve` plus the operator console at /console. The wire
format is the same either way: JSON envelopes {kind, payload, seq, t}.
"""

import json

from fastapi.testclient import TestClient

from armteleop import MappingParams
from armteleop.service import ServiceSettings, build_app

settings = ServiceSettings(
    config_id="config1",
    source="virtual",
    params=MappingParams(deadband_tau=0.25, interp_steps=2, ema_alpha=1.0, rate_hz=100.0),
)

with TestClient(build_app(settings)) as client:
    print("GET /api/config ->", json.dumps(client.get("/api/config").json()["params"]))

    with client.websocket_connect("/ws") as ws:
        hello = ws.receive_json()
        print(f"greeting: kind={hello['kind']} seq={hello['seq']} phase={hello['payload']['phase']}")

        def send(kind, payload):
            ws.send_text(json.dumps({"kind": kind, "payload": payload}))

        send("leader_angles", {"angles_deg": [0, 0, 0, 0, 0, 0]})
        for event in ("start", "follower_at_init", "calibration_done"):
            send("session_event", {"event": event})

        # wait for streaming before moving the virtual leader, otherwise the
        # nudge would overwrite the pose calibration is about to snapshot
        for _ in range(400):
            msg = ws.receive_json()
            if msg["kind"] == "session_event":
                print(f"event ack: {msg['payload']}")
                if msg["payload"]["phase"] == "STREAMING":
                    break

        # nudge joint 1 and watch the batch + state come back
        send("leader_angles", {"angles_deg": [15, 0, 0, 0, 0, 0]})
        got_batch = got_motion = False
        for _ in range(400):
            msg = ws.receive_json()
            if msg["kind"] == "command_batch" and not got_batch:
                print(f"command_batch tick {msg['payload']['tick']}: {msg['payload']['targets']}")
                got_batch = True
            elif msg["kind"] == "follower_state" and msg["payload"]["q"][0] > 14.9:
                print(f"follower arrived: q[0]={msg['payload']['q'][0]:.2f} at tick {msg['payload']['tick']}")
                got_motion = True
                break
        assert got_batch and got_motion

        send("session_event", {"event": "estop"})
        while True:
            msg = ws.receive_json()
            if msg["kind"] == "follower_state" and msg["payload"]["phase"] == "ESTOPPED":
                print("e-stop latched; stream keeps broadcasting state")
                break
