"""WebSocket bridge: the bus contract served to browsers.

One endpoint, /ws. On connect the client receives every retained
message (so the dashboard renders current state instantly), then a live
feed of everything published. Frames both ways are

    {"topic": "dcm/...", "payload": {...}}

Clients may only publish under dcm/cmd/; anything else is answered with
a local error frame and not forwarded. Bus deliveries arrive on the
runner's thread, so they are handed to the event loop through
call_soon_threadsafe rather than touching the socket directly.
"""

from __future__ import annotations

import asyncio
import logging
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles

from dcmctl.telemetry.bus import MessageBus
from dcmctl.telemetry.topics import CMD_PREFIX

log = logging.getLogger(__name__)


def create_app(bus: MessageBus, static_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="dcmctl bridge")

    @app.get("/healthz")
    async def healthz():
        return {"ok": True}

    @app.websocket("/ws")
    async def ws(websocket: WebSocket):
        await websocket.accept()
        loop = asyncio.get_running_loop()
        outbound: asyncio.Queue = asyncio.Queue()

        def on_message(topic: str, payload: dict):
            loop.call_soon_threadsafe(outbound.put_nowait, {"topic": topic, "payload": payload})

        # subscribing replays retained state into the queue first
        unsubscribe = bus.subscribe("#", on_message)

        async def pump():
            while True:
                frame = await outbound.get()
                await websocket.send_json(frame)

        sender = asyncio.create_task(pump())
        try:
            while True:
                frame = await websocket.receive_json()
                topic = frame.get("topic") if isinstance(frame, dict) else None
                if not isinstance(topic, str) or not topic.startswith(CMD_PREFIX):
                    await websocket.send_json(
                        {"error": "clients may only publish dcm/cmd/* topics", "frame": frame}
                    )
                    continue
                bus.publish(topic, frame.get("payload"))
        except WebSocketDisconnect:
            pass
        except Exception:
            log.exception("websocket session failed")
        finally:
            unsubscribe()
            sender.cancel()

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="static")

    return app
