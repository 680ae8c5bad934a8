"""Line-delimited JSON over a local TCP socket, one Session per connection.

A reader thread feeds a queue; the per-connection worker owns the Session,
applies messages between steps, and emits frames while playing (paced to a
60 fps target). Selection messages are never dropped: the queue always
drains before the next tick.
"""
from __future__ import annotations

import json
import queue
import socketserver
import threading

from .session import Session

FRAME_BUDGET = 1.0 / 60.0

_WAKE = object()


class _Handler(socketserver.StreamRequestHandler):
    def handle(self):
        session = Session(
            seed=self.server.session_seed,
            default_graph_path=self.server.graph_path,
        )
        inbox: queue.Queue = queue.Queue()
        eof = threading.Event()

        def reader():
            try:
                for line in self.rfile:
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        inbox.put(json.loads(line))
                    except json.JSONDecodeError:
                        inbox.put({"kind": "__malformed__"})
            finally:
                eof.set()
                inbox.put(_WAKE)

        threading.Thread(target=reader, daemon=True).start()

        try:
            while not (eof.is_set() and inbox.empty()):
                timeout = FRAME_BUDGET if session.playing else 0.25
                try:
                    msg = inbox.get(timeout=timeout)
                except queue.Empty:
                    if session.playing and session.state is not None:
                        self._send(session.tick())
                    continue
                if msg is _WAKE:
                    continue
                for reply in session.handle(msg):
                    self._send(reply)
        except BrokenPipeError:
            pass

    def _send(self, reply: dict) -> None:
        self.wfile.write(json.dumps(reply).encode() + b"\n")
        self.wfile.flush()


class _Server(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True


class SessionServer:
    """Embeddable server handle; use port 0 for an ephemeral port."""

    def __init__(
        self,
        host: str = "127.0.0.1",
        port: int = 0,
        graph_path: str | None = None,
        seed: int | None = None,
    ):
        self._server = _Server((host, port), _Handler)
        self._server.graph_path = graph_path
        self._server.session_seed = seed
        self._thread: threading.Thread | None = None

    @property
    def address(self) -> tuple[str, int]:
        return self._server.server_address  # type: ignore[return-value]

    def start(self) -> "SessionServer":
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        self._server.shutdown()
        self._server.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)


def serve_forever(
    host: str = "127.0.0.1",
    port: int = 7641,
    graph_path: str | None = None,
    seed: int | None = None,
) -> None:
    server = SessionServer(host, port, graph_path, seed)
    print(f"phlayout session server listening on {server.address[0]}:{server.address[1]}")
    try:
        server._server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server._server.server_close()
