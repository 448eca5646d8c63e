"""Interactive bridge: newline-delimited JSON over a stream socket.

Every transcript record goes out as ``{"at":..,"channel":..,"detail":..}``;
clients inject commands as one JSON object per line:

    {"cmd":"arm"} {"cmd":"disarm"} {"cmd":"release_relays"}
    {"cmd":"tilt","kind":"DOOR","deg":45}
    {"cmd":"owner_sms","from":"+923001234567","body":"LOCK"}
    {"cmd":"pause"} {"cmd":"resume"} {"cmd":"speed","ratio":4}

Malformed input gets an ``{"error": "..."}`` reply and the session
continues.  On connect a client first receives the full record history,
so every client observes the identical stream.

Two wire flavors share one port: raw TCP NDJSON, and the same lines
carried in WebSocket text frames when the peer opens with an HTTP
upgrade (that is what the browser console uses).

Threading: one simulation thread owns all state and paces virtual time
against the wall clock (ratio = speed).  Socket threads only parse
bytes and push work onto the command queue.
"""

from __future__ import annotations

import base64
import hashlib
import json
import queue
import socket
import struct
import threading
import time

from ..vehicle import IntrusionKind
from .engine import Simulation
from .transcript import TranscriptRecord

_WS_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"


def _record_json(record: TranscriptRecord) -> str:
    return json.dumps(
        {"at": record.at, "channel": record.channel, "detail": record.detail},
        separators=(",", ":"),
    )


class _Client:
    def __init__(self, sock: socket.socket, websocket: bool):
        self.sock = sock
        self.websocket = websocket
        self.lock = threading.Lock()
        self.alive = True

    def send_line(self, text: str) -> None:
        payload = (text + "\n").encode("utf-8")
        if self.websocket:
            payload = _ws_text_frame(payload)
        try:
            with self.lock:
                self.sock.sendall(payload)
        except OSError:
            self.alive = False

    def close(self) -> None:
        self.alive = False
        try:
            self.sock.close()
        except OSError:
            pass


def _ws_text_frame(payload: bytes) -> bytes:
    head = bytearray([0x81])  # FIN + text opcode
    n = len(payload)
    if n < 126:
        head.append(n)
    elif n < 1 << 16:
        head.append(126)
        head += struct.pack(">H", n)
    else:
        head.append(127)
        head += struct.pack(">Q", n)
    return bytes(head) + payload


class BridgeServer:
    def __init__(self, sim: Simulation, host: str = "127.0.0.1",
                 port: int = 0, speed: float = 1.0):
        self.sim = sim
        self.host = host
        self.speed = speed
        self.paused = False
        self._commands: queue.Queue = queue.Queue()
        self._clients: list[_Client] = []
        self._stop = threading.Event()
        self._listener = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._listener.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self._listener.bind((host, port))
        self._listener.listen(8)
        self.port = self._listener.getsockname()[1]
        sim.on_record = self._broadcast
        self._threads: list[threading.Thread] = []

    # -- lifecycle -----------------------------------------------------------

    def start(self) -> None:
        for target in (self._accept_loop, self._sim_loop):
            t = threading.Thread(target=target, daemon=True)
            t.start()
            self._threads.append(t)

    def stop(self) -> None:
        self._stop.set()
        try:
            self._listener.close()
        except OSError:
            pass
        for client in list(self._clients):
            client.close()
        for t in self._threads:
            t.join(timeout=2.0)

    # -- simulation thread ----------------------------------------------------

    def _sim_loop(self) -> None:
        wall_base = time.monotonic()
        v_base = self.sim.now
        while not self._stop.is_set():
            if self.paused:
                v_now = v_base
            else:
                v_now = v_base + (time.monotonic() - wall_base) * self.speed
            next_at = self.sim.next_event_at()
            if not self.paused and next_at is not None and next_at <= v_now:
                self.sim.advance_to(next_at)
                continue
            if self.paused:
                timeout = 0.1
            else:
                timeout = (next_at - v_now) / self.speed if next_at else 0.1
            try:
                kind, payload, client = self._commands.get(
                    timeout=max(0.001, min(timeout, 0.1))
                )
            except queue.Empty:
                continue
            if not self.paused:
                v_now = v_base + (time.monotonic() - wall_base) * self.speed
                self.sim.advance_to(v_now)
            if kind == "attach":
                self._attach(client)
            elif kind == "command":
                error = self._execute(payload)
                if error and client is not None:
                    client.send_line(json.dumps({"error": error}))
                if payload.get("cmd") in ("pause", "resume", "speed") and not error:
                    # resync pacing after control changes
                    v_base = self.sim.now if self.paused else v_now
                    wall_base = time.monotonic()
                    continue
            v_base = v_now if not self.paused else v_base
            wall_base = time.monotonic()

    def _attach(self, client: _Client) -> None:
        for record in self.sim.records:
            client.send_line(_record_json(record))
        self._clients.append(client)

    def _broadcast(self, record: TranscriptRecord) -> None:
        line = _record_json(record)
        for client in self._clients:
            if client.alive:
                client.send_line(line)
        self._clients = [c for c in self._clients if c.alive]

    def _execute(self, command: dict) -> str | None:
        """Apply one command at the current virtual time; returns an
        error string for bad input."""
        sim = self.sim
        verb = command.get("cmd")
        try:
            if verb == "arm":
                sim.do_arm()
            elif verb == "disarm":
                sim.do_disarm()
            elif verb == "release_relays":
                sim.do_release_relays()
            elif verb == "tilt":
                kind = IntrusionKind[str(command["kind"]).upper()]
                deg = float(command["deg"])
                sim.do_tilt(kind, deg)
            elif verb == "owner_sms":
                sim.do_owner_sms(str(command["from"]), str(command["body"]))
            elif verb == "pause":
                self.paused = True
            elif verb == "resume":
                self.paused = False
            elif verb == "speed":
                ratio = float(command["ratio"])
                if not 0 < ratio <= 10000:
                    return "speed ratio out of range"
                self.speed = ratio
            else:
                return f"unknown cmd {verb!r}"
        except (KeyError, ValueError, TypeError) as exc:
            return f"bad command: {exc}"
        return None

    # -- socket threads ---------------------------------------------------------

    def _accept_loop(self) -> None:
        while not self._stop.is_set():
            try:
                sock, _ = self._listener.accept()
            except OSError:
                return
            t = threading.Thread(target=self._serve_client, args=(sock,),
                                 daemon=True)
            t.start()

    def _serve_client(self, sock: socket.socket) -> None:
        # Sniff the first bytes to tell a WebSocket upgrade from raw
        # NDJSON; a silent client is a raw listener and attaches after
        # the sniff window.
        sock.settimeout(0.25)
        try:
            first = sock.recv(4096)
            if not first:
                sock.close()
                return
        except socket.timeout:
            first = b""
        except OSError:
            sock.close()
            return
        sock.settimeout(None)
        if first.startswith(b"GET "):
            rest = self._ws_handshake(sock, first)
            if rest is None:
                sock.close()
                return
            client = _Client(sock, websocket=True)
            self._commands.put(("attach", None, client))
            self._ws_read_loop(client, rest)
        else:
            client = _Client(sock, websocket=False)
            self._commands.put(("attach", None, client))
            self._ndjson_read_loop(client, first)
        client.close()

    def _handle_line(self, client: _Client, raw: str) -> None:
        line = raw.strip()
        if not line:
            return
        try:
            command = json.loads(line)
            if not isinstance(command, dict):
                raise ValueError("command must be a JSON object")
        except ValueError as exc:
            client.send_line(json.dumps({"error": f"bad json: {exc}"}))
            return
        self._commands.put(("command", command, client))

    def _ndjson_read_loop(self, client: _Client, initial: bytes) -> None:
        buf = bytearray(initial)
        while not self._stop.is_set():
            while b"\n" in buf:
                pos = buf.find(b"\n")
                line = bytes(buf[:pos]).decode("utf-8", errors="replace")
                del buf[: pos + 1]
                self._handle_line(client, line)
            try:
                data = client.sock.recv(4096)
            except OSError:
                return
            if not data:
                return
            buf += data

    # -- websocket support --------------------------------------------------------

    def _ws_handshake(self, sock: socket.socket, initial: bytes) -> bytes | None:
        buf = bytearray(initial)
        while b"\r\n\r\n" not in buf:
            try:
                data = sock.recv(4096)
            except OSError:
                return None
            if not data:
                return None
            buf += data
        head, rest = bytes(buf).split(b"\r\n\r\n", 1)
        key = None
        for line in head.decode("latin-1").split("\r\n")[1:]:
            name, _, value = line.partition(":")
            if name.strip().lower() == "sec-websocket-key":
                key = value.strip()
        if key is None:
            try:
                sock.sendall(b"HTTP/1.1 400 Bad Request\r\n\r\n")
            except OSError:
                pass
            return None
        accept = base64.b64encode(
            hashlib.sha1((key + _WS_GUID).encode("ascii")).digest()
        ).decode("ascii")
        response = (
            "HTTP/1.1 101 Switching Protocols\r\n"
            "Upgrade: websocket\r\n"
            "Connection: Upgrade\r\n"
            f"Sec-WebSocket-Accept: {accept}\r\n\r\n"
        )
        try:
            sock.sendall(response.encode("ascii"))
        except OSError:
            return None
        return rest

    def _ws_read_loop(self, client: _Client, initial: bytes) -> None:
        buf = bytearray(initial)
        message = bytearray()

        def need(n: int) -> bool:
            nonlocal buf
            while len(buf) < n:
                try:
                    data = client.sock.recv(4096)
                except OSError:
                    return False
                if not data:
                    return False
                buf += data
            return True

        while not self._stop.is_set():
            if not need(2):
                return
            b0, b1 = buf[0], buf[1]
            fin, opcode = b0 & 0x80, b0 & 0x0F
            masked, length = b1 & 0x80, b1 & 0x7F
            offset = 2
            if length == 126:
                if not need(offset + 2):
                    return
                length = struct.unpack_from(">H", buf, offset)[0]
                offset += 2
            elif length == 127:
                if not need(offset + 8):
                    return
                length = struct.unpack_from(">Q", buf, offset)[0]
                offset += 8
            mask = b""
            if masked:
                if not need(offset + 4):
                    return
                mask = bytes(buf[offset:offset + 4])
                offset += 4
            if not need(offset + length):
                return
            payload = bytes(buf[offset:offset + length])
            del buf[: offset + length]
            if mask:
                payload = bytes(
                    c ^ mask[i % 4] for i, c in enumerate(payload)
                )
            if opcode == 0x8:  # close
                return
            if opcode == 0x9:  # ping -> pong
                pong = bytes([0x8A, len(payload)]) + payload
                try:
                    with client.lock:
                        client.sock.sendall(pong)
                except OSError:
                    return
                continue
            if opcode in (0x0, 0x1, 0x2):
                message += payload
                if fin:
                    text = message.decode("utf-8", errors="replace")
                    message = bytearray()
                    for line in text.split("\n"):
                        self._handle_line(client, line)
