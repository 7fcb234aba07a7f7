"""Newline-delimited JSON bridges to external planner / detector processes.

One request per line, one response per line. Endpoints are either
"tcp://host:port" or "cmd:<command line>" (the command is spawned and spoken
to over its standard streams).
"""

from __future__ import annotations

import json
import select
import shlex
import socket
import subprocess

from .errors import BridgeError

DEFAULT_TIMEOUT = 10.0


class LineBridge:
    """Synchronous line-protocol client."""

    def __init__(self, endpoint: str, timeout: float = DEFAULT_TIMEOUT):
        self.endpoint = endpoint
        self.timeout = timeout
        self._sock: socket.socket | None = None
        self._sock_file = None
        self._proc: subprocess.Popen | None = None
        try:
            if endpoint.startswith("tcp://"):
                host, _, port = endpoint[6:].partition(":")
                self._sock = socket.create_connection(
                    (host, int(port)), timeout=timeout)
                self._sock_file = self._sock.makefile("rwb")
            elif endpoint.startswith("cmd:"):
                self._proc = subprocess.Popen(
                    shlex.split(endpoint[4:]),
                    stdin=subprocess.PIPE,
                    stdout=subprocess.PIPE,
                )
            else:
                raise BridgeError(f"unsupported endpoint {endpoint!r}")
        except (OSError, ValueError) as exc:
            raise BridgeError(f"cannot reach bridge {endpoint!r}: {exc}") from exc

    def request(self, payload: dict) -> dict:
        line = json.dumps(payload, separators=(",", ":")) + "\n"
        try:
            raw = self._roundtrip(line.encode("utf-8"))
        except (OSError, ValueError) as exc:
            raise BridgeError(f"bridge {self.endpoint!r} failed: {exc}") from exc
        try:
            return json.loads(raw.decode("utf-8"))
        except json.JSONDecodeError as exc:
            raise BridgeError(
                f"bridge {self.endpoint!r} sent invalid JSON: {raw[:200]!r}"
            ) from exc

    def _roundtrip(self, data: bytes) -> bytes:
        if self._sock_file is not None:
            self._sock.settimeout(self.timeout)
            self._sock_file.write(data)
            self._sock_file.flush()
            raw = self._sock_file.readline()
            if not raw:
                raise BridgeError("bridge closed the connection")
            return raw
        assert self._proc is not None
        if self._proc.poll() is not None:
            raise BridgeError("bridge process exited")
        self._proc.stdin.write(data)
        self._proc.stdin.flush()
        ready, _, _ = select.select([self._proc.stdout], [], [], self.timeout)
        if not ready:
            raise BridgeError(f"bridge timed out after {self.timeout}s")
        raw = self._proc.stdout.readline()
        if not raw:
            raise BridgeError("bridge process closed its stdout")
        return raw

    def close(self) -> None:
        if self._sock_file is not None:
            self._sock_file.close()
            self._sock.close()
        if self._proc is not None:
            try:
                self._proc.stdin.close()
                self._proc.terminate()
                self._proc.wait(timeout=2)
            except (OSError, subprocess.TimeoutExpired):
                self._proc.kill()

    def __enter__(self) -> "LineBridge":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


class DetectorBridge:
    """Detector protocol over a LineBridge: one frame in flight at a time.

    Request: {"class": str, "frame_id": int, "ppm_path": str} (or
    "ppm_b64" for inline frames). Response: {"detections": [{"label", "conf",
    "cx", "cy", "w", "h"}]}.
    """

    def __init__(self, bridge: LineBridge):
        self.bridge = bridge

    def detect(self, cls: str, frame_id: int, ppm_path: str | None = None,
               ppm_b64: str | None = None):
        from .perception import Detection

        payload: dict = {"class": cls, "frame_id": frame_id}
        if ppm_path is not None:
            payload["ppm_path"] = ppm_path
        elif ppm_b64 is not None:
            payload["ppm_b64"] = ppm_b64
        else:
            raise BridgeError("detector request needs ppm_path or ppm_b64")
        reply = self.bridge.request(payload)
        dets = reply.get("detections")
        if dets is None:
            raise BridgeError(f"detector reply lacks detections: {reply}")
        out = []
        for d in dets:
            out.append(Detection(
                label=str(d["label"]),
                confidence=float(d["conf"]),
                center=(float(d["cx"]), float(d["cy"])),
                size=(float(d["w"]), float(d["h"])),
            ))
        return out
