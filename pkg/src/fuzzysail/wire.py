"""Lockstep TCP bridge letting an external process steer the simulator.

One newline-terminated ASCII line per message::

    server -> client   OBS t=<s> heading=<deg> desired=<deg> wind_dir=<deg> wind_speed=<m/s> x=<m> y=<m>
    client -> server   CMD rudder=<percent> mode=<delta|absolute>
    server -> client   END completed=<0|1> time=<s> rmse=<deg>      (episode over)
    server -> client   ERR <reason>                                 (session aborted)

The server sends one OBS per control step and blocks until the matching CMD
arrives, so simulated time pauses while the client thinks.
"""

from __future__ import annotations

import math
import socket
from typing import Callable

from .sim import EpisodeConfig, NoiseLevel, RunRecord, run_episode

__all__ = [
    "ProtocolError",
    "OBS_FIELDS",
    "format_obs",
    "parse_obs",
    "format_cmd",
    "parse_cmd",
    "serve",
    "run_client",
]

OBS_FIELDS = ("t", "heading", "desired", "wind_dir", "wind_speed", "x", "y")
MODES = ("delta", "absolute")


class ProtocolError(Exception):
    pass


def _pairs(line: str, tag: str, keys) -> dict[str, str]:
    parts = line.strip().split()
    if not parts or parts[0] != tag:
        raise ProtocolError(f"expected {tag} message, got {line.strip()[:60]!r}")
    out = {}
    for token in parts[1:]:
        key, sep, value = token.partition("=")
        if not sep or key in out:
            raise ProtocolError(f"bad field {token!r}")
        out[key] = value
    if set(out) != set(keys):
        raise ProtocolError(f"{tag} needs fields {', '.join(keys)}")
    return out


def _number(value: str) -> float:
    try:
        v = float(value)
    except ValueError:
        raise ProtocolError(f"not a number: {value!r}") from None
    if not math.isfinite(v):
        raise ProtocolError(f"non-finite value {value!r}")
    return v


def format_obs(**values: float) -> str:
    return "OBS " + " ".join(f"{k}={float(values[k])!r}" for k in OBS_FIELDS) + "\n"


def parse_obs(line: str) -> dict[str, float]:
    return {k: _number(v) for k, v in _pairs(line, "OBS", OBS_FIELDS).items()}


def format_cmd(rudder: float, mode: str) -> str:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    return f"CMD rudder={float(rudder)!r} mode={mode}\n"


def parse_cmd(line: str) -> tuple[float, str]:
    fields = _pairs(line, "CMD", ("rudder", "mode"))
    if fields["mode"] not in MODES:
        raise ProtocolError(f"unknown mode {fields['mode']!r}")
    return _number(fields["rudder"]), fields["mode"]


class _RemoteController:
    """Controller proxy that forwards each observation over the socket."""

    def __init__(self, reader, writer):
        self.reader = reader
        self.writer = writer
        self.mode = "delta"
        self._obs = None

    def observe(self, t, state, wind_dir, wind_speed):
        self._obs = dict(t=t, wind_dir=wind_dir, wind_speed=wind_speed, x=state.x, y=state.y)

    def step(self, heading, desired, dt):
        self.writer.write(format_obs(heading=heading, desired=desired, **self._obs))
        self.writer.flush()
        line = self.reader.readline()
        if not line:
            raise ConnectionError("client disconnected")
        rudder, self.mode = parse_cmd(line)
        return rudder


def serve(cfg: EpisodeConfig, noise: NoiseLevel, port: int = 0, host: str = "127.0.0.1",
          on_ready: Callable[[int], None] | None = None,
          accept_timeout: float | None = None) -> RunRecord:
    """Run one episode for the first client that connects.

    ``on_ready`` receives the bound port once the socket is listening, which
    is how callers learn an ephemeral port. Protocol errors and disconnects
    end the episode early; the returned record then has ``aborted`` set and
    ``completed`` false.
    """
    with socket.create_server((host, port)) as srv:
        srv.settimeout(accept_timeout)
        if on_ready is not None:
            on_ready(srv.getsockname()[1])
        conn, _ = srv.accept()
    conn.settimeout(None)
    with conn, conn.makefile("r", encoding="ascii", newline="\n") as reader, \
            conn.makefile("w", encoding="ascii", newline="\n") as writer:
        remote = _RemoteController(reader, writer)
        record = run_episode(remote, cfg, noise, label=("remote", None))
        try:
            if record.aborted:
                writer.write(f"ERR {record.aborted}\n")
            else:
                writer.write(
                    f"END completed={int(record.completed)} time={record.time_taken!r} "
                    f"rmse={record.rmse!r}\n"
                )
            writer.flush()
        except OSError:
            pass
    return record


def run_client(host: str, port: int, controller, default_dt: float = 1.0,
               connect_timeout: float = 10.0) -> dict[str, str]:
    """Drive a local controller against a remote simulator until END.

    Returns the fields of the END message. Raises ``ProtocolError`` when the
    server reports an error.
    """
    prev_t = None
    with socket.create_connection((host, port), timeout=connect_timeout) as sock:
        sock.settimeout(None)
        with sock.makefile("r", encoding="ascii", newline="\n") as reader, \
                sock.makefile("w", encoding="ascii", newline="\n") as writer:
            for line in reader:
                if line.startswith("END"):
                    return dict(tok.split("=", 1) for tok in line.split()[1:])
                if line.startswith("ERR"):
                    raise ProtocolError(line[4:].strip())
                obs = parse_obs(line)
                dt = default_dt if prev_t is None else obs["t"] - prev_t
                prev_t = obs["t"]
                u = controller.step(obs["heading"], obs["desired"], dt)
                writer.write(format_cmd(u, controller.mode))
                writer.flush()
    raise ProtocolError("server closed the connection without END")
