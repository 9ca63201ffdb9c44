"""Reference external comment generator for the fcg-extgen line protocol.

This package deliberately does not import fcg_lab: it is the other side of
the wire, and the JSON-lines protocol is the whole contract between them.
It answers every request with a canned boilerplate comment (template mode),
with the marked sentence itself (echo mode), or with an abstention
(abstain-all mode).  It exists so the adapter boundary can be integration
tested without any trained model; a real generator replaces this process
and keeps the same protocol.
"""

from __future__ import annotations

import json
import socket
import sys
from dataclasses import dataclass
from typing import IO

PROTOCOL_NAME = "fcg-extgen"
PROTOCOL_VERSION = 1

MODES = ("template", "echo", "abstain-all")

TEMPLATE_COMMENT = "Look up the use of the marked words in a dictionary ."


@dataclass(frozen=True)
class StubConfig:
    """Serving options: one response mode, listening on stdio or a TCP port."""

    mode: str = "template"
    port: int | None = None  # None listens on stdio

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(
                f"unknown mode {self.mode!r}; expected one of {', '.join(MODES)}"
            )
        if self.port is not None and not 0 <= self.port <= 65535:
            raise ValueError(f"port must be in [0, 65535], got {self.port}")


def handshake_line() -> str:
    return json.dumps({"protocol": PROTOCOL_NAME, "version": PROTOCOL_VERSION})


def respond(line: str, mode: str) -> str:
    """Answer one request line; malformed input yields an error response."""
    try:
        request = json.loads(line)
    except ValueError:
        return json.dumps({"id": None, "error": f"request is not JSON: {line!r}"})
    if (
        not isinstance(request, dict)
        or not isinstance(request.get("id"), str)
        or not isinstance(request.get("marked"), str)
    ):
        return json.dumps({"id": None, "error": f"not a request object: {line!r}"})
    if mode == "abstain-all":
        return json.dumps({"id": request["id"], "abstain": True})
    if mode == "echo":
        return json.dumps(
            {"id": request["id"], "comment": request["marked"]}, ensure_ascii=False
        )
    return json.dumps({"id": request["id"], "comment": TEMPLATE_COMMENT})


def serve(config: StubConfig) -> None:
    """Answer requests until the input side closes.

    The handshake goes out first, then exactly one response per request
    line, flushed immediately so a synchronous client never stalls.  With a
    TCP port the stub prints the bound port to stdout (so port 0 works),
    serves a single connection, and exits when the peer disconnects.
    """
    if config.port is None:
        _pump(sys.stdin, sys.stdout, config.mode)
        return
    with socket.create_server(("127.0.0.1", config.port)) as server:
        print(server.getsockname()[1], flush=True)
        conn, _ = server.accept()
        with conn:
            reader = conn.makefile("r", encoding="utf-8", newline="\n")
            writer = conn.makefile("w", encoding="utf-8", newline="\n")
            with reader, writer:
                _pump(reader, writer, config.mode)


def _pump(reader: IO[str], writer: IO[str], mode: str) -> None:
    writer.write(handshake_line() + "\n")
    writer.flush()
    for line in reader:
        writer.write(respond(line.rstrip("\n"), mode) + "\n")
        writer.flush()
