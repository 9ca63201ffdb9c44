"""End-to-end and unit checks for the external generator stub."""

import json
import socket
import subprocess
import sys

import pytest

from extgen_stub import (
    MODES,
    PROTOCOL_NAME,
    PROTOCOL_VERSION,
    TEMPLATE_COMMENT,
    StubConfig,
    respond,
)

HANDSHAKE = {"protocol": PROTOCOL_NAME, "version": PROTOCOL_VERSION}


def start(*args):
    return subprocess.Popen(
        [sys.executable, "-m", "extgen_stub", *args],
        stdin=subprocess.PIPE,
        stdout=subprocess.PIPE,
        stderr=subprocess.PIPE,
        text=True,
        encoding="utf-8",
    )


def converse(proc, lines):
    """Send every line, close stdin, return the response lines."""
    out, err = proc.communicate("".join(f"{line}\n" for line in lines), timeout=10)
    assert proc.returncode == 0, err
    return out.splitlines()


def request_line(request_id, marked):
    return json.dumps({"id": request_id, "marked": marked})


def test_handshake_is_the_first_line_in_every_mode():
    for mode in MODES:
        lines = converse(start("--mode", mode), [])
        assert [json.loads(line) for line in lines] == [HANDSHAKE], mode


def test_echo_mode_returns_the_marked_sentence():
    lines = converse(
        start("--mode", "echo"), [request_line("1", "a *** b *** c")]
    )
    assert json.loads(lines[1]) == {"id": "1", "comment": "a *** b *** c"}


def test_template_mode_returns_the_documented_boilerplate():
    assert TEMPLATE_COMMENT == "Look up the use of the marked words in a dictionary ."
    lines = converse(start("--mode", "template"), [request_line("9", "x *** y ***")])
    assert json.loads(lines[1]) == {"id": "9", "comment": TEMPLATE_COMMENT}


def test_abstain_all_mode_abstains():
    lines = converse(start("--mode", "abstain-all"), [request_line("1", "a *** b ***")])
    assert json.loads(lines[1]) == {"id": "1", "abstain": True}


def test_garbage_line_gets_an_error_response_and_the_loop_continues():
    lines = converse(
        start("--mode", "echo"),
        ["xx", json.dumps({"id": 3, "marked": "a"}), request_line("4", "still here")],
    )
    bad_json, bad_shape, good = (json.loads(line) for line in lines[1:])
    assert bad_json["id"] is None and "xx" in bad_json["error"]
    assert bad_shape["id"] is None and "error" in bad_shape
    assert good == {"id": "4", "comment": "still here"}


def test_one_response_per_request_in_request_order():
    requests = [request_line(str(i), f"m {i}") for i in range(20)]
    lines = converse(start("--mode", "abstain-all"), requests)
    assert len(lines) == 21
    assert [json.loads(line)["id"] for line in lines[1:]] == [
        str(i) for i in range(20)
    ]


def test_each_response_is_flushed_before_the_next_request_arrives():
    # a synchronous client writes one request, then blocks on the reply
    proc = start("--mode", "echo")
    try:
        assert json.loads(proc.stdout.readline()) == HANDSHAKE
        for i in range(3):
            proc.stdin.write(request_line(str(i), f"m {i}") + "\n")
            proc.stdin.flush()
            assert json.loads(proc.stdout.readline()) == {
                "id": str(i),
                "comment": f"m {i}",
            }
    finally:
        proc.stdin.close()
        assert proc.wait(timeout=10) == 0


def test_echo_preserves_non_ascii_text():
    lines = converse(start("--mode", "echo"), [request_line("u", "héllo *** é ***")])
    assert json.loads(lines[1])["comment"] == "héllo *** é ***"


def test_tcp_mode_serves_one_connection_then_exits():
    proc = start("--mode", "echo", "--tcp", "0")
    try:
        port = int(proc.stdout.readline())
        with socket.create_connection(("127.0.0.1", port), timeout=5) as conn:
            # close the file objects too, or the socket stays half-open
            with conn.makefile("r", encoding="utf-8", newline="\n") as reader, (
                conn.makefile("w", encoding="utf-8", newline="\n")
            ) as writer:
                assert json.loads(reader.readline()) == HANDSHAKE
                writer.write(request_line("t", "over tcp") + "\n")
                writer.flush()
                assert json.loads(reader.readline()) == {
                    "id": "t",
                    "comment": "over tcp",
                }
    finally:
        assert proc.wait(timeout=10) == 0


def test_respond_rejects_malformed_requests():
    for line in ("xx", "[1]", '{"marked": "a"}', '{"id": "1"}', '{"id": "1", "marked": 2}'):
        response = json.loads(respond(line, "echo"))
        assert response["id"] is None
        assert "error" in response


def test_config_validates_mode_and_port():
    with pytest.raises(ValueError, match="unknown mode"):
        StubConfig(mode="noisy")
    with pytest.raises(ValueError, match="port"):
        StubConfig(mode="echo", port=-1)


def test_cli_rejects_unknown_modes():
    out, err = start("--mode", "noisy").communicate(timeout=10)
    assert "invalid choice" in err
    assert out == ""
