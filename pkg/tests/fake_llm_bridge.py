"""Line-protocol planner stub used by the bridge tests.

Reads one JSON request per line and answers with a canned two-step plan, or
echoes synonyms for synonym-expansion requests. `--sleep S` delays every
response (for timeout tests); `--port P` serves one TCP client instead of
stdio.
"""

import argparse
import json
import socket
import sys
import time


def respond(request: dict) -> dict:
    task = request.get("task", "")
    if task.startswith("synonyms: "):
        cls = task.split(": ", 1)[1]
        return {"instructions": [
            {"text": f"trusty {cls}", "object": cls, "speed": 0},
            {"text": "seat", "object": cls, "speed": 0},
        ]}
    return {"instructions": [
        {"text": "go to the chair at 0.40 m/s", "object": "chair",
         "speed": 0.40},
        {"text": "find the person at 0.50 m/s", "object": "person",
         "speed": 0.50},
    ]}


def serve(lines_in, lines_out, sleep: float) -> None:
    for line in lines_in:
        if not line.strip():
            continue
        request = json.loads(line)
        if sleep:
            time.sleep(sleep)
        lines_out.write(json.dumps(respond(request)) + "\n")
        lines_out.flush()


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--sleep", type=float, default=0.0)
    parser.add_argument("--port", type=int)
    args = parser.parse_args()
    if args.port:
        srv = socket.create_server(("127.0.0.1", args.port))
        conn, _ = srv.accept()
        with conn, conn.makefile("rw") as f:
            serve(f, f, args.sleep)
    else:
        serve(sys.stdin, sys.stdout, args.sleep)


if __name__ == "__main__":
    main()
