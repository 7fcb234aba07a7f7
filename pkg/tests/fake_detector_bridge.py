"""Detector stub speaking the detector line protocol over stdio.

Returns a detection whose height grows with the frame id so a live run
walks through approach and completion; `--absent-every N` drops every Nth
frame to exercise search transitions.
"""

import argparse
import json
import sys


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--absent-every", type=int, default=0)
    parser.add_argument("--height-step", type=float, default=0.03)
    args = parser.parse_args()
    for line in sys.stdin:
        if not line.strip():
            continue
        request = json.loads(line)
        frame_id = int(request.get("frame_id", 0))
        if args.absent_every and frame_id % args.absent_every == 0:
            detections = []
        else:
            h = min(0.95, 0.2 + args.height_step * frame_id)
            detections = [{
                "label": request["class"], "conf": 0.9,
                "cx": 0.5, "cy": 0.5, "w": 0.6 * h, "h": h,
            }]
        sys.stdout.write(json.dumps({"detections": detections}) + "\n")
        sys.stdout.flush()


if __name__ == "__main__":
    main()
