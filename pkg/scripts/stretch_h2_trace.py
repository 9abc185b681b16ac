"""dim H^2 along the wreath-central tower over D8, as far as the work cap allows.

Stages above the cap are reported as skipped, so the trace is partial by design.
"""
import argparse
import json
import logging
import time

from pgtower.cohomology import DEFAULT_WORK_CAP, tower_comparison_trace
from pgtower.corpus import D8
from pgtower.tower import build_tower


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--stages", type=int, default=2)
    ap.add_argument("--work-cap", type=int, default=DEFAULT_WORK_CAP)
    ap.add_argument("--q", type=int, default=2)
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    start = time.perf_counter()
    tower = build_tower(D8, "wreath_central", 2, args.stages, audit=False)
    trace = tower_comparison_trace(tower, 2, args.q, args.work_cap)
    out = trace.to_json()
    out["seconds"] = round(time.perf_counter() - start, 2)
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
