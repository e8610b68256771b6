#!/usr/bin/env python3
"""Baseline timing runner for the latency bench.

Usage: baseline_exec.py <file> <reps>

Times exec() of the file's source inside this process, one line of
nanoseconds per repetition, so process start-up never pollutes the
comparison. Program stdout is swallowed.
"""

import io
import sys
import time
from contextlib import redirect_stdout


def main() -> int:
    if len(sys.argv) != 3:
        print("usage: baseline_exec.py <file> <reps>", file=sys.stderr)
        return 1
    path = sys.argv[1]
    reps = int(sys.argv[2])
    with open(path, "r", encoding="utf-8") as f:
        source = f.read()

    # Warm-up, mirroring the guarded side.
    with redirect_stdout(io.StringIO()):
        exec(compile(source, path, "exec"), {})

    times = []
    for _ in range(reps):
        sink = io.StringIO()
        t0 = time.perf_counter_ns()
        with redirect_stdout(sink):
            exec(compile(source, path, "exec"), {})
        t1 = time.perf_counter_ns()
        times.append(t1 - t0)

    for t in times:
        print(t)
    return 0


if __name__ == "__main__":
    sys.exit(main())
