"""Run the full pipeline on every fixture and print a timing table.

    python scripts/timings.py [fixtures_dir]
"""
import glob
import os
import sys
import time

from mhalgebroid.cli import InputError, read_model


def main(fixdir):
    print(f"{'model':<20} {'checks':>7} {'failed':>7} {'seconds':>8}")
    for path in sorted(glob.glob(os.path.join(fixdir, "*.json"))):
        name = os.path.splitext(os.path.basename(path))[0]
        try:
            m = read_model(path)
        except InputError as ex:
            print(f"{name:<20} input error: {ex}")
            continue
        t0 = time.perf_counter()
        res = m.run()
        dt = time.perf_counter() - t0
        rep = res.report
        print(f"{name:<20} {len(rep.checks):>7} {len(rep.failures()):>7} {dt:>8.2f}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else os.path.join(os.path.dirname(__file__), "..", "fixtures"))
