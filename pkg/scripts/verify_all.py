"""Run every verification suite and print a one-line summary per suite."""

import argparse
import time

from gjmslab.suites import SUITES


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("suites", nargs="*", default=list(SUITES))
    ap.add_argument("-v", "--verbose", action="store_true", help="print every check")
    args = ap.parse_args()
    failed = 0
    for name in args.suites:
        t0 = time.perf_counter()
        checks = SUITES[name]()
        bad = [c for c in checks if not c.passed]
        failed += len(bad)
        print(f"{name:<24} {len(checks) - len(bad):>3}/{len(checks):<3} {time.perf_counter() - t0:6.1f} s")
        for c in checks if args.verbose else bad:
            print(f"    {'PASS' if c.passed else 'FAIL'} {c.name}: {c.value!r} vs {c.target!r}")
    raise SystemExit(1 if failed else 0)


if __name__ == "__main__":
    main()
