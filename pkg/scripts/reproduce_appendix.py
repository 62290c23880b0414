"""Expand every shipped base-block design and verify it exhaustively."""

import argparse
import time

from gdd4.appendix import expand_entry, load_entries
from gdd4.core import blocks_for_signature
from gdd4.verify import verify


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--quiet", action="store_true", help="print only the summary")
    args = ap.parse_args()
    t0 = time.perf_counter()
    failures = 0
    entries = load_entries()
    for name, entry in entries.items():
        t = time.perf_counter()
        design = expand_entry(entry)
        rep = verify(design)
        ok = rep.passed and design.num_blocks == blocks_for_signature(entry.declared_type) == entry.orbit_count
        failures += not ok
        if not args.quiet:
            print(f"{name:<24} v={design.v:<5} blocks={design.num_blocks:<6} {'ok' if ok else 'FAIL'} "
                  f"{time.perf_counter() - t:.3f}s")
    print(f"{len(entries)} entries, {failures} failures, {time.perf_counter() - t0:.1f} s")
    raise SystemExit(1 if failures else 0)


if __name__ == "__main__":
    main()
