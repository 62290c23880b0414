"""Build the worked recursive constructions end to end and verify each."""

import argparse
import time

from gdd4.algebra import rtd, td
from gdd4.appendix import expand_entry, get_entry
from gdd4.constructors import thm_fill_groups, thm_fundamental, thm_hole_fill, thm_scalar_inflate, thm_wilson_inflate
from gdd4.derived import dgdd_transpose, rtd_to_dgdd
from gdd4.exact_cover import solve_signature
from gdd4.verify import verify


def solved(text, seed):
    res = solve_signature(text, seed=seed, time_budget=60.0)
    if res.status != "sat":
        raise SystemExit(f"search for {text} ended with {res.status}")
    return res.design


def examples(seed):
    yield "thm33 15^9", lambda: thm_fundamental(3, 3, 0, 0, 0, 9, 4, rtd(5, 9), [solved("3^5", seed), solved("3^9", seed)])
    yield "thm42 12^9", lambda: thm_wilson_inflate(td(4, 3), 9, rtd_to_dgdd(9), [solved("3^9", seed)], 0)
    yield "thm43 4^10", lambda: thm_hole_fill(dgdd_transpose(rtd_to_dgdd(9)), solved("1^9 4^1", seed), 4)
    yield "thm44 39^9 30^1", lambda: thm_scalar_inflate(expand_entry(get_entry("13^9 10^1")), 3, td(4, 3))
    for m in range(133, 146, 3):
        yield f"thm41 13^24 {m}^1", lambda m=m: thm_fill_groups(expand_entry(get_entry(f"39^8 {m - 13}^1")), 13, td(4, 13))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0, help="seed for the small searched fillers")
    ap.add_argument("--save", help="directory to write the designs into")
    args = ap.parse_args()
    bad = 0
    for label, make in examples(args.seed):
        t0 = time.perf_counter()
        design = make()
        rep = verify(design)
        bad += not rep.passed
        print(f"{label:<20} {design.signature()!s:<14} {rep.summary():<40} {time.perf_counter() - t0:.2f}s")
        if args.save:
            from pathlib import Path

            out = Path(args.save)
            out.mkdir(parents=True, exist_ok=True)
            design.save(out / (label.replace(" ", "_").replace("^", "") + ".gdd"))
    raise SystemExit(1 if bad else 0)


if __name__ == "__main__":
    main()
