"""Plan every admissible (g, u, m) covered by the schedule tables and tally the outcome."""

import argparse
import collections

from gdd4 import schedules as S
from gdd4.admissibility import check_gum
from gdd4.planner import OutOfScope, PlanError, plan_gum


def table_triples():
    out = set()
    for g, ms in S.SPLIT_GROUPS.items():
        out |= {(g, 24, m) for m in ms}
    for tab in (S.HOLE_FILL, S.HOLE_FILL_H5):
        for g, d in tab.items():
            out |= {(g, u, m) for u, ms in d.items() for m in ms}
    for g, (_, d) in S.WILSON.items():
        out |= {(g, u, m) for u, ms in d.items() for m in ms}
    for _, g, ms, *_ in S.U8_TABLE:
        out |= {(g, 8, m) for m in ms}
    out |= set(S.SCALE)
    for g, (a, _, _) in S.RGDD_SCHEME.items():
        out |= {(g, u, m) for u in (7, 11) for m in range(3, 7 * a - 2, 6)}
    for u in S.BIG_GROUP:
        out |= {(g, u, m) for g in S.BIG_GROUP_G for m in range(1, g)}
    return sorted(t for t in out if check_gum(*t).admissible)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--show", type=int, default=0, help="render this many complete plans")
    args = ap.parse_args()
    tally = collections.Counter()
    missing = collections.Counter()
    shown = 0
    for t in table_triples():
        try:
            plan = plan_gum(*t)
        except (OutOfScope, PlanError) as exc:
            tally["no plan: " + type(exc).__name__] += 1
            continue
        done = plan.complete()
        tally[(plan.row.split(":")[0], "complete" if done else "needs ingredients")] += 1
        for leaf in plan.unresolved():
            missing[f"{leaf.kind} {leaf.goal}"] += 1
        if done and shown < args.show:
            print(plan.render(), end="\n\n")
            shown += 1
    for key, n in sorted(tally.items(), key=str):
        print(f"{n:5d}  {key}")
    print("\nmost requested missing ingredients:")
    for key, n in missing.most_common(15):
        print(f"{n:5d}  {key}")


if __name__ == "__main__":
    main()
