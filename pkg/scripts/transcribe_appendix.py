#!/usr/bin/env python3
"""Transcribe base-block designs from a LaTeX appendix into entry data files.

Each design in the source carries three things: a prose description of the
group partition, a list of base blocks, a prose description of the block
mappings, and a machine-checkable coded string.  This script reads the prose
route only (partition, blocks, mappings) and writes the explicit fields; the
coded string is copied verbatim.  The library re-parses the coded string at
load time and insists that both routes agree.

Every prose mapping clause is also evaluated literally on every point and
compared with the segment map it was turned into, so a misread clause fails
here rather than in the verifier.

Usage:
    python scripts/transcribe_appendix.py SOURCE.md src/gdd4/data/appendix
"""

import argparse
import re
import sys
from pathlib import Path

NUMBER_WORDS = {"two": 2, "three": 3, "four": 4, "five": 5, "six": 6, "ten": 10}

SECTION_RE = re.compile(r"\\label\{app:4-GDD ([^}]*)\}")
HEADER_RE = re.compile(r"\\noindent\{\\boldmath \$(.*?)\$\}~")
POINTSET_RE = re.compile(r"point set \$Z_\{(\d+)\}\$")
RESIDUE_RE = re.compile(r"residue classes modulo \$(\d+)\$ for \$\\\{(\d+), \d+, \\dots, (\d+)\\\}\$")
RANGE_RE = re.compile(r"^\s*\$\\\{(\d+), \d+, \\dots, (\d+)\\\}\$")
SET_RE = re.compile(r"^\s*\$\\\{([\d, ]+)\\\}\$")
BLOCK_RE = re.compile(r"\$\((\d+), (\d+), (\d+), (\d+)\)\$")
CODED_RE = re.compile(r"\\ADFvfyParStart\{(.*)\}\s*$")

# prose mapping clauses
CYC0_RE = re.compile(r"^\$x \\mapsto x \+\s*(\d*) j \\adfmod\{(\d+)\}\$ for \$x < (\d+)\$")
CYC_ABS_RE = re.compile(
    r"^\$x \\mapsto \(x \+\s*(\d*) j \\adfmod\{(\d+)\}\) \+ (\d+)\$ for \$(?:(\d+) \\le x < (\d+)|x \\ge (\d+))\$"
)
CYC_REL_RE = re.compile(
    r"^\$x \\mapsto \(x - (\d+) \+\s*(\d*) j \\adfmod\{(\d+)\}\) \+ (\d+)\$ for \$(?:(\d+) \\le x < (\d+)|x \\ge (\d+))\$"
)
FIXED_RANGE_RE = re.compile(r"^\$x \\mapsto x\$ for \$x \\ge (\d+)\$")
FIXED_POINT_RE = re.compile(r"^\$(\d+) \\mapsto (\d+)\$")
OPLUS_RE = re.compile(r"^\$x \\mapsto x \\oplus (?:j|\((\d+) j\))\$ for \$x < (\d+)\$")
JRANGE_RE = re.compile(r"^\$0 \\le j < (\d+)\$")
COUNT_RE = re.compile(r"^\s*for the (first|next|last) (?:(\w+) )?blocks?[,;.]")


def _step(text):
    return int(text) if text else 1


def _count(word):
    if word is None:
        return 1
    if word in NUMBER_WORDS:
        return NUMBER_WORDS[word]
    return int(word)


class Clause:
    """One prose mapping clause, kept with a literal evaluator."""

    def __init__(self, lo, hi, fn, segment):
        self.lo, self.hi, self.fn, self.segment = lo, hi, fn, segment


def parse_clause(line, v, oplus_modulus):
    m = CYC0_RE.match(line)
    if m:
        s, length, hi = _step(m[1]), int(m[2]), int(m[3])
        return Clause(0, hi, lambda x, j, s=s, L=length: (x + s * j) % L, (0, hi, s))
    m = CYC_ABS_RE.match(line)
    if m:
        s, length, add = _step(m[1]), int(m[2]), int(m[3])
        lo = int(m[4] or m[6])
        hi = int(m[5]) if m[5] else v
        fn = lambda x, j, s=s, L=length, a=add: (x + s * j) % L + a
        return Clause(lo, hi, fn, (lo, hi - lo, s))
    m = CYC_REL_RE.match(line)
    if m:
        sub, s, length, add = int(m[1]), _step(m[2]), int(m[3]), int(m[4])
        lo = int(m[5] or m[7])
        hi = int(m[6]) if m[6] else v
        fn = lambda x, j, b=sub, s=s, L=length, a=add: (x - b + s * j) % L + a
        return Clause(lo, hi, fn, (lo, hi - lo, s))
    m = FIXED_RANGE_RE.match(line)
    if m:
        lo = int(m[1])
        return Clause(lo, v, lambda x, j: x, (lo, v - lo, 0))
    m = FIXED_POINT_RE.match(line)
    if m:
        a, b = int(m[1]), int(m[2])
        if a != b:
            raise ValueError(f"non-fixed singleton clause: {line}")
        return Clause(a, a + 1, lambda x, j: x, (a, 1, 0))
    m = OPLUS_RE.match(line)
    if m:
        s, hi = _step(m[1]), int(m[2])
        big = hi // 3

        def fn(x, j, s=s, M=big):
            a, b = divmod(x, 3)
            da, db = divmod((s * j) % (3 * M), 3)
            return 3 * ((a + da) % M) + (b + db) % 3

        return Clause(0, hi, fn, (0, hi, s, big))
    return None


def parse_mapping(lines, v, nblocks):
    """Turn the prose mapping into generators [(count, jmax, [clauses])]."""
    generators = []
    clauses = []
    pending = []  # jmax values waiting for their block count
    fresh_map = True
    for raw in lines:
        line = raw.strip()
        if not line:
            continue
        m = JRANGE_RE.match(line)
        if m:
            pending.append(int(m[1]))
            continue
        m = COUNT_RE.match(raw)
        if m:
            if len(pending) != 1:
                raise ValueError(f"count phrase without a single j range: {raw!r}")
            generators.append([m[1], _count(m[2]), pending.pop(), clauses])
            fresh_map = True
            continue
        clause = parse_clause(line, v, None)
        if clause is None:
            raise ValueError(f"unrecognised mapping clause: {line!r}")
        if fresh_map and generators:
            clauses = []
        fresh_map = False
        clauses.append(clause)
    if pending:
        if generators or len(pending) != 1:
            raise ValueError("dangling j range")
        generators.append(["all", nblocks, pending.pop(), clauses])
    # resolve counts in order; 'last' consumes the remainder check
    out = []
    used = 0
    for where, count, jmax, cls in generators:
        if where == "all":
            count = nblocks
        out.append((count, jmax, cls))
        used += count
    if used != nblocks:
        raise ValueError(f"generator counts {used} != base blocks {nblocks}")
    return out


def segments_of(clauses, v):
    segs = sorted((c.segment for c in clauses), key=lambda s: s[0])
    pos = 0
    for seg in segs:
        if seg[0] != pos:
            raise ValueError(f"segments not contiguous at {pos}: {segs}")
        pos += seg[1]
    if pos != v:
        raise ValueError(f"segments cover {pos} of {v} points")
    return segs


def segment_image(seg, x, j):
    off, length, step = seg[:3]
    r = x - off
    if len(seg) == 4:
        big = seg[3]
        a, b = divmod(r, 3)
        da, db = divmod((step * j) % length, 3)
        return off + 3 * ((a + da) % big) + (b + db) % 3
    return off + (r + step * j) % length


def check_literal(clauses, segs, v, jmax):
    """Evaluate prose clauses literally and compare with the segment map."""
    by_point = {}
    for c in clauses:
        for x in range(c.lo, c.hi):
            if x in by_point:
                raise ValueError(f"point {x} mapped twice")
            by_point[x] = c
    if sorted(by_point) != list(range(v)):
        raise ValueError("prose clauses do not cover the point set")
    seg_of = {}
    for seg in segs:
        for x in range(seg[0], seg[0] + seg[1]):
            seg_of[x] = seg
    for j in sorted({0, 1, 2, jmax - 1}):
        for x in range(v):
            want = by_point[x].fn(x, j)
            got = segment_image(seg_of[x], x, j)
            if want != got:
                raise ValueError(f"prose/segment mismatch at x={x}, j={j}: {want} vs {got}")


def parse_partition(lines):
    parts = []
    for line in lines:
        m = RESIDUE_RE.search(line)
        if m:
            parts.append(("mod", int(m[1]), int(m[2]), int(m[3])))
            continue
        m = RANGE_RE.match(line)
        if m:
            parts.append(("range", int(m[1]), int(m[2])))
            continue
        m = SET_RE.match(line)
        if m:
            pts = [int(t) for t in m[1].split(",")]
            if pts != list(range(pts[0], pts[-1] + 1)):
                raise ValueError(f"non-contiguous group {pts}")
            parts.append(("range", pts[0], pts[-1]))
    return parts


def header_name(text):
    text = re.sub(r"\^\{(\d+)\}", r"^\1", text)
    return " ".join(text.split())


def split_entries(source):
    lines = source.splitlines()
    lemma = None
    entry = None
    for line in lines:
        m = SECTION_RE.search(line)
        if m:
            lemma = m[1]
            continue
        m = HEADER_RE.search(line)
        if m and lemma is not None:
            entry = {"lemma": lemma, "name": header_name(m[1]), "lines": []}
            continue
        if entry is not None:
            entry["lines"].append(line)
            if CODED_RE.search(line):
                yield entry
                entry = None


def transcribe(entry):
    lines = entry["lines"]
    v = None
    for line in lines:
        m = POINTSET_RE.search(line)
        if m:
            v = int(m[1])
            break
    i_gen = next(i for i, l in enumerate(lines) if "the design is generated from" in l)
    i_map = next(i for i, l in enumerate(lines) if "by the mapping" in l)
    i_coded = next(i for i, l in enumerate(lines) if CODED_RE.search(l))
    partition = parse_partition(lines[:i_gen])
    blocks = [tuple(int(t) for t in m) for m in BLOCK_RE.findall("\n".join(lines[i_gen:i_map]))]
    coded = CODED_RE.search(lines[i_coded])[1].strip()
    gens = parse_mapping(lines[i_map + 1 : i_coded], v, len(blocks))
    out = []
    start = 0
    for count, jmax, clauses in gens:
        segs = segments_of(clauses, v)
        check_literal(clauses, segs, v, jmax)
        out.append((jmax, segs, blocks[start : start + count]))
        start += count
    return v, partition, coded, out


def type_text(coded):
    tail = coded[coded.rindex("((") :]
    pairs = re.findall(r"\((\d+), (\d+)\)", tail)
    return ";".join(f"({s},{c})" for s, c in pairs)


def render(entry, v, partition, coded, gens):
    parts = []
    for p in partition:
        if p[0] == "mod":
            parts.append(f"mod({p[1]},{p[2]},{p[3]})")
        else:
            parts.append(f"range({p[1]},{p[2]})")
    out = [
        f"name={entry['name']}",
        f"lemma={entry['lemma']}",
        f"v={v}",
        f"type={type_text(coded)}",
        f"partition={';'.join(parts)}",
        f"coded={coded}",
    ]
    for jmax, segs, blocks in gens:
        out.append("generator {")
        out.append(f"jmax={jmax}")
        out.append("segments=" + ";".join("(" + ",".join(str(t) for t in s) + ")" for s in segs))
        out.append("blocks:")
        out.extend(",".join(str(x) for x in b) for b in blocks)
        out.append("}")
    return "\n".join(out) + "\n"


def lemma_dir(lemma):
    return re.sub(r"[^0-9a-z]+", "_", lemma.lower()).strip("_")


def entry_file(name):
    return name.replace("^", "-").replace(" ", "_") + ".entry"


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("source", type=Path)
    ap.add_argument("outdir", type=Path)
    args = ap.parse_args(argv)
    text = args.source.read_text()
    n = 0
    failures = 0
    for entry in split_entries(text):
        try:
            v, partition, coded, gens = transcribe(entry)
        except ValueError as exc:
            print(f"FLAG {entry['name']}: {exc}", file=sys.stderr)
            failures += 1
            continue
        d = args.outdir / lemma_dir(entry["lemma"])
        d.mkdir(parents=True, exist_ok=True)
        (d / entry_file(entry["name"])).write_text(render(entry, v, partition, coded, gens))
        n += 1
    print(f"transcribed {n} entries, {failures} flagged")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
