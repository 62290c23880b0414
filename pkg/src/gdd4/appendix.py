"""Base-block designs: entry data files, coded strings, orbit expansion.

An entry is a list of generators.  Each generator is a set of base blocks
developed over ``j = 0 .. jmax-1`` by a point mapping made of segments.  A
segment either shifts cyclically within itself (fixed points are cyclic
segments whose step is a multiple of their length) or acts on Z_M x Z_3 by
componentwise addition, with (a, b) encoded as 3a + b.

Every data file holds the explicit segment fields and the coded string.  The
loader re-parses the coded string and rejects any entry on which the two
disagree.
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .core import GroupedDesign, Provenance, TypeSignature, blocks_for_signature


class EntryError(ValueError):
    """Malformed or inconsistent appendix entry."""


@dataclass(frozen=True)
class SegmentMap:
    offset: int
    length: int
    step: int
    modulus: int | None = None  # M for the Z_M x Z_3 action

    def __post_init__(self):
        if self.length <= 0 or self.step < 0:
            raise EntryError(f"bad segment {self}")
        if self.modulus is not None and self.length != 3 * self.modulus:
            raise EntryError(f"product segment needs length 3*M, got {self.length} vs M={self.modulus}")

    @property
    def end(self):
        return self.offset + self.length

    @property
    def is_fixed(self):
        return self.modulus is None and self.step % self.length == 0

    def normalized(self):
        step = self.step % self.length
        return (self.offset, self.length, step, self.modulus)

    def image(self, x, j):
        r = x - self.offset
        shift = (self.step * j) % self.length
        if self.modulus is None:
            return self.offset + (r + shift) % self.length
        a, b = divmod(r, 3)
        da, db = divmod(shift, 3)
        return self.offset + 3 * ((a + da) % self.modulus) + (b + db) % 3


@dataclass(frozen=True)
class GeneratorSpec:
    base_blocks: tuple[tuple[int, ...], ...]
    jmax: int
    segments: tuple[SegmentMap, ...]

    @property
    def num_blocks(self):
        return len(self.base_blocks) * self.jmax


@dataclass(frozen=True)
class GeneratorShell:
    """Generator as described by a coded string: counts and segments only."""

    count: int
    jmax: int
    segments: tuple[SegmentMap, ...]


@dataclass(frozen=True)
class AppendixEntry:
    name: str
    v: int
    declared_type: TypeSignature
    generators: tuple[GeneratorSpec, ...]
    coded_string: str
    lemma: str = ""
    partition: tuple = ()  # explicit partition descriptor from the data file

    @property
    def orbit_count(self):
        return sum(g.num_blocks for g in self.generators)

    def gum(self):
        """(g, u, m) when the declared type is g^u m^1 (or g^u), else None."""
        parts = self.declared_type.parts
        if len(parts) == 1:
            return parts[0][0], parts[0][1], 0
        if len(parts) == 2:
            (s1, c1), (s2, c2) = parts
            if c1 == 1 and c2 > 1:
                return s2, c2, s1
            if c2 == 1 and c1 > 1:
                return s1, c1, s2
        return None


# ---------------------------------------------------------------------------
# coded strings

_TOKEN_RE = re.compile(r"\s*(?:(\d+)|(.))")


def _parse_nested(text: str, name: str):
    """Parse nested parenthesised integer lists; ``(x)`` is a one-item list."""
    tokens = []
    for num, sym in _TOKEN_RE.findall(text.strip()):
        if num:
            tokens.append(int(num))
        elif sym in "(),":
            tokens.append(sym)
        elif not sym.isspace():
            raise EntryError(f"{name}: unexpected character {sym!r} in coded string")
    pos = 0

    def item():
        nonlocal pos
        if pos >= len(tokens):
            raise EntryError(f"{name}: coded string ends early")
        tok = tokens[pos]
        pos += 1
        if isinstance(tok, int):
            return tok
        if tok != "(":
            raise EntryError(f"{name}: unexpected {tok!r} in coded string")
        out = [item()]
        while pos < len(tokens) and tokens[pos] == ",":
            pos += 1
            out.append(item())
        if pos >= len(tokens) or tokens[pos] != ")":
            raise EntryError(f"{name}: unbalanced parentheses in coded string")
        pos += 1
        return out

    tree = item()
    if pos != len(tokens):
        raise EntryError(f"{name}: trailing text after coded string")
    return tree


def parse_coded_string(text: str, name: str = "?"):
    """Parse ``(v, ((n, r, (seg, ...)), ...), ((size, count), ...))``.

    Returns ``(v, [GeneratorShell], [(size, count), ...])`` with segment
    offsets accumulated left to right.
    """
    tree = _parse_nested(text, name)
    try:
        v, gens, parts = tree
        v = int(v)
        shells = []
        for gen in gens:
            n, r, segs = gen
            offset = 0
            out = []
            for seg in segs:
                if len(seg) == 2:
                    length, step = seg
                    out.append(SegmentMap(offset, int(length), int(step)))
                elif len(seg) == 3:
                    length, step, (big, three) = seg
                    if three != 3:
                        raise EntryError(f"{name}: product action must be over Z_M x Z_3")
                    out.append(SegmentMap(offset, int(length), int(step), int(big)))
                else:
                    raise EntryError(f"{name}: bad segment {seg!r}")
                offset += int(seg[0])
            if offset != v:
                raise EntryError(f"{name}: segments cover {offset} points, v = {v}")
            shells.append(GeneratorShell(int(n), int(r), tuple(out)))
        parts = [(int(s), int(c)) for s, c in parts]
    except EntryError:
        raise
    except (TypeError, ValueError) as exc:
        raise EntryError(f"{name}: coded string has wrong shape ({exc})") from None
    sig = TypeSignature.of(parts)
    if sig.v != v:
        raise EntryError(f"{name}: type {sig} has {sig.v} points, v = {v}")
    total = sum(s.count * s.jmax for s in shells)
    expected = blocks_for_signature(sig)
    if total != expected:
        raise EntryError(f"{name}: orbit count {total} != expected block count {expected}")
    return v, shells, parts


# ---------------------------------------------------------------------------
# groups and mappings


def derive_groups(v: int, parts) -> list[list[int]]:
    """Groups from ordered type parts: (s, c>1) gives c residue classes mod c."""
    groups = []
    start = 0
    for s, c in parts:
        end = start + s * c
        if end > v:
            raise EntryError(f"type parts overrun v = {v}")
        if c == 1:
            groups.append(list(range(start, end)))
        else:
            groups.extend(list(range(start + i, end, c)) for i in range(c))
        start = end
    if start != v:
        raise EntryError(f"type parts cover {start} points, v = {v}")
    return groups


def partition_from_descriptor(descriptor) -> list[list[int]]:
    """Groups from the explicit ``mod(c,lo,hi);range(lo,hi)`` descriptor."""
    groups = []
    for item in descriptor:
        if item[0] == "mod":
            _, c, lo, hi = item
            groups.extend(list(range(lo + i, hi + 1, c)) for i in range(c))
        else:
            _, lo, hi = item
            groups.append(list(range(lo, hi + 1)))
    return groups


def _find_segment(x, segments):
    for seg in segments:
        if seg.offset <= x < seg.end:
            return seg
    raise EntryError(f"point {x} lies outside all segments")


def apply_mapping(x: int, j: int, segments) -> int:
    return _find_segment(x, segments).image(x, j)


def map_points(points: np.ndarray, js: np.ndarray, segments) -> np.ndarray:
    """Vectorised mapping: ``points`` of any shape, ``js`` broadcastable."""
    points = np.asarray(points, dtype=np.int64)
    js = np.asarray(js, dtype=np.int64)
    shape = np.broadcast_shapes(points.shape, js.shape)
    x = np.broadcast_to(points, shape)
    j = np.broadcast_to(js, shape)
    out = np.full(shape, -1, dtype=np.int64)
    for seg in segments:
        mask = (x >= seg.offset) & (x < seg.end)
        if not mask.any():
            continue
        r = x[mask] - seg.offset
        shift = (seg.step * j[mask]) % seg.length
        if seg.modulus is None:
            out[mask] = seg.offset + (r + shift) % seg.length
        else:
            a, b = np.divmod(r, 3)
            da, db = np.divmod(shift, 3)
            out[mask] = seg.offset + 3 * ((a + da) % seg.modulus) + (b + db) % 3
    if (out < 0).any():
        bad = int(x[out < 0].flat[0])
        raise EntryError(f"point {bad} lies outside all segments")
    return out


# ---------------------------------------------------------------------------
# expansion


def expand_generator(gen: GeneratorSpec) -> np.ndarray:
    """All blocks of one generator, ordered by j then base block."""
    base = np.asarray(gen.base_blocks, dtype=np.int64)
    js = np.arange(gen.jmax, dtype=np.int64)[:, None, None]
    return map_points(base[None, :, :], js, gen.segments).reshape(-1, base.shape[1])


def expand_entry(entry: AppendixEntry) -> GroupedDesign:
    chunks = []
    for gi, gen in enumerate(entry.generators):
        blocks = expand_generator(gen)
        srt = np.sort(blocks, axis=1)
        rep = (srt[:, 1:] == srt[:, :-1]).any(axis=1)
        if rep.any():
            i = int(np.flatnonzero(rep)[0])
            j, b = divmod(i, len(gen.base_blocks))
            raise EntryError(
                f"{entry.name}: generator {gi}, base block {gen.base_blocks[b]}, j={j} maps to a block with a repeated point"
            )
        chunks.append(srt)
    blocks = np.concatenate(chunks) if chunks else np.zeros((0, 4), dtype=np.int64)
    _reject_duplicates(entry.name, blocks)
    groups = derive_groups(entry.v, entry.declared_type.segments)
    return GroupedDesign(
        entry.v,
        groups,
        blocks,
        kind="GDD",
        k=blocks.shape[1],
        provenance=Provenance.make("appendix", entry.name, lemma=entry.lemma),
    )


def _reject_duplicates(name, blocks):
    if len(blocks) < 2:
        return
    order = np.lexsort(blocks.T[::-1])
    s = blocks[order]
    dup = (s[1:] == s[:-1]).all(axis=1)
    if dup.any():
        i = int(np.flatnonzero(dup)[0])
        raise EntryError(f"{name}: duplicate block {tuple(s[i].tolist())}")


# ---------------------------------------------------------------------------
# data files

_SEG_RE = re.compile(r"\(([^()]*)\)")
_PART_RE = re.compile(r"(mod|range)\(([^()]*)\)")


def parse_entry_text(text: str, source: str = "?") -> AppendixEntry:
    header = {}
    generators = []
    current = None
    in_blocks = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line == "generator {":
            current = {"blocks": []}
            in_blocks = False
            continue
        if line == "}":
            if current is None:
                raise EntryError(f"{source}:{lineno}: unmatched '}}'")
            generators.append(current)
            current = None
            continue
        if current is not None:
            if line == "blocks:":
                in_blocks = True
            elif in_blocks:
                current["blocks"].append(tuple(int(t) for t in line.split(",")))
            else:
                key, _, val = line.partition("=")
                current[key.strip()] = val.strip()
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise EntryError(f"{source}:{lineno}: expected key=value")
        header[key.strip()] = val.strip()
    if current is not None:
        raise EntryError(f"{source}: unterminated generator block")
    for key in ("name", "v", "type", "coded"):
        if key not in header:
            raise EntryError(f"{source}: missing {key}=")
    name = header["name"]
    v = int(header["v"])
    parts = [tuple(int(t) for t in m.split(",")) for m in _SEG_RE.findall(header["type"])]
    gens = []
    for g in generators:
        segs = []
        for m in _SEG_RE.findall(g["segments"]):
            vals = [int(t) for t in m.split(",")]
            segs.append(SegmentMap(*vals))
        gens.append(GeneratorSpec(tuple(g["blocks"]), int(g["jmax"]), tuple(segs)))
    partition = tuple(
        (kind, *(int(t) for t in args.split(","))) for kind, args in _PART_RE.findall(header.get("partition", ""))
    )
    return AppendixEntry(
        name=name,
        v=v,
        declared_type=TypeSignature.of(parts),
        generators=tuple(gens),
        coded_string=header["coded"],
        lemma=header.get("lemma", ""),
        partition=partition,
    )


def check_entry(entry: AppendixEntry) -> None:
    """Cross-check the explicit fields against the coded string."""
    name = entry.name
    v, shells, parts = parse_coded_string(entry.coded_string, name)
    if v != entry.v:
        raise EntryError(f"{name}: v={entry.v} but coded string says {v}")
    if [tuple(p) for p in parts] != [tuple(p) for p in entry.declared_type.segments]:
        raise EntryError(f"{name}: type fields disagree with coded string")
    if len(shells) != len(entry.generators):
        raise EntryError(f"{name}: {len(entry.generators)} generators, coded string has {len(shells)}")
    for i, (shell, gen) in enumerate(zip(shells, entry.generators)):
        if shell.count != len(gen.base_blocks) or shell.jmax != gen.jmax:
            raise EntryError(f"{name}: generator {i} counts disagree with coded string")
        if [s.normalized() for s in shell.segments] != [s.normalized() for s in gen.segments]:
            raise EntryError(f"{name}: generator {i} segments disagree with coded string")
        for b in gen.base_blocks:
            for x in b:
                if not 0 <= x < v:
                    raise EntryError(f"{name}: base block {b} has point out of range")
    if entry.partition:
        explicit = sorted(map(tuple, partition_from_descriptor(entry.partition)))
        derived = sorted(map(tuple, derive_groups(v, parts)))
        if explicit != derived:
            raise EntryError(f"{name}: derived groups differ from the stated partition")


def entry_from_coded(entry: AppendixEntry) -> AppendixEntry:
    """Rebuild an entry using only the coded string's segments (for cross-checks)."""
    _, shells, _ = parse_coded_string(entry.coded_string, entry.name)
    gens = []
    start = 0
    blocks = [b for g in entry.generators for b in g.base_blocks]
    for shell in shells:
        gens.append(GeneratorSpec(tuple(blocks[start : start + shell.count]), shell.jmax, shell.segments))
        start += shell.count
    return AppendixEntry(entry.name, entry.v, entry.declared_type, tuple(gens), entry.coded_string, entry.lemma)


def data_root():
    return resources.files("gdd4") / "data" / "appendix"


def _entry_paths():
    root = data_root()
    for lemma_dir in sorted(root.iterdir(), key=lambda p: p.name):
        if lemma_dir.is_dir():
            for f in sorted(lemma_dir.iterdir(), key=lambda p: p.name):
                if f.name.endswith(".entry"):
                    yield f


@functools.lru_cache(maxsize=None)
def load_entries(check: bool = True) -> dict[str, AppendixEntry]:
    entries = {}
    for path in _entry_paths():
        entry = parse_entry_text(path.read_text(), str(path))
        if check:
            check_entry(entry)
        if entry.name in entries:
            raise EntryError(f"duplicate entry name {entry.name}")
        entries[entry.name] = entry
    return entries


@functools.lru_cache(maxsize=None)
def entry_names() -> frozenset[str]:
    return frozenset(load_entries())


def canonical_name(name: str) -> str:
    return " ".join(name.split())


def get_entry(name: str) -> AppendixEntry:
    entries = load_entries()
    key = canonical_name(name)
    if key in entries:
        return entries[key]
    sig = TypeSignature.parse(key)
    for e in entries.values():
        if e.declared_type == sig:
            return e
    raise KeyError(f"no appendix entry {name!r}")


def find_by_signature(sig: TypeSignature) -> AppendixEntry | None:
    for e in load_entries().values():
        if e.declared_type == sig:
            return e
    return None


def load_entry_file(path) -> AppendixEntry:
    entry = parse_entry_text(Path(path).read_text(), str(path))
    check_entry(entry)
    return entry
