"""Design data model: type signatures, grouped designs, provenance, file format."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

KINDS = ("GDD", "DGDD", "TD", "RGDD")


class DesignFormatError(ValueError):
    pass


# ---------------------------------------------------------------------------
# type signatures


@dataclass(frozen=True)
class TypeSignature:
    """Multiset of group sizes, e.g. 39^8 120^1 -> ((120, 1), (39, 8)).

    ``parts`` is canonical (merged and sorted by size, then count, both
    descending).  ``segments`` keeps the source segmentation when it was
    given, e.g. 39^7 39^1 126^1, which matters for group derivation only.
    """

    parts: tuple[tuple[int, int], ...]
    segments: tuple[tuple[int, int], ...] = field(default=(), compare=False, repr=False)

    @classmethod
    def of(cls, pairs: Iterable[Sequence[int]]) -> "TypeSignature":
        pairs = [(int(s), int(c)) for s, c in pairs]
        for s, c in pairs:
            if s <= 0 or c <= 0:
                raise ValueError(f"type parts must be positive, got {s}^{c}")
        merged = Counter()
        for s, c in pairs:
            merged[s] += c
        parts = tuple(sorted(merged.items(), key=lambda sc: (-sc[0], -sc[1])))
        return cls(parts, tuple(pairs))

    @classmethod
    def from_sizes(cls, sizes: Iterable[int]) -> "TypeSignature":
        return cls.of((s, c) for s, c in Counter(sizes).items())

    @classmethod
    def parse(cls, text: str) -> "TypeSignature":
        """Parse ``"39^8 120^1"`` (exponent 1 may be omitted)."""
        pairs = []
        for tok in text.replace(",", " ").split():
            s, _, c = tok.partition("^")
            pairs.append((int(s), int(c) if c else 1))
        if not pairs:
            raise ValueError("empty type signature")
        return cls.of(pairs)

    @classmethod
    def gum(cls, g: int, u: int, m: int = 0) -> "TypeSignature":
        return cls.of([(g, u)] + ([(m, 1)] if m else []))

    @property
    def v(self) -> int:
        return sum(s * c for s, c in self.parts)

    @property
    def num_groups(self) -> int:
        return sum(c for _, c in self.parts)

    def sizes(self) -> list[int]:
        return [s for s, c in self.parts for _ in range(c)]

    def __str__(self) -> str:
        return " ".join(f"{s}^{c}" for s, c in self.parts)


def cross_pair_count(signature: TypeSignature) -> int:
    """Number of unordered point pairs that lie in distinct groups."""
    v = signature.v
    within = sum(c * s * s for s, c in signature.parts)
    return (v * v - within) // 2


def expected_block_count(g: int, u: int, m: int) -> int:
    """Block count of a 4-GDD of type g^u m^1; raises if not integral."""
    num = g * g * u * (u - 1) + 2 * g * u * m
    if num % 12:
        raise ValueError(f"block count for {g}^{u} {m}^1 is not an integer")
    return num // 12


def blocks_for_signature(signature: TypeSignature, k: int = 4) -> int:
    pairs = cross_pair_count(signature)
    per_block = k * (k - 1) // 2
    if pairs % per_block:
        raise ValueError(f"{pairs} cross pairs not divisible by {per_block}")
    return pairs // per_block


# ---------------------------------------------------------------------------
# provenance


@dataclass(frozen=True)
class Provenance:
    """Where a design came from.

    ``source`` is one of appendix, field-construction, exact-cover, theorem,
    imported.  ``params`` is a sorted tuple of (key, value) pairs with JSON
    scalar values; ``children`` are ingredient provenances.
    """

    source: str
    name: str = ""
    params: tuple = ()
    children: tuple["Provenance", ...] = ()

    SOURCES = ("appendix", "field-construction", "exact-cover", "theorem", "imported", "derived")

    def __post_init__(self):
        if self.source not in self.SOURCES:
            raise ValueError(f"unknown provenance source {self.source!r}")

    @classmethod
    def make(cls, source, name="", children=(), **params):
        return cls(source, name, tuple(sorted(params.items())), tuple(children))

    def to_obj(self):
        obj = {"source": self.source}
        if self.name:
            obj["name"] = self.name
        if self.params:
            obj["params"] = {k: v for k, v in self.params}
        if self.children:
            obj["children"] = [c.to_obj() for c in self.children]
        return obj

    @classmethod
    def from_obj(cls, obj):
        params = obj.get("params", {})
        return cls(
            obj["source"],
            obj.get("name", ""),
            tuple(sorted((k, _freeze(v)) for k, v in params.items())),
            tuple(cls.from_obj(c) for c in obj.get("children", ())),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_obj(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def loads(cls, text: str) -> "Provenance":
        return cls.from_obj(json.loads(text))

    def depth(self) -> int:
        return 1 + max((c.depth() for c in self.children), default=0)


def _freeze(value):
    if isinstance(value, list):
        return tuple(_freeze(x) for x in value)
    return value


# ---------------------------------------------------------------------------
# designs


def _as_partition(parts) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(sorted(int(x) for x in p)) for p in parts)


def _check_partition(parts, v, what):
    seen = np.zeros(v, dtype=np.int64)
    for p in parts:
        if not p:
            raise DesignFormatError(f"empty {what}")
        arr = np.asarray(p)
        if arr.min() < 0 or arr.max() >= v:
            raise DesignFormatError(f"{what} point out of range 0..{v - 1}")
        np.add.at(seen, arr, 1)
    if not np.all(seen == 1):
        raise DesignFormatError(f"{what} do not partition the {v} points")


class GroupedDesign:
    """A point set {0..v-1} with groups, optional holes and resolution, and blocks.

    Blocks are held as a read-only (b, k) integer array; each row is sorted,
    rows stay in generation order.  Instances are treated as immutable.
    """

    __slots__ = ("v", "kind", "k", "groups", "holes", "resolution", "blocks", "provenance", "_canon")

    def __init__(self, v, groups, blocks, *, kind="GDD", k=None, holes=None, resolution=None, provenance=None):
        if kind not in KINDS:
            raise DesignFormatError(f"unknown design kind {kind!r}")
        blocks = np.asarray(blocks, dtype=np.int64)
        if blocks.ndim != 2:
            if blocks.size == 0:
                blocks = blocks.reshape(0, k or 4)
            else:
                raise DesignFormatError("blocks must form a 2-d array")
        if k is None:
            k = blocks.shape[1]
        if blocks.shape[1] != k:
            raise DesignFormatError(f"blocks have size {blocks.shape[1]}, expected {k}")
        blocks = np.sort(blocks, axis=1)
        blocks.setflags(write=False)
        self.v = int(v)
        self.kind = kind
        self.k = int(k)
        self.groups = _as_partition(groups)
        self.holes = None if holes is None else _as_partition(holes)
        self.resolution = None if resolution is None else tuple(tuple(int(i) for i in c) for c in resolution)
        self.blocks = blocks
        self.provenance = provenance or Provenance("imported")
        self._canon = None
        _check_partition(self.groups, self.v, "groups")
        if self.holes is not None:
            _check_partition(self.holes, self.v, "holes")
        if blocks.size and (blocks.min() < 0 or blocks.max() >= self.v):
            raise DesignFormatError("block point out of range")

    def __repr__(self):
        return f"<{self.kind} {self.signature()} v={self.v} b={len(self.blocks)}>"

    def __len__(self):
        return len(self.blocks)

    @property
    def num_blocks(self) -> int:
        return int(self.blocks.shape[0])

    def signature(self) -> TypeSignature:
        return signature_of(self)

    def group_index(self) -> np.ndarray:
        """Array mapping each point to the index of its group."""
        return _membership(self.groups, self.v)

    def hole_index(self) -> np.ndarray | None:
        return None if self.holes is None else _membership(self.holes, self.v)

    def canonical_blocks(self) -> np.ndarray:
        if self._canon is None:
            b = self.blocks
            order = np.lexsort(b.T[::-1]) if len(b) else np.arange(0)
            self._canon = b[order]
        return self._canon

    def same_design(self, other: "GroupedDesign") -> bool:
        """Equality on (v, k, groups, holes, block multiset)."""
        return (
            self.v == other.v
            and self.k == other.k
            and sorted(self.groups) == sorted(other.groups)
            and (self.holes is None) == (other.holes is None)
            and (self.holes is None or sorted(self.holes) == sorted(other.holes))
            and np.array_equal(self.canonical_blocks(), other.canonical_blocks())
        )

    def replace(self, **changes) -> "GroupedDesign":
        kw = dict(
            v=self.v,
            groups=self.groups,
            blocks=self.blocks,
            kind=self.kind,
            k=self.k,
            holes=self.holes,
            resolution=self.resolution,
            provenance=self.provenance,
        )
        kw.update(changes)
        return GroupedDesign(**kw)

    # -- serialization -----------------------------------------------------

    def dumps(self) -> str:
        lines = [f"v={self.v}", f"kind={self.kind}", f"k={self.k}", "groups=" + _fmt_partition(self.groups)]
        if self.holes is not None:
            lines.append("holes=" + _fmt_partition(self.holes))
        if self.resolution is not None:
            lines.append("resolution=" + _fmt_partition(self.resolution))
        lines.append("provenance=" + self.provenance.dumps())
        lines.extend(",".join(map(str, row)) for row in self.blocks.tolist())
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "GroupedDesign":
        header = {}
        blocks = []
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            if "=" in line:
                key, _, val = line.partition("=")
                header[key.strip()] = val.strip()
            else:
                try:
                    blocks.append([int(t) for t in line.split(",")])
                except ValueError:
                    raise DesignFormatError(f"line {lineno}: bad block {line!r}") from None
        for key in ("v", "kind", "k", "groups"):
            if key not in header:
                raise DesignFormatError(f"missing header {key}=")
        k = int(header["k"])
        if any(len(b) != k for b in blocks):
            raise DesignFormatError(f"block of wrong size (k={k})")
        return cls(
            int(header["v"]),
            _parse_partition(header["groups"]),
            np.array(blocks, dtype=np.int64).reshape(-1, k),
            kind=header["kind"],
            k=k,
            holes=_parse_partition(header["holes"]) if "holes" in header else None,
            resolution=_parse_partition(header["resolution"]) if "resolution" in header else None,
            provenance=Provenance.loads(header["provenance"]) if "provenance" in header else None,
        )

    def save(self, path) -> None:
        from pathlib import Path

        Path(path).write_text(self.dumps())

    @classmethod
    def load(cls, path) -> "GroupedDesign":
        from pathlib import Path

        return cls.loads(Path(path).read_text())


def _membership(parts, v) -> np.ndarray:
    idx = np.empty(v, dtype=np.int64)
    for i, p in enumerate(parts):
        idx[list(p)] = i
    return idx


def _fmt_partition(parts) -> str:
    return ";".join(",".join(map(str, p)) for p in parts)


def _parse_partition(text: str):
    if not text:
        return ()
    return tuple(tuple(int(t) for t in chunk.split(",")) for chunk in text.split(";"))


def signature_of(design: GroupedDesign) -> TypeSignature:
    return TypeSignature.from_sizes(len(g) for g in design.groups)
