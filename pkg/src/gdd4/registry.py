"""On-disk catalogue of verified designs, keyed by kind and type.

Layout: ``<root>/index.json`` maps keys to files; each design lives in
``<root>/<kind>/<type-slug>/<digest>.gdd``.  Files are content addressed
(sha256 of the serialized design) and every write goes through a temporary
file and an atomic rename.
"""

from __future__ import annotations

import fcntl
import hashlib
import json
import os
import tempfile
import threading
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

from .core import DesignFormatError, GroupedDesign, Provenance, TypeSignature
from .verify import VerificationReport, verify

ENV_VAR = "GDD4_REGISTRY"
DEFAULT_ROOT = Path.home() / ".gdd4" / "registry"
# stored designs are served in this order of provenance source
PREFERENCE = ("appendix", "field-construction", "derived", "theorem", "exact-cover", "imported")


class RegistryError(ValueError):
    def __init__(self, message, report: VerificationReport | None = None):
        super().__init__(message)
        self.report = report


def design_key(kind: str, signature: TypeSignature, holes: int | None = None) -> str:
    key = f"{kind} {signature}"
    return f"{key} w={holes}" if holes else key


def key_of(design: GroupedDesign) -> str:
    return design_key(design.kind, design.signature(), len(design.holes) if design.holes else None)


def _slug(signature: TypeSignature, holes) -> str:
    s = "_".join(f"{a}-{b}" for a, b in signature.parts)
    return f"{s}_w{holes}" if holes else s


def _rank(source: str) -> int:
    return PREFERENCE.index(source) if source in PREFERENCE else len(PREFERENCE)


@dataclass(frozen=True)
class RegistryEntry:
    key: str
    path: str  # relative to the root
    source: str
    digest: str

    def to_obj(self):
        return {"path": self.path, "source": self.source, "digest": self.digest}


def default_root() -> Path:
    return Path(os.environ.get(ENV_VAR) or DEFAULT_ROOT)


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=path.suffix)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class Registry:
    """Many readers, one writer; ``unsafe=True`` skips verification on load."""

    def __init__(self, root=None, *, unsafe: bool = False):
        self.root = Path(root) if root is not None else default_root()
        self.root.mkdir(parents=True, exist_ok=True)
        self.unsafe = unsafe
        self._lock = threading.Lock()

    @property
    def index_path(self) -> Path:
        return self.root / "index.json"

    @contextmanager
    def _writer(self):
        with self._lock, open(self.root / ".lock", "w") as fh:
            fcntl.flock(fh, fcntl.LOCK_EX)
            try:
                yield
            finally:
                fcntl.flock(fh, fcntl.LOCK_UN)

    def _read_index(self) -> dict[str, list[dict]]:
        if not self.index_path.exists():
            return {}
        return json.loads(self.index_path.read_text())["entries"]

    def _write_index(self, entries) -> None:
        _atomic_write(self.index_path, json.dumps({"version": 1, "entries": entries}, indent=1, sort_keys=True) + "\n")

    # writing

    def put(self, design: GroupedDesign, report: VerificationReport | None = None) -> RegistryEntry:
        """Store a design; it must pass verification."""
        report = report if report is not None else verify(design)
        if not report.passed:
            raise RegistryError(f"refusing to store a design that fails verification: {report.summary()}", report)
        text = design.dumps()
        digest = hashlib.sha256(text.encode()).hexdigest()[:24]
        key = key_of(design)
        holes = len(design.holes) if design.holes else None
        rel = Path(design.kind.lower()) / _slug(design.signature(), holes) / f"{digest}.gdd"
        entry = RegistryEntry(key, rel.as_posix(), design.provenance.source, digest)
        with self._writer():
            path = self.root / rel
            if not path.exists():
                _atomic_write(path, text)
            index = self._read_index()
            rows = [r for r in index.get(key, []) if r["digest"] != digest]
            rows.append(entry.to_obj())
            rows.sort(key=lambda r: (_rank(r["source"]), r["digest"]))
            index[key] = rows
            self._write_index(index)
        return entry

    def import_file(self, path) -> RegistryEntry:
        """Import an externally supplied design file after verifying it."""
        path = Path(path)
        try:
            design = GroupedDesign.loads(path.read_text())
        except (DesignFormatError, ValueError) as exc:
            raise RegistryError(f"{path}: malformed design file: {exc}") from exc
        report = verify(design)
        if not report.passed:
            raise RegistryError(f"{path}: {report.summary()}", report)
        prov = Provenance.make("imported", path.name, children=(design.provenance,))
        return self.put(design.replace(provenance=prov), report)

    # reading

    def entries(self) -> list[RegistryEntry]:
        out = []
        for key, rows in sorted(self._read_index().items()):
            out.extend(RegistryEntry(key, r["path"], r["source"], r["digest"]) for r in rows)
        return out

    def search(self, text: str) -> list[RegistryEntry]:
        """Entries whose key contains ``text`` or whose type equals it."""
        try:
            want = str(TypeSignature.parse(text))
        except ValueError:
            want = None
        return [e for e in self.entries() if text in e.key or (want and f" {want}" in f" {e.key.split(' ', 1)[1]}")]

    def lookup(self, signature: TypeSignature, kind: str = "GDD", holes: int | None = None) -> RegistryEntry | None:
        rows = self._read_index().get(design_key(kind, signature, holes))
        if not rows:
            return None
        r = rows[0]
        return RegistryEntry(design_key(kind, signature, holes), r["path"], r["source"], r["digest"])

    def load(self, entry: RegistryEntry) -> GroupedDesign:
        text = (self.root / entry.path).read_text()
        if hashlib.sha256(text.encode()).hexdigest()[:24] != entry.digest:
            raise RegistryError(f"{entry.path}: content does not match its digest")
        design = GroupedDesign.loads(text)
        if not self.unsafe:
            report = verify(design)
            if not report.passed:
                raise RegistryError(f"{entry.path}: stored design fails verification: {report.summary()}", report)
        return design

    def get(self, signature: TypeSignature, kind: str = "GDD", holes: int | None = None) -> GroupedDesign | None:
        entry = self.lookup(signature, kind, holes)
        return None if entry is None else self.load(entry)

    def read_bytes(self, entry: RegistryEntry) -> bytes:
        return (self.root / entry.path).read_bytes()

    def export(self, signature: TypeSignature, dest, kind: str = "GDD", holes: int | None = None) -> Path:
        entry = self.lookup(signature, kind, holes)
        if entry is None:
            raise RegistryError(f"no stored design for {design_key(kind, signature, holes)}")
        self.load(entry)  # verification on the way out
        dest = Path(dest)
        _atomic_write(dest, self.read_bytes(entry).decode())
        return dest
