import json
import threading

import pytest

from gdd4.algebra import td
from gdd4.appendix import expand_entry, get_entry
from gdd4.core import GroupedDesign, TypeSignature
from gdd4.registry import ENV_VAR, Registry, RegistryError, default_root, design_key


def test_put_get_round_trip(tmp_path):
    reg = Registry(tmp_path)
    d = expand_entry(get_entry("39^8 120^1"))
    entry = reg.put(d)
    got = reg.get(TypeSignature.parse("39^8 120^1"))
    assert got is not None and got.same_design(d)
    assert reg.read_bytes(entry) == d.dumps().encode()
    assert (tmp_path / entry.path).name == f"{entry.digest}.gdd"


def test_miss(tmp_path):
    assert Registry(tmp_path).get(TypeSignature.parse("9^8 30^1")) is None


def test_refuses_invalid(tmp_path):
    d = td(4, 4)
    with pytest.raises(RegistryError):
        Registry(tmp_path).put(d.replace(blocks=d.blocks[1:]))


def test_import_malformed(tmp_path):
    bad = tmp_path / "bad.gdd"
    bad.write_text("v=4\nkind=GDD\nk=4\ngroups=0;1;2;3\n0,1,2\n")
    with pytest.raises(RegistryError, match="malformed"):
        Registry(tmp_path / "r").import_file(bad)


def test_import_failing_design_carries_report(tmp_path):
    d = td(4, 4)
    path = tmp_path / "broken.gdd"
    d.replace(blocks=d.blocks[1:]).save(path)
    with pytest.raises(RegistryError) as exc:
        Registry(tmp_path / "r").import_file(path)
    assert exc.value.report is not None and exc.value.report.count("pair-uncovered") == 6


def test_import_marks_provenance(tmp_path):
    path = tmp_path / "t.gdd"
    td(4, 5).save(path)
    reg = Registry(tmp_path / "r")
    entry = reg.import_file(path)
    assert entry.source == "imported"
    assert reg.get(TypeSignature.parse("5^4"), "TD").provenance.source == "imported"


def test_preference_order(tmp_path):
    reg = Registry(tmp_path)
    d = td(4, 5)
    path = tmp_path / "x.gdd"
    d.replace(blocks=d.blocks[::-1]).save(path)
    reg.import_file(path)
    reg.put(d)
    assert reg.lookup(TypeSignature.parse("5^4"), "TD").source == "field-construction"


def test_tampered_file_detected(tmp_path):
    reg = Registry(tmp_path)
    entry = reg.put(td(4, 3))
    p = tmp_path / entry.path
    p.write_text(p.read_text().replace("0,3,6,9", "0,3,6,10", 1))
    with pytest.raises(RegistryError):
        reg.load(entry)


def test_unsafe_skips_verification(tmp_path):
    reg = Registry(tmp_path)
    d = td(4, 4)
    entry = reg.put(d)
    # rewrite as an invalid design while keeping the digest consistent
    broken = d.replace(blocks=d.blocks[1:])
    text = broken.dumps()
    import hashlib

    digest = hashlib.sha256(text.encode()).hexdigest()[:24]
    (tmp_path / entry.path).write_text(text)
    index = json.loads(reg.index_path.read_text())
    for rows in index["entries"].values():
        for r in rows:
            r["digest"] = digest
    reg.index_path.write_text(json.dumps(index))
    entry = reg.lookup(d.signature(), "TD")
    with pytest.raises(RegistryError):
        reg.load(entry)
    assert Registry(tmp_path, unsafe=True).load(entry).num_blocks == 15


def test_search_and_export(tmp_path):
    reg = Registry(tmp_path / "r")
    reg.put(expand_entry(get_entry("9^4 18^1 15^1")))
    assert len(reg.search("18^1 15^1 9^4")) == 1
    assert len(reg.search("9^4")) == 1
    out = reg.export(TypeSignature.parse("9^4 18^1 15^1"), tmp_path / "out.gdd")
    assert GroupedDesign.load(out).num_blocks == 324
    with pytest.raises(RegistryError):
        reg.export(TypeSignature.parse("3^5"), tmp_path / "none.gdd")


def test_concurrent_writers(tmp_path):
    reg = Registry(tmp_path)
    designs = [td(4, q) for q in (3, 4, 5, 7, 8, 9)]
    threads = [threading.Thread(target=reg.put, args=(d,)) for d in designs]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert len(reg.entries()) == 6
    assert not list(tmp_path.rglob(".tmp-*"))


def test_default_root_env(monkeypatch, tmp_path):
    monkeypatch.setenv(ENV_VAR, str(tmp_path))
    assert default_root() == tmp_path


def test_design_key():
    sig = TypeSignature.parse("9^4")
    assert design_key("DGDD", sig, 9) == "DGDD 9^4 w=9"
    assert design_key("GDD", sig) == "GDD 9^4"
