"""Necessary conditions for 4-GDDs of type g^u m^1 and the known exceptions."""

from __future__ import annotations

from dataclasses import dataclass, field

# Residue table for g^u m^1 with m > 0, m != g.  Each row:
# (g mod 6, (u modulus, u residue) or None, (m modulus, m residue)).
RESIDUE_TABLE = (
    (0, None, (3, 0)),
    (1, (12, 0), (3, 1)),
    (1, (12, 3), (6, 1)),
    (1, (12, 9), (6, 4)),
    (2, (3, 0), (3, 2)),
    (3, (4, 0), (3, 0)),
    (3, (4, 1), (6, 0)),
    (3, (4, 3), (6, 3)),
    (4, (3, 0), (3, 1)),
    (5, (12, 0), (3, 2)),
    (5, (12, 3), (6, 5)),
    (5, (12, 9), (6, 2)),
)

# Types known not to exist.  Keys are (g, u, m) with m = 0 for uniform types.
KNOWN_NONEXISTENT = {
    (2, 4, 0): "uniform spectrum exception: no 4-GDD of type 2^4",
    (6, 4, 0): "uniform spectrum exception: no 4-GDD of type 6^4",
    (2, 6, 5): "g^u m^1 spectrum exception: no 4-GDD of type 2^6 5^1",
}

KNOWN_EXISTS = "known-exists"
KNOWN_NONEXISTENT_TAG = "known-nonexistent"
OPEN = "open-or-external"


@dataclass
class AdmissibilityVerdict:
    admissible: bool
    failed_conditions: list[str] = field(default_factory=list)
    existence: str = OPEN
    citation: str = ""
    notes: list[str] = field(default_factory=list)

    def __str__(self):
        if not self.admissible:
            return "not admissible: " + ", ".join(self.failed_conditions)
        if self.existence == KNOWN_NONEXISTENT_TAG:
            return f"admissible but known nonexistent ({self.citation})"
        if self.existence == KNOWN_EXISTS:
            return f"admissible, known to exist ({self.citation})"
        return "admissible"


def table_row(g: int, u: int, m: int):
    """Return the matching residue-table row, or None."""
    for gr, ucond, (mm, mr) in RESIDUE_TABLE:
        if g % 6 != gr:
            continue
        if ucond is not None and u % ucond[0] != ucond[1]:
            continue
        if m % mm == mr:
            return gr, ucond, (mm, mr)
    return None


def congruence_failures(g: int, u: int, m: int) -> list[str]:
    """The raw conditions, evaluated directly."""
    failed = []
    if u < 4:
        failed.append("u >= 4")
    if 2 * m > g * (u - 1):
        failed.append("m <= g(u-1)/2")
    if (g * u) % 3:
        failed.append("gu = 0 (mod 3)")
    if (g * (u - 1) + m) % 3:
        failed.append("g(u-1)+m = 0 (mod 3)")
    if (g * g * u * (u - 1) + 2 * g * u * m) % 12:
        failed.append("integral block count")
    return failed


def check_gum(g: int, u: int, m: int) -> AdmissibilityVerdict:
    if g < 1 or u < 1 or m < 0:
        raise ValueError("need g >= 1, u >= 1, m >= 0")
    if m == 0:
        verdict = check_uniform(g, u)
        verdict.notes.append("m = 0: uniform type, residue table not applied")
        return verdict
    if m == g:
        verdict = check_uniform(g, u + 1)
        verdict.notes.append(f"m = g: this is the uniform type {g}^{u + 1}")
        if not verdict.admissible and table_row(g, u, m) is None:
            verdict.failed_conditions.append(f"residue table (g = {g % 6} mod 6)")
        return verdict
    failed = congruence_failures(g, u, m)
    if table_row(g, u, m) is None:
        failed.append(f"residue table (g = {g % 6} mod 6)")
    verdict = AdmissibilityVerdict(not failed, failed)
    if (g, u, m) in KNOWN_NONEXISTENT:
        verdict.existence = KNOWN_NONEXISTENT_TAG
        verdict.citation = KNOWN_NONEXISTENT[(g, u, m)]
    elif verdict.admissible:
        _appendix_existence(verdict, g, u, m)
    return verdict


def check_uniform(g: int, u: int) -> AdmissibilityVerdict:
    if g < 1 or u < 1:
        raise ValueError("need g >= 1, u >= 1")
    failed = []
    if u < 4:
        failed.append("u >= 4")
    if (g * (u - 1)) % 3:
        failed.append("g(u-1) = 0 (mod 3)")
    if (g * g * u * (u - 1)) % 12:
        failed.append("g^2 u(u-1) = 0 (mod 12)")
    verdict = AdmissibilityVerdict(not failed, failed)
    _uniform_existence(verdict, g, u)
    return verdict


def _uniform_existence(verdict, g, u):
    if not verdict.admissible:
        return
    if (g, u, 0) in KNOWN_NONEXISTENT:
        verdict.existence = KNOWN_NONEXISTENT_TAG
        verdict.citation = KNOWN_NONEXISTENT[(g, u, 0)]
    else:
        verdict.existence = KNOWN_EXISTS
        verdict.citation = "uniform 4-GDD spectrum"


def _appendix_existence(verdict, g, u, m):
    from .appendix import entry_names

    name = f"{g}^{u} {m}^1"
    if name in entry_names():
        verdict.existence = KNOWN_EXISTS
        verdict.citation = f"appendix design {name}"
