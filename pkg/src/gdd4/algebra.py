"""Finite fields, transversal designs, resolvable TDs and the MacNeish product."""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass

import numpy as np

from .core import GroupedDesign, Provenance


def prime_power(q: int) -> tuple[int, int] | None:
    """(p, k) with q = p**k, or None."""
    if q < 2:
        return None
    for p in range(2, q + 1):
        if q % p == 0:
            k = 0
            n = q
            while n % p == 0:
                n //= p
                k += 1
            return (p, k) if n == 1 else None
    return None


def _poly_mulmod(a, b, modulus, p):
    """Multiply coefficient lists (low degree first) modulo a monic modulus."""
    k = len(modulus) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
    for d in range(len(prod) - 1, k - 1, -1):
        c = prod[d]
        if c:
            for i in range(k + 1):
                prod[d - k + i] = (prod[d - k + i] - c * modulus[i]) % p
    return (prod + [0] * k)[:k]


def _is_irreducible(coeffs, p):
    """True when the monic polynomial has no factor of degree <= k/2."""
    k = len(coeffs) - 1
    for d in range(1, k // 2 + 1):
        for tail in itertools.product(range(p), repeat=d):
            divisor = list(tail) + [1]
            if _divides(divisor, coeffs, p):
                return False
    return True


def _divides(divisor, poly, p):
    rem = list(poly)
    dd = len(divisor) - 1
    for d in range(len(rem) - 1, dd - 1, -1):
        c = rem[d]
        if c:
            for i in range(dd + 1):
                rem[d - dd + i] = (rem[d - dd + i] - c * divisor[i]) % p
    return not any(rem[:dd])


def least_irreducible(p: int, k: int) -> tuple[int, ...]:
    """Coefficients (c_0, ..., c_{k-1}, 1) of the least monic irreducible of degree k.

    Candidates are ordered by the integer sum(c_i * p**i), smallest first.
    """
    for code in range(p**k):
        tail = [(code // p**i) % p for i in range(k)]
        coeffs = tail + [1]
        if tail[0] == 0 and k > 1:
            continue
        if _is_irreducible(coeffs, p):
            return tuple(coeffs)
    raise ValueError(f"no irreducible polynomial of degree {k} over GF({p})")


@dataclass(frozen=True, eq=False)
class FiniteField:
    """GF(p^k) with elements 0..q-1 encoding coefficient vectors base p."""

    p: int
    k: int
    modulus: tuple[int, ...]
    add: np.ndarray
    mul: np.ndarray

    @property
    def q(self) -> int:
        return self.p**self.k

    def neg(self, a):
        return int(np.flatnonzero(self.add[a] == 0)[0])

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return int(np.flatnonzero(self.mul[a] == 1)[0])

    def __repr__(self):
        return f"GF({self.q})"


@functools.lru_cache(maxsize=None)
def make_field(q: int) -> FiniteField:
    pk = prime_power(q)
    if pk is None:
        raise ValueError(f"{q} is not a prime power")
    p, k = pk
    if k == 1:
        r = np.arange(p)
        add = (r[:, None] + r[None, :]) % p
        mul = (r[:, None] * r[None, :]) % p
        modulus = (0, 1)
    else:
        modulus = least_irreducible(p, k)
        vecs = [[(x // p**i) % p for i in range(k)] for x in range(q)]
        weights = [p**i for i in range(k)]

        def enc(vec):
            return sum(c * w for c, w in zip(vec, weights))

        add = np.empty((q, q), dtype=np.int64)
        mul = np.empty((q, q), dtype=np.int64)
        for a in range(q):
            for b in range(q):
                add[a, b] = enc([(x + y) % p for x, y in zip(vecs[a], vecs[b])])
                mul[a, b] = enc(_poly_mulmod(vecs[a], vecs[b], modulus, p)) if b >= a else mul[b, a]
    add.setflags(write=False)
    mul.setflags(write=False)
    return FiniteField(p, k, tuple(modulus), add, mul)


def _td_blocks(k: int, q: int):
    """Rows (x, y) -> coordinates; coordinate 0 is x, 1 is y, i>=2 is a_i x + y."""
    F = make_field(q)
    x, y = np.meshgrid(np.arange(q), np.arange(q), indexing="ij")
    x = x.ravel()
    y = y.ravel()
    coords = [x, y]
    for alpha in range(1, k - 1):
        coords.append(F.add[F.mul[alpha, x], y])
    return np.stack(coords, axis=1)


def td(k: int, q: int) -> GroupedDesign:
    """TD(k, q) from the field GF(q): q^2 blocks, group i = {i*q .. i*q+q-1}."""
    if not 2 <= k <= q + 1:
        raise ValueError(f"TD({k},{q}) needs 2 <= k <= q+1")
    coords = _td_blocks(k, q)
    blocks = coords + q * np.arange(k)[None, :]
    groups = [range(i * q, (i + 1) * q) for i in range(k)]
    return GroupedDesign(
        k * q,
        groups,
        blocks,
        kind="TD",
        k=k,
        provenance=Provenance.make("field-construction", "td", k=k, q=q),
    )


def rtd(k: int, q: int) -> GroupedDesign:
    """RTD(k, q): TD(k+1, q) minus its last group, resolved by the deleted value."""
    if not 2 <= k <= q:
        raise ValueError(f"RTD({k},{q}) needs 2 <= k <= q")
    coords = _td_blocks(k + 1, q)
    last = coords[:, -1]
    order = np.lexsort((np.arange(len(last)), last))
    coords = coords[order, :-1]
    blocks = coords + q * np.arange(k)[None, :]
    resolution = [range(c * q, (c + 1) * q) for c in range(q)]
    groups = [range(i * q, (i + 1) * q) for i in range(k)]
    return GroupedDesign(
        k * q,
        groups,
        blocks,
        kind="RGDD",
        k=k,
        resolution=resolution,
        provenance=Provenance.make("field-construction", "rtd", k=k, q=q),
    )


def _coordinates(design: GroupedDesign) -> tuple[np.ndarray, int]:
    """Blocks as (b, k) arrays of within-group positions, columns ordered by group."""
    q = len(design.groups[0])
    if any(len(g) != q for g in design.groups) or len(design.groups) != design.k:
        raise ValueError("not a transversal design")
    gi = design.group_index()
    pos = np.empty(design.v, dtype=np.int64)
    for g in design.groups:
        pos[list(g)] = np.arange(q)
    b = design.blocks
    order = np.argsort(gi[b], axis=1)
    cols = np.take_along_axis(b, order, axis=1)
    if not np.array_equal(np.sort(gi[b], axis=1), np.broadcast_to(np.arange(design.k), b.shape)):
        raise ValueError("block does not meet every group once")
    return pos[cols], q


def macneish(td_a: GroupedDesign, td_b: GroupedDesign) -> GroupedDesign:
    """TD(k, q_a q_b) on points (group i, (x_a, x_b)) -> i*q + x_a*q_b + x_b."""
    if td_a.k != td_b.k:
        raise ValueError(f"block sizes differ: {td_a.k} vs {td_b.k}")
    k = td_a.k
    ca, qa = _coordinates(td_a)
    cb, qb = _coordinates(td_b)
    q = qa * qb
    prod = (ca[:, None, :] * qb + cb[None, :, :]).reshape(-1, k)
    blocks = prod + q * np.arange(k)[None, :]
    groups = [range(i * q, (i + 1) * q) for i in range(k)]
    return GroupedDesign(
        k * q,
        groups,
        blocks,
        kind="TD",
        k=k,
        provenance=Provenance.make(
            "field-construction", "macneish", children=(td_a.provenance, td_b.provenance), k=k, q=q
        ),
    )


def transversal(k: int, n: int) -> GroupedDesign:
    """TD(k, n) from fields and MacNeish products over prime-power factors."""
    if n == 1:
        return GroupedDesign(k, [[i] for i in range(k)], [list(range(k))], kind="TD", k=k,
                             provenance=Provenance.make("field-construction", "td", k=k, q=1))
    if prime_power(n):
        return td(k, n)
    factors = _prime_power_factors(n)
    if min(factors) + 1 < k:
        raise ValueError(f"TD({k},{n}) is not available from fields and MacNeish products")
    out = td(k, factors[0])
    for f in factors[1:]:
        out = macneish(out, td(k, f))
    return out


def _prime_power_factors(n):
    out = []
    p = 2
    while n > 1:
        if n % p == 0:
            f = 1
            while n % p == 0:
                n //= p
                f *= p
            out.append(f)
        p += 1
    return out
