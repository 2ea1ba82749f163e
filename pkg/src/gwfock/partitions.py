"""Partitions, border strips, and symmetric-group characters.

Partitions are plain tuples of weakly decreasing positive integers; the
empty tuple is the empty partition.  Border-strip moves are computed on the
half-integer level set {lam_i - i + 1/2}, doubled to keep everything in
integer arithmetic; the same moves drive both the Murnaghan-Nakayama
character recursion here and the boson operators in the Fock engine.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import factorial

PartitionT = tuple[int, ...]


def check_partition(parts) -> PartitionT:
    p = tuple(int(x) for x in parts)
    if any(x <= 0 for x in p):
        raise ValueError(f"parts must be positive: {p}")
    if any(p[i] < p[i + 1] for i in range(len(p) - 1)):
        raise ValueError(f"parts must be weakly decreasing: {p}")
    return p


def size(lam: PartitionT) -> int:
    return sum(lam)


def length(lam: PartitionT) -> int:
    return len(lam)


def conjugate(lam: PartitionT) -> PartitionT:
    if not lam:
        return ()
    out = []
    for i in range(lam[0]):
        out.append(sum(1 for x in lam if x > i))
    return tuple(out)


def enumerate_partitions(d: int) -> list[PartitionT]:
    """All partitions of d, reverse-lexicographic: (d) first, (1,..,1) last."""
    if d < 0:
        raise ValueError("d must be >= 0")
    return _partitions_cached(d)


@lru_cache(maxsize=None)
def _partitions_cached(d: int) -> list[PartitionT]:
    out: list[PartitionT] = []

    def rec(remaining: int, cap: int, prefix: tuple):
        if remaining == 0:
            out.append(prefix)
            return
        for part in range(min(cap, remaining), 0, -1):
            rec(remaining - part, part, prefix + (part,))

    rec(d, d if d else 1, ())
    return out


def partitions_up_to(d: int) -> list[PartitionT]:
    out = []
    for k in range(d + 1):
        out.extend(enumerate_partitions(k))
    return out


def partition_count(d: int) -> int:
    return len(enumerate_partitions(d))


def multiplicities(lam: PartitionT) -> dict[int, int]:
    out: dict[int, int] = {}
    for x in lam:
        out[x] = out.get(x, 0) + 1
    return out


def aut_order(lam: PartitionT) -> int:
    n = 1
    for m in multiplicities(lam).values():
        n *= factorial(m)
    return n


def z_mu(lam: PartitionT) -> int:
    """|Aut(mu)| times the product of the parts (the centralizer order)."""
    n = aut_order(lam)
    for x in lam:
        n *= x
    return n


def render_partition(lam: PartitionT) -> str:
    return "(" + ",".join(str(x) for x in lam) + ")"


def parse_partition(text: str) -> PartitionT:
    s = text.strip()
    if s.startswith("(") and s.endswith(")"):
        s = s[1:-1]
    s = s.strip()
    if not s:
        return ()
    return check_partition(int(x) for x in s.replace(" ", "").split(","))


# ---------------------------------------------------------------------------
# Border strips via doubled level sets.
#
# levels2(lam)[i] = 2*(lam_i - i) + 1 for i = 0, 1, ...; a strip move of
# size r shifts one level by 2r, allowed when the target level is free.
# The height of the strip is the number of occupied levels in between,
# which is also the fermionic reordering sign exponent.
# ---------------------------------------------------------------------------


def levels2(lam: PartitionT, rows: int) -> list[int]:
    return [2 * (lam[i] if i < len(lam) else 0) - 2 * i - 1
            for i in range(rows)]


def partition_from_levels2(levels: list[int]) -> PartitionT:
    desc = sorted(levels, reverse=True)
    rows = len(desc)
    lam = []
    for i, lv in enumerate(desc):
        x = (lv + 2 * i + 1) // 2
        if x < 0:
            raise ValueError("invalid level set")
        if x:
            lam.append(x)
    if any(lam[i] < lam[i + 1] for i in range(len(lam) - 1)):
        raise ValueError("levels do not form a partition")
    return tuple(lam)


def strip_moves(lam: PartitionT, r: int) -> list[tuple[PartitionT, int]]:
    """All results of sliding one level down by r (r>0 removes a strip of
    size r; r<0 adds one).  Returns (new partition, height) pairs where
    height counts occupied levels strictly between source and target."""
    if r == 0:
        raise ValueError("r must be nonzero")
    rows = len(lam) + abs(r) + 1
    lv = levels2(lam, rows)
    occ = set(lv)
    floor = lv[-1]  # all levels <= floor are occupied (vacuum tail)
    out = []
    for i, k in enumerate(lv):
        k2 = k - 2 * r
        if k2 <= floor or k2 in occ:
            continue
        between = sum(1 for x in lv if min(k, k2) < x < max(k, k2))
        new = lv.copy()
        new[i] = k2
        out.append((partition_from_levels2(new), between))
    return out


def remove_strips(lam: PartitionT, r: int) -> list[tuple[PartitionT, int]]:
    if r <= 0:
        raise ValueError("r must be positive")
    return strip_moves(lam, r)


def add_strips(lam: PartitionT, r: int) -> list[tuple[PartitionT, int]]:
    if r <= 0:
        raise ValueError("r must be positive")
    return strip_moves(lam, -r)


# ---------------------------------------------------------------------------
# Characters.
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _character_cached(nu: PartitionT, mu: PartitionT) -> int:
    if not mu:
        return 1 if not nu else 0
    r, rest = mu[0], mu[1:]
    total = 0
    for smaller, height in remove_strips(nu, r):
        total += (-1) ** height * _character_cached(smaller, rest)
    return total


def character(nu, mu) -> int:
    """Murnaghan-Nakayama value of the character chi^nu on class mu."""
    nu = check_partition(nu) if nu else ()
    mu = check_partition(mu) if mu else ()
    if size(nu) != size(mu):
        raise ValueError(f"size mismatch: |{nu}| != |{mu}|")
    return _character_cached(nu, mu)


def hook_dimension(nu: PartitionT) -> int:
    """dim of the irreducible indexed by nu (hook length formula)."""
    if not nu:
        return 1
    conj = conjugate(nu)
    n = factorial(size(nu))
    for i, row in enumerate(nu):
        for j in range(row):
            hook = (row - j) + (conj[j] - i) - 1
            n //= hook
    return n


def f2_eigenvalue(lam: PartitionT) -> Fraction:
    """Sum over rows of ((lam_i - i + 1/2)^2 - (-i + 1/2)^2)/2.

    Equals the content sum of the diagram; antisymmetric under conjugation.
    """
    total = Fraction(0)
    for i, x in enumerate(lam, start=1):
        a = Fraction(2 * x - 2 * i + 1, 2)
        b = Fraction(-2 * i + 1, 2)
        total += (a * a - b * b) / 2
    return total


def content_sum(lam: PartitionT) -> int:
    s = 0
    for i, row in enumerate(lam):
        for j in range(row):
            s += j - i
    return s
