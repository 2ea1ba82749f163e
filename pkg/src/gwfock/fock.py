"""Truncated realization of the half-infinite wedge space with exact operators.

States are (partition, charge) pairs; a vector is a sparse map from states to
FormalSeries weights.  Operators act by explicit finite rules derived from the
level-set picture: occupied half-integer levels of (lam, c) are
lam_i - i + 1/2 + c.  Energies are kept doubled (2|lam| + c^2) so everything
stays in integer arithmetic.

Truncation is lossless by construction: when an operator pipeline is paired
against a fixed finite-energy vector, a component may be dropped exactly when
its energy exceeds what the remaining operators can still remove ("gap
ceilings", computed by scanning the prefix), with diagonal q-graded operators
capping the budget at q_max.  Exponentials of operators that can lower energy
at nonnegative u-cost keep over-ceiling components, since those may return
under the ceiling; their termination comes from the series windows.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, NamedTuple

from .partitions import (
    PartitionT,
    add_strips,
    check_partition,
    f2_eigenvalue,
    levels2,
    remove_strips,
    size,
)
from .rationals import Coeff, ONE as C1
from .series import (
    FormalSeries,
    Truncation,
    exp_coeffs,
    sinhc_inv_coeffs,
)

INF = None  # ceiling value meaning "unbounded"


class BasisState(NamedTuple):
    lam: PartitionT
    charge: int = 0

    def energy2(self) -> int:
        return 2 * size(self.lam) + self.charge * self.charge

    def energy(self) -> Fraction:
        return Fraction(self.energy2(), 2)


VACUUM = BasisState((), 0)


def state(lam, charge: int = 0) -> BasisState:
    return BasisState(check_partition(lam) if lam else (), charge)


class FockVector:
    """Sparse FormalSeries-weighted combination of basis states."""

    __slots__ = ("trunc", "terms")

    def __init__(self, trunc: Truncation, terms: dict | None = None):
        self.trunc = trunc
        self.terms = {s: w for s, w in (terms or {}).items() if w}

    @staticmethod
    def basis(trunc: Truncation, s: BasisState) -> "FockVector":
        return FockVector(trunc, {s: FormalSeries.one(trunc)})

    @staticmethod
    def vacuum(trunc: Truncation) -> "FockVector":
        return FockVector.basis(trunc, VACUUM)

    def __add__(self, other: "FockVector") -> "FockVector":
        out = dict(self.terms)
        for s, w in other.terms.items():
            cur = out.get(s)
            cur = w if cur is None else cur + w
            if cur:
                out[s] = cur
            else:
                out.pop(s, None)
        return FockVector(self.trunc, out)

    def __sub__(self, other: "FockVector") -> "FockVector":
        return self + other.scale(-C1)

    def scale(self, c) -> "FockVector":
        return FockVector(self.trunc,
                          {s: w.scale(c) for s, w in self.terms.items()})

    def mul_series(self, f: FormalSeries) -> "FockVector":
        return FockVector(self.trunc,
                          {s: w * f for s, w in self.terms.items()})

    def weight(self, s: BasisState) -> FormalSeries:
        return self.terms.get(s, FormalSeries.zero(self.trunc))

    def is_zero(self) -> bool:
        return not self.terms

    def states(self):
        return self.terms.keys()

    def render(self) -> str:
        if not self.terms:
            return "0"
        lines = []
        for s in sorted(self.terms, key=lambda s: (s.energy2(), s.charge, s.lam)):
            lines.append(f"({','.join(map(str, s.lam))} | c={s.charge}): "
                         f"{self.terms[s].render()}")
        return "\n".join(lines)

    __str__ = render


def inner_product(v: FockVector, w: FockVector) -> FormalSeries:
    """Orthonormal-basis pairing; all scalars are formal, so no conjugation."""
    out = FormalSeries.zero(v.trunc.meet(w.trunc))
    small, big = (v, w) if len(v.terms) <= len(w.terms) else (w, v)
    for s, a in small.terms.items():
        b = big.terms.get(s)
        if b is not None:
            out = out + a * b
    return out


# ---------------------------------------------------------------------------
# Monomial arguments b for the running variable of E_r(b).
# ---------------------------------------------------------------------------


class Mono(NamedTuple):
    """b = scale * u**u_exp * var (var optional)."""

    scale: Coeff
    u_exp: int = 0
    var: str | None = None

    def jmax(self, trunc: Truncation) -> int:
        """Largest power of b that can matter under the window."""
        best = None
        if self.var is not None:
            best = trunc.z_order(self.var)
        if self.u_exp > 0:
            span = (trunc.u_hi - min(trunc.u_lo, 0)) // self.u_exp
            best = span if best is None else min(best, span)
        if best is None:
            raise ValueError("monomial with no positive grading")
        return max(best, 0)

    def power_key(self, trunc: Truncation, j: int) -> tuple:
        key = [0] * trunc.arity()
        key[1] = j * self.u_exp
        if self.var is not None:
            key[trunc.index[self.var]] = j
        return tuple(key)

    def inject(self, coeffs: dict[int, Fraction | Coeff],
               trunc: Truncation) -> FormalSeries:
        """Sum coeffs[j] * b**j as a FormalSeries (j may be negative)."""
        out = {}
        sc = self.scale
        pows: dict[int, Coeff] = {0: C1}

        def scale_pow(j: int) -> Coeff:
            if j not in pows:
                pows[j] = sc ** j
            return pows[j]

        for j, c in coeffs.items():
            c = Coeff.of(c) * scale_pow(j)
            if not c:
                continue
            key = self.power_key(trunc, j)
            if trunc.admits(key):
                out[key] = c
        return FormalSeries(trunc, out, _checked=True)

    def series(self, trunc: Truncation) -> FormalSeries:
        return self.inject({1: Fraction(1)}, trunc)


def exp_phase(h: Fraction, bmon: Mono, trunc: Truncation) -> FormalSeries:
    """e^{b h} as a truncated series."""
    return bmon.inject(exp_coeffs(h, bmon.jmax(trunc)), trunc)


def e0_diagonal_weight(s: BasisState, bmon: Mono,
                       trunc: Truncation) -> FormalSeries:
    """Eigenvalue series of E_0(b) on a basis state.

    e^{c b}/vs(b) plus the finite regularized sum over occupied rows:
    sum_i (e^{b(lam_i - i + 1/2 + c)} - e^{b(-i + 1/2 + c)}).
    """
    jmax = bmon.jmax(trunc)
    order = jmax + 1
    c = s.charge
    # 1/vs(b) = b^{-1} * sinhc(b)^{-1}; fold in e^{c b}
    coeffs: dict[int, Fraction] = {}
    inv = sinhc_inv_coeffs(order + 1)
    ec = exp_coeffs(Fraction(c), order + 1)
    for i, a in inv.items():
        for j, b in ec.items():
            if i + j - 1 <= jmax:
                coeffs[i + j - 1] = coeffs.get(i + j - 1, Fraction(0)) + a * b
    # occupied minus vacuum rows, a finite regularization
    for i, x in enumerate(s.lam, start=1):
        h_occ = Fraction(2 * (x - i) + 1 + 2 * c, 2)
        h_vac = Fraction(-2 * i + 1 + 2 * c, 2)
        for m, cf in exp_coeffs(h_occ, jmax).items():
            coeffs[m] = coeffs.get(m, Fraction(0)) + cf
        for m, cf in exp_coeffs(h_vac, jmax).items():
            coeffs[m] = coeffs.get(m, Fraction(0)) - cf
    return bmon.inject(coeffs, trunc)


def e_offdiagonal_moves(s: BasisState, r: int
                        ) -> list[tuple[BasisState, int, Fraction]]:
    """Moves of E_r (r != 0) on a state: (target, sign exponent, phase h).

    E_r slides one occupied level k down by r, with wedge sign counting
    occupied levels strictly in between, and weight e^{b(k - r/2)}.
    """
    moves = remove_strips(s.lam, r) if r > 0 else add_strips(s.lam, -r)
    out = []
    # recover the source level for the phase: moving level k -> k - r changes
    # |lam| by -r, and the moved level is determined by the diagrams
    rows = len(s.lam) + abs(r) + 1
    lv = set(levels2(s.lam, rows))
    for lam2, height in moves:
        lv2 = set(levels2(lam2, rows))
        gone = lv - lv2
        came = lv2 - lv
        assert len(gone) == 1 and len(came) == 1
        k2 = gone.pop()
        h = Fraction(k2 - r + 2 * s.charge, 2)  # k - r/2 with k = (k2+2c)/2
        out.append((BasisState(lam2, s.charge), height, h))
    return out


# ---------------------------------------------------------------------------
# Operators.
# ---------------------------------------------------------------------------


class Operator:
    """A rule mapping a basis state to a finite weighted combination.

    Subclasses implement apply(); ceilings are doubled energies, with None
    meaning unbounded.  neg_u_cap/pos_u_cap bound how far a single
    application can move u-valuations (used for window margins).
    """

    name = "op"

    def apply(self, vec: FockVector, ceil2: int | None,
              trunc: Truncation) -> FockVector:
        raise NotImplementedError

    def max_lower2(self, trunc: Truncation) -> int | None:
        return 0

    def ceil_in(self, ceil_out: int | None, trunc: Truncation) -> int | None:
        ml = self.max_lower2(trunc)
        if ceil_out is INF or ml is INF:
            return INF
        return ceil_out + ml

    def neg_u_cap(self, trunc: Truncation) -> int:
        return 0

    def pos_u_cap(self, trunc: Truncation) -> int:
        return 0

    def adjoint(self) -> "Operator":
        raise NotImplementedError(f"no adjoint rule for {self.name}")

    # exponential pruning style: "strict" (pure raiser), "none"
    # (free or zero-cost lowering), "u_allowance" (lowering costs u-valuation)
    exp_prune = "none"

    def __repr__(self):
        return f"<{self.name}>"


def _prune_insert(out: dict, s: BasisState, w: FormalSeries,
                  ceil2: int | None):
    if not w:
        return
    if ceil2 is not INF and s.energy2() > ceil2:
        return
    cur = out.get(s)
    cur = w if cur is None else cur + w
    if cur:
        out[s] = cur
    else:
        del out[s]


class AlphaOp(Operator):
    """Boson alpha_k: adds (k<0) or removes (k>0) border strips of size |k|."""

    def __init__(self, k: int):
        if k == 0:
            raise ValueError("k must be nonzero")
        self.k = k
        self.name = f"alpha_{k}"
        self.exp_prune = "strict" if k < 0 else "none"

    def max_lower2(self, trunc):
        return 2 * self.k if self.k > 0 else 0

    def adjoint(self):
        return AlphaOp(-self.k)

    def apply(self, vec, ceil2, trunc):
        k = self.k
        out: dict = {}
        for s, w in vec.terms.items():
            if k > 0 and size(s.lam) < k:
                continue
            moves = remove_strips(s.lam, k) if k > 0 else add_strips(s.lam, -k)
            for lam2, height in moves:
                w2 = w if height % 2 == 0 else -w
                _prune_insert(out, BasisState(lam2, s.charge), w2, ceil2)
        return FockVector(vec.trunc, out)


class EOp(Operator):
    """A single E_r(b) with b a monomial argument."""

    def __init__(self, r: int, bmon: Mono):
        self.r = r
        self.bmon = bmon
        self.name = f"E_{r}({_mono_name(bmon)})"

    def max_lower2(self, trunc):
        return 2 * self.r if self.r > 0 else 0

    def adjoint(self):
        return EOp(-self.r, self.bmon)

    def neg_u_cap(self, trunc):
        # the 1/vs(b) constant contributes one negative u per u_exp
        return max(self.bmon.u_exp, 0) if self.r == 0 else 0

    def apply(self, vec, ceil2, trunc):
        out: dict = {}
        for s, w in vec.terms.items():
            if self.r == 0:
                _prune_insert(out, s, w * e0_diagonal_weight(s, self.bmon, trunc),
                              ceil2)
                continue
            for s2, height, h in e_offdiagonal_moves(s, self.r):
                w2 = w * exp_phase(h, self.bmon, trunc)
                if height % 2:
                    w2 = -w2
                _prune_insert(out, s2, w2, ceil2)
        return FockVector(vec.trunc, out)


def _mono_name(m: Mono) -> str:
    parts = []
    if m.scale != C1:
        parts.append(str(m.scale))
    if m.u_exp:
        parts.append("u" if m.u_exp == 1 else f"u^{m.u_exp}")
    if m.var:
        parts.append(m.var)
    return "*".join(parts) or "1"


class DiagonalOp(Operator):
    """Multiplication by a state-dependent exact scalar."""

    def __init__(self, fn, name: str, charge_zero_only: bool = False):
        self.fn = fn
        self.name = name
        self.charge_zero_only = charge_zero_only

    def adjoint(self):
        return self

    def apply(self, vec, ceil2, trunc):
        out: dict = {}
        for s, w in vec.terms.items():
            if self.charge_zero_only and s.charge != 0:
                raise ValueError(
                    f"{self.name} is only defined on the charge-0 sector")
            _prune_insert(out, s, w.scale(self.fn(s)), ceil2)
        return FockVector(vec.trunc, out)


def h_op() -> DiagonalOp:
    return DiagonalOp(lambda s: Coeff.of(s.energy()), "H")


def c_op() -> DiagonalOp:
    return DiagonalOp(lambda s: Coeff.of(s.charge), "C")


def f2_op() -> DiagonalOp:
    return DiagonalOp(lambda s: Coeff.of(f2_eigenvalue(s.lam)), "F2",
                      charge_zero_only=True)


class PowerHOp(Operator):
    """(q^a u^b)^H: multiplies by the monomial to the power of the energy.

    On charge-c states the exponent is |lam| + (c^2 - charge_ref^2)/2, which
    must be an integer; the reference-charge half-power prefactor is factored
    out by the caller.
    """

    def __init__(self, q_step: int = 1, u_step: int = -2, charge_ref: int = 0):
        self.q_step = q_step
        self.u_step = u_step
        self.charge_ref = charge_ref
        self.name = f"(q^{q_step} u^{u_step})^H"

    def adjoint(self):
        return self

    def ceil_in(self, ceil_out, trunc):
        cap2 = 2 * trunc.q_max + self.charge_ref ** 2 if self.q_step else INF
        if ceil_out is INF:
            return cap2
        if cap2 is INF:
            return ceil_out
        return min(ceil_out, cap2)

    def neg_u_cap(self, trunc):
        if self.u_step >= 0:
            return 0
        return -self.u_step * trunc.q_max + abs(self.u_step)

    def apply(self, vec, ceil2, trunc):
        out: dict = {}
        for s, w in vec.terms.items():
            e2 = s.energy2() - self.charge_ref ** 2
            if e2 % 2:
                raise ValueError(
                    f"half-integer power of the grading monomial on {s}; "
                    f"factor the reference-charge prefactor first")
            e = e2 // 2
            w2 = w * FormalSeries.monomial(trunc, C1, q=e * self.q_step,
                                           u=e * self.u_step)
            _prune_insert(out, s, w2, ceil2)
        return FockVector(vec.trunc, out)


class DiagExpOp(Operator):
    """exp(eig(state) * u^{u_step}) as a diagonal weight series."""

    def __init__(self, eig, u_step: int, name: str,
                 charge_zero_only: bool = False):
        if u_step <= 0:
            raise ValueError("u_step must be positive for termination")
        self.eig = eig
        self.u_step = u_step
        self.name = name
        self.charge_zero_only = charge_zero_only

    def adjoint(self):
        return self

    def apply(self, vec, ceil2, trunc):
        out: dict = {}
        jmax = max((trunc.u_hi - min(trunc.u_lo, 0)) // self.u_step, 0)
        for s, w in vec.terms.items():
            if self.charge_zero_only and s.charge != 0:
                raise ValueError(
                    f"{self.name} is only defined on the charge-0 sector")
            x = Coeff.of(self.eig(s))
            terms = {}
            cur = C1
            for j in range(0, jmax + 1):
                if j:
                    cur = cur * x / j
                key = [0] * trunc.arity()
                key[1] = j * self.u_step
                if cur and trunc.admits(tuple(key)):
                    terms[tuple(key)] = cur
                if not x:
                    break
            w2 = w * FormalSeries(trunc, terms, _checked=True)
            _prune_insert(out, s, w2, ceil2)
        return FockVector(vec.trunc, out)


class DiagPowOp(Operator):
    """Multiplication by eig(state)**b for a fixed integer b >= 0."""

    def __init__(self, eig, b: int, name: str, charge_zero_only: bool = False):
        self.eig = eig
        self.b = b
        self.name = name
        self.charge_zero_only = charge_zero_only

    def adjoint(self):
        return self

    def apply(self, vec, ceil2, trunc):
        out: dict = {}
        for s, w in vec.terms.items():
            if self.charge_zero_only and s.charge != 0:
                raise ValueError(
                    f"{self.name} is only defined on the charge-0 sector")
            _prune_insert(out, s, w.scale(Coeff.of(self.eig(s)) ** self.b),
                          ceil2)
        return FockVector(vec.trunc, out)


class TOp(Operator):
    """Translation T^n: shifts the charge, partition unchanged."""

    CHARGE_REACH = 8  # ceilings assume |input charge| stays below this

    def __init__(self, n: int):
        self.n = n
        self.name = f"T^{n}"

    def adjoint(self):
        return TOp(-self.n)

    def max_lower2(self, trunc):
        return 2 * abs(self.n) * self.CHARGE_REACH

    def apply(self, vec, ceil2, trunc):
        out: dict = {}
        for s, w in vec.terms.items():
            if abs(s.charge) > self.CHARGE_REACH - abs(self.n):
                raise ValueError("charge out of assumed reach for T ceilings")
            _prune_insert(out, BasisState(s.lam, s.charge + self.n), w, ceil2)
        return FockVector(vec.trunc, out)


class ProjectEnergyOp(Operator):
    """Orthogonal projection onto the d-eigenspace of H."""

    def __init__(self, d: int):
        if d < 0:
            raise ValueError("d must be >= 0")
        self.d = d
        self.name = f"P_{d}"

    def adjoint(self):
        return self

    def ceil_in(self, ceil_out, trunc):
        if ceil_out is INF:
            return 2 * self.d
        return min(ceil_out, 2 * self.d)

    def apply(self, vec, ceil2, trunc):
        out = {s: w for s, w in vec.terms.items()
               if s.energy2() == 2 * self.d}
        return FockVector(vec.trunc, out)


class ScaledOp(Operator):
    """op followed by multiplication with a fixed series factor."""

    def __init__(self, op: Operator, factor: FormalSeries, name: str = ""):
        self.op = op
        self.factor = factor
        self.name = name or f"{op.name}*series"
        self.exp_prune = op.exp_prune

    def max_lower2(self, trunc):
        return self.op.max_lower2(trunc)

    def ceil_in(self, ceil_out, trunc):
        return self.op.ceil_in(ceil_out, trunc)

    def neg_u_cap(self, trunc):
        return self.op.neg_u_cap(trunc) + max(0, -self.factor.min_u_exponent())

    def pos_u_cap(self, trunc):
        hi = max((k[1] for k in self.factor.terms), default=0)
        return self.op.pos_u_cap(trunc) + max(0, hi)

    def apply(self, vec, ceil2, trunc):
        res = self.op.apply(vec, ceil2, trunc)
        return res.mul_series(self.factor)


class ScalarOp(Operator):
    """op scaled by a fixed exact constant."""

    def __init__(self, op: Operator, c, name: str = ""):
        self.op = op
        self.c = Coeff.of(c)
        self.name = name or f"({self.c})*{op.name}"
        self.exp_prune = op.exp_prune

    def max_lower2(self, trunc):
        return self.op.max_lower2(trunc)

    def ceil_in(self, ceil_out, trunc):
        return self.op.ceil_in(ceil_out, trunc)

    def neg_u_cap(self, trunc):
        return self.op.neg_u_cap(trunc)

    def pos_u_cap(self, trunc):
        return self.op.pos_u_cap(trunc)

    def adjoint(self):
        return ScalarOp(self.op.adjoint(), self.c)

    def apply(self, vec, ceil2, trunc):
        return self.op.apply(vec, ceil2, trunc).scale(self.c)


class ExtractedOp(Operator):
    """[var**power] of an operator family with series weights in var.

    Valid because each extraction variable is private to one operator: the
    incoming weights never involve var, so taking the coefficient right after
    application is exact.  An optional u-shift realizes scalar prefactors
    like 1/u.
    """

    def __init__(self, inner: Operator, var: str, power: int,
                 u_shift: int = 0, name: str = ""):
        self.inner = inner
        self.var = var
        self.power = power
        self.u_shift = u_shift
        self.name = name or f"[{var}^{power}]{inner.name}"
        self.exp_prune = inner.exp_prune

    def adjoint(self):
        raise NotImplementedError("build the adjoint family and extract")

    def max_lower2(self, trunc):
        # lowering by r carries var-valuation >= r, so the extraction at
        # var**power bounds it by the power exactly (Laurent-weight adjoints
        # excepted)
        if _lowering_is_laurent(self.inner):
            return INF
        ml = self.inner.max_lower2(trunc)
        cap = 2 * max(self.power, 0)
        if ml is INF:
            return cap
        return min(ml, cap)

    def neg_u_cap(self, trunc):
        return self.inner.neg_u_cap(trunc) + max(0, -self.u_shift)

    def pos_u_cap(self, trunc):
        return self.inner.pos_u_cap(trunc) + max(0, self.u_shift)

    def apply(self, vec, ceil2, trunc):
        res = self.inner.apply(vec, ceil2, trunc)
        out = {}
        for s, w in res.terms.items():
            w2 = w.coeff_of_var(self.var, self.power)
            if self.u_shift:
                w2 = w2.shift_u(self.u_shift)
            if w2:
                out[s] = w2
        return FockVector(vec.trunc, out)


def _lowering_is_laurent(op: Operator) -> bool:
    """True when lowering weights have negative var-valuation (adjoint side)."""
    return getattr(op, "adj", False)


class SumOp(Operator):
    """A finite sum of operators (used for sums of extracted coefficients)."""

    def __init__(self, ops: list[Operator], name: str = "sum"):
        if not ops:
            raise ValueError("empty operator sum")
        self.ops = ops
        self.name = name
        prunes = {op.exp_prune for op in ops}
        if prunes <= {"strict"}:
            self.exp_prune = "strict"
        elif prunes <= {"strict", "u_allowance"}:
            self.exp_prune = "u_allowance"
        else:
            self.exp_prune = "none"

    def max_lower2(self, trunc):
        caps = [op.max_lower2(trunc) for op in self.ops]
        if any(c is INF for c in caps):
            return INF
        return max(caps)

    def neg_u_cap(self, trunc):
        return max(op.neg_u_cap(trunc) for op in self.ops)

    def pos_u_cap(self, trunc):
        return max(op.pos_u_cap(trunc) for op in self.ops)

    def apply(self, vec, ceil2, trunc):
        out = FockVector(vec.trunc, {})
        for op in self.ops:
            out = out + op.apply(vec, ceil2, trunc)
        return out


class ExpOp(Operator):
    """exp of a base operator, exact under the pruning/window discipline.

    When the base attaches a formal bookkeeping variable per application
    (x-scaled insertion sums), pass its names as x_budget: over-ceiling
    components are then pruned by how much the remaining budget can still
    lower, which keeps free-lowering exponentials finite and fast.
    """

    MAX_ITER = 400

    def __init__(self, base: Operator, name: str = "",
                 x_budget: tuple[str, ...] | None = None):
        self.base = base
        self.name = name or f"exp({base.name})"
        self.x_budget = x_budget

    def adjoint(self):
        return ExpOp(self.base.adjoint())

    def max_lower2(self, trunc):
        ml = self.base.max_lower2(trunc)
        if ml is INF or ml > 0:
            return INF
        return 0

    def neg_u_cap(self, trunc):
        per = self.base.neg_u_cap(trunc)
        if per == 0:
            return 0
        # raising/diagonal factors each cost u-valuation; the total spend is
        # bounded by the full window width
        return trunc.u_hi - trunc.u_lo + per

    def pos_u_cap(self, trunc):
        per = self.base.pos_u_cap(trunc)
        if per == 0:
            return 0
        return trunc.u_hi - trunc.u_lo + per

    def apply(self, vec, ceil2, trunc):
        mode = self.base.exp_prune
        out = dict(vec.terms)
        term = vec
        n = 1
        while True:
            if mode == "strict":
                inner_ceil = ceil2
            elif mode == "u_allowance" and ceil2 is not INF:
                inner_ceil = self._allowance_ceiling(term, ceil2)
            else:
                inner_ceil = INF
            term = self.base.apply(term, inner_ceil, trunc).scale(
                Fraction(1, n))
            if term.is_zero():
                break
            for s, w in term.terms.items():
                cur = out.get(s)
                cur = w if cur is None else cur + w
                if cur:
                    out[s] = cur
                else:
                    del out[s]
            n += 1
            if n > self.MAX_ITER:
                raise RuntimeError(
                    f"{self.name} did not terminate under the truncation")
        pruned = {s: w for s, w in out.items()
                  if ceil2 is INF or s.energy2() <= ceil2}
        return FockVector(vec.trunc, pruned)

    def _allowance_ceiling(self, term: FockVector, ceil2: int):
        # lowering by J costs at least J+1 in u-valuation for adjoint-side
        # operators, so a component with u-room R can shed at most R-1 energy
        best = ceil2
        for w in term.terms.values():
            room = w.min_u_exponent(default=term.trunc.u_hi) - term.trunc.u_lo
            best = max(best, ceil2 + max(0, 2 * (room - 1)))
        return best


# ---------------------------------------------------------------------------
# Pipelines and expectations.
# ---------------------------------------------------------------------------


def gap_ceilings(ops: list[Operator], out_energy2: int,
                 trunc: Truncation) -> list[int | None]:
    """ceilings[i] bounds the energy of the output of ops[i]."""
    ceilings: list[int | None] = [None] * len(ops)
    cur: int | None = out_energy2
    for i in range(len(ops)):
        ceilings[i] = cur
        cur = ops[i].ceil_in(cur, trunc)
    return ceilings


def apply_pipeline(ops: list[Operator], vec: FockVector,
                   out_energy2: int | None, trunc: Truncation) -> FockVector:
    """Apply ops right-to-left with gap-ceiling pruning."""
    if out_energy2 is INF:
        ceilings: list[int | None] = [INF] * len(ops)
    else:
        ceilings = gap_ceilings(ops, out_energy2, trunc)
    if trunc.energy_cap is not None:
        cap2 = int(2 * trunc.energy_cap)
        ceilings = [cap2 if c is INF else min(c, cap2) for c in ceilings]
    for i in range(len(ops) - 1, -1, -1):
        vec = ops[i].apply(vec, ceilings[i], trunc)
        if vec.is_zero():
            break
    return vec


def working_truncation(ops: list[Operator], trunc: Truncation,
                       post_u_shift: int = 0) -> Truncation:
    neg = sum(op.neg_u_cap(trunc) for op in ops)
    pos = sum(op.pos_u_cap(trunc) for op in ops)
    return Truncation(
        trunc.q_max,
        trunc.u_lo - post_u_shift - pos,
        trunc.u_hi - post_u_shift + neg,
        trunc.z_orders,
        trunc.energy_cap,
    )


def matrix_element(ops: list[Operator], trunc: Truncation,
                   in_state: BasisState = VACUUM,
                   out_state: BasisState = VACUUM,
                   post_u_shift: int = 0) -> FormalSeries:
    """(ops[0] ... ops[-1] v_in, v_out) * u**post_u_shift, exactly."""
    work = working_truncation(ops, trunc, post_u_shift)
    vec = apply_pipeline(ops, FockVector.basis(work, in_state),
                         out_state.energy2(), work)
    raw = vec.weight(out_state)
    return raw.shift_u(post_u_shift, trunc)


def vacuum_expectation(ops: Iterable[Operator], trunc: Truncation,
                       post_u_shift: int = 0) -> FormalSeries:
    """<ops[0] ... ops[-1]> as an exact truncated series."""
    return matrix_element(list(ops), trunc, VACUUM, VACUUM, post_u_shift)


def apply_to_vector(ops: list[Operator], vec: FockVector,
                    out_energy2: int | None, trunc: Truncation) -> FockVector:
    return apply_pipeline(ops, vec, out_energy2, trunc)


# -- thin spec-surface wrappers ---------------------------------------------


def apply_alpha(k: int, v: FockVector) -> FockVector:
    cap = v.trunc.energy_cap
    ceil2 = int(2 * cap) if cap is not None else INF
    return AlphaOp(k).apply(v, ceil2, v.trunc)


def apply_E(r: int, v: FockVector, z_var: str) -> FockVector:
    cap = v.trunc.energy_cap
    ceil2 = int(2 * cap) if cap is not None else INF
    return EOp(r, Mono(C1, 0, z_var)).apply(v, ceil2, v.trunc)


def apply_diagonal(which: str, v: FockVector, scalar_steps=(1, -2)
                   ) -> FockVector:
    ops = {"H": h_op, "C": c_op, "F2": f2_op}
    if which in ops:
        op = ops[which]()
    elif which == "scalar^H":
        op = PowerHOp(scalar_steps[0], scalar_steps[1])
    else:
        raise ValueError(f"unknown diagonal {which}")
    cap = v.trunc.energy_cap
    ceil2 = int(2 * cap) if cap is not None else INF
    return op.apply(v, ceil2, v.trunc)


def apply_T(n: int, v: FockVector) -> FockVector:
    cap = v.trunc.energy_cap
    ceil2 = int(2 * cap) if cap is not None else INF
    return TOp(n).apply(v, ceil2, v.trunc)


def apply_exp(op: Operator, v: FockVector) -> FockVector:
    cap = v.trunc.energy_cap
    ceil2 = int(2 * cap) if cap is not None else INF
    return ExpOp(op).apply(v, ceil2, v.trunc)


def project_energy(d: int, v: FockVector) -> FockVector:
    return ProjectEnergyOp(d).apply(v, INF, v.trunc)
