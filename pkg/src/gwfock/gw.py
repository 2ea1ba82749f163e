"""Equivariant Gromov-Witten invariants of P1 by two independent routes.

The localization route sums J-function products over partitions of the
degree; the operator route evaluates a single vacuum expectation with the
energy projection (or the q-graded propagator) in the middle.  Their exact
agreement over Q(t) is the central engine test.  Insertion-level brackets,
the basis change between fixed-point and identity/point classes, and the
nonequivariant stationary specialization live here as well.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from .partitions import (
    PartitionT,
    check_partition,
    enumerate_partitions,
    f2_eigenvalue,
    size,
    z_mu,
)
from .rationals import Coeff, ONE as C1, T, PoleAtTZero
from .series import FormalSeries, Truncation
from .fock import (
    INF,
    AlphaOp,
    DiagExpOp,
    EOp,
    ExpOp,
    ExtractedOp,
    Mono,
    Operator,
    PowerHOp,
    ProjectEnergyOp,
    ScalarOp,
    SumOp,
    TOp,
    vacuum_expectation,
    matrix_element,
)
from .hodge import AFamilyOp, a_symbolic

ZX = "_zx"  # shared private variables for coefficient extraction
WX = "_wx"


def build_bA(z_var: str) -> AFamilyOp:
    """The raw A(t z, u z) family; the operator A(z) is u^{-1} times it."""
    return a_symbolic(z_var, a_scale=T)


def build_bA_star(w_var: str) -> AFamilyOp:
    """The raw A(-t w, u w)* family; A*(w) is u^{-1} times it."""
    return a_symbolic(w_var, a_scale=-T, adjoint=True)


def insertion_op(k: int, side: str) -> Operator:
    """A_k (side 'zero') or A*_k (side 'inf'): [z^{k+1}] of u^{-1} A(tz,uz)."""
    if k < 0:
        raise ValueError("descendent index must be >= 0")
    if side == "zero":
        return ExtractedOp(build_bA(ZX), ZX, k + 1, u_shift=-1,
                           name=f"A_{k}")
    if side == "inf":
        return ExtractedOp(build_bA_star(WX), WX, k + 1, u_shift=-1,
                           name=f"A*_{k}")
    raise ValueError("side must be 'zero' or 'inf'")


def _with_extraction_vars(trunc: Truncation, kmax_zero: int,
                          kmax_inf: int) -> Truncation:
    z_orders = dict(trunc.z_orders)
    if ZX in z_orders or WX in z_orders:
        raise ValueError("reserved variable name in truncation")
    extra = []
    if kmax_zero >= 0:
        extra.append((ZX, kmax_zero + 1))
    if kmax_inf >= 0:
        extra.append((WX, kmax_inf + 1))
    return Truncation(trunc.q_max, trunc.u_lo, trunc.u_hi,
                      trunc.z_orders + tuple(extra), trunc.energy_cap)


def _strip_extraction_vars(series: FormalSeries,
                           trunc: Truncation) -> FormalSeries:
    names = series.trunc.names
    keep = [i for i, n in enumerate(names) if n not in (ZX, WX)]
    out = {}
    for k, c in series.terms.items():
        if any(k[i] for i, n in enumerate(names) if n in (ZX, WX)):
            raise AssertionError("unextracted private variable")
        out[tuple(k[i] for i in keep)] = c
    return FormalSeries(trunc, out, _checked=True)


# ---------------------------------------------------------------------------
# J-function and the localization route.
# ---------------------------------------------------------------------------


def j_function(z_vars: tuple[str, ...], mu, trunc: Truncation,
               first_line: bool = False) -> FormalSeries:
    """J(z, mu, u, t): the localization vertex series.

    Default is the operational form
        u^{-d-n} <prod A(t z_i, u z_i) e^{alpha_1} e^{(u/t) F2}
                  prod alpha_{-mu_i}>;
    first_line=True evaluates instead
        t^{-d} u^{-n} prod(mu_i^{mu_i}/mu_i!) <prod A(t z_i, u z_i)
                  prod A(mu_i, (u/t) mu_i)>,
    which must agree (conjugation identity).
    """
    mu = check_partition(mu) if mu else ()
    d, n = size(mu), len(z_vars)
    ops: list[Operator] = [a_symbolic(v, a_scale=T) for v in z_vars]
    if first_line:
        from .hodge import a_integer
        scale = C1
        for m in mu:
            ops.append(a_integer(m, b_scale=Coeff.t_power(-1, m)))
            scale = scale * Coeff.of(Fraction(m ** m, factorial(m)))
        scale = scale * Coeff.t_power(-d)
        val = vacuum_expectation(ops, trunc, post_u_shift=-n)
        return val.scale(scale)
    ops.append(ExpOp(AlphaOp(1)))
    ops.append(DiagExpOp(
        lambda s: Coeff.t_power(-1, 1) * Coeff.of(f2_eigenvalue(s.lam)),
        1, "e^{(u/t) F2}", charge_zero_only=True))
    ops.extend(AlphaOp(-m) for m in mu)
    return vacuum_expectation(ops, trunc, post_u_shift=-d - n)


def _j_u_floor(vars_: tuple[str, ...], d: int, trunc: Truncation) -> int:
    """A lower bound for u-exponents of J(vars, mu) with |mu| = d."""
    return -d - len(vars_) - sum(trunc.z_order(v) + 2 for v in vars_)


def g_localization(z_vars: tuple[str, ...], w_vars: tuple[str, ...], d: int,
                   trunc: Truncation) -> FormalSeries:
    """G_d by the fixed-point partition sum over |mu| = d.

    Each J factor is computed on a u-window widened by the partner's lowest
    exponent, so the truncated product is complete on the requested window.
    """
    wide_z = trunc.widen_u(0, max(0, -_j_u_floor(w_vars, d, trunc)))
    wide_w = trunc.widen_u(0, max(0, -_j_u_floor(z_vars, d, trunc)))
    total = FormalSeries.zero(trunc)
    for mu in enumerate_partitions(d):
        jz = j_function(z_vars, mu, wide_z)
        jw = j_function(w_vars, mu, wide_w).neg_t()
        total = total + ((jz * jw) / z_mu(mu)).restrict(trunc)
    return total


def g_operator(z_vars: tuple[str, ...], w_vars: tuple[str, ...],
               d: int | None, trunc: Truncation) -> FormalSeries:
    """G_d (or the q-graded G when d is None) by the operator route."""
    n, m = len(z_vars), len(w_vars)
    ops: list[Operator] = [a_symbolic(v, a_scale=T) for v in z_vars]
    ops.append(ExpOp(AlphaOp(1)))
    mid: Operator
    if d is None:
        ops.append(PowerHOp(1, -2))
        shift = -n - m
    else:
        ops.append(ProjectEnergyOp(d))
        shift = -2 * d - n - m
    ops.append(ExpOp(AlphaOp(-1)))
    # adjoint of an ordered product reverses the factors, so the w-side is
    # applied with w_1 rightmost; this matches the J-route expansion order
    ops.extend(a_symbolic(v, a_scale=-T, adjoint=True)
               for v in reversed(w_vars))
    return vacuum_expectation(ops, trunc, post_u_shift=shift)


# ---------------------------------------------------------------------------
# Descendent brackets.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InsertionList:
    zero_insertions: tuple[int, ...] = ()
    infinity_insertions: tuple[int, ...] = ()

    def __post_init__(self):
        if any(k < 0 for k in self.zero_insertions + self.infinity_insertions):
            raise ValueError("descendent indices must be >= 0")

    def labels(self) -> tuple:
        return tuple(("zero", k) for k in self.zero_insertions) + \
            tuple(("inf", k) for k in self.infinity_insertions)


@dataclass
class GwResult:
    value: FormalSeries
    connected: bool
    insertions: InsertionList

    def assert_polynomial_in_t(self):
        for key, c in self.value.terms.items():
            if not c.is_polynomial():
                raise AssertionError(
                    f"nonpolynomial t-coefficient {c} at {key}")


def tau_bracket_disconnected(ins: InsertionList,
                             trunc: Truncation) -> FormalSeries:
    """<prod A_{k_i} e^{a1} (q/u^2)^H e^{a-1} prod A*_{l_j}>."""
    kz = max(ins.zero_insertions, default=-1)
    kw = max(ins.infinity_insertions, default=-1)
    work = _with_extraction_vars(trunc, kz, kw)
    ops: list[Operator] = [insertion_op(k, "zero")
                           for k in ins.zero_insertions]
    ops.append(ExpOp(AlphaOp(1)))
    ops.append(PowerHOp(1, -2))
    ops.append(ExpOp(AlphaOp(-1)))
    ops.extend(insertion_op(l, "inf") for l in ins.infinity_insertions)
    val = vacuum_expectation(ops, work)
    return _strip_extraction_vars(val, trunc)


def vacuum_tau_series(trunc: Truncation) -> FormalSeries:
    """The empty bracket e^{q/u^2} within the window."""
    out = FormalSeries.zero(trunc)
    for dd in range(trunc.q_max + 1):
        if -2 * dd < trunc.u_lo or -2 * dd > trunc.u_hi:
            continue
        out = out + FormalSeries.monomial(
            trunc, Coeff.of(Fraction(1, factorial(dd))), q=dd, u=-2 * dd)
    return out


def _normalized_brackets(labels: tuple, trunc: Truncation) -> dict:
    """Disconnected brackets divided by e^{q/u^2}, per label subset."""
    import itertools
    emt = exp_minus_q_over_u2(trunc)
    cache = {}
    for r in range(len(labels) + 1):
        for subset in itertools.combinations(range(len(labels)), r):
            key = tuple(subset)
            ins = _subset_insertions(labels, subset)
            cache[key] = tau_bracket_disconnected(ins, trunc) * emt
    return cache


def exp_minus_q_over_u2(trunc: Truncation) -> FormalSeries:
    out = FormalSeries.zero(trunc)
    for dd in range(trunc.q_max + 1):
        if -2 * dd < trunc.u_lo or -2 * dd > trunc.u_hi:
            continue
        out = out + FormalSeries.monomial(
            trunc, Coeff.of(Fraction((-1) ** dd, factorial(dd))),
            q=dd, u=-2 * dd)
    return out


def _subset_insertions(labels, subset) -> InsertionList:
    zero = tuple(labels[i][1] for i in subset if labels[i][0] == "zero")
    inf_ = tuple(labels[i][1] for i in subset if labels[i][0] == "inf")
    return InsertionList(zero, inf_)


def tau_bracket(ins: InsertionList, trunc: Truncation,
                connected: bool = False) -> GwResult:
    """Descendent bracket generating series in (q, u), exact over Q(t).

    Disconnected: the direct operator expectation.  Connected: set-partition
    Moebius inversion of the brackets normalized by e^{q/u^2} (the 0-point
    factor), so repeated degree-1 unmarked components are handled exactly.
    """
    if not connected:
        return GwResult(tau_bracket_disconnected(ins, trunc), False, ins)
    labels = ins.labels()
    idx = tuple(range(len(labels)))
    norm = _normalized_brackets(labels, trunc)
    from .hodge import _set_partitions
    conn: dict = {}
    for key in sorted(norm, key=len):
        total = FormalSeries.zero(trunc)
        for part in _set_partitions(key):
            if len(part) == 1:
                continue
            prod = FormalSeries.one(trunc)
            for block in part:
                prod = prod * conn[tuple(sorted(block))]
            total = total + prod
        conn[key] = norm[key] - total
    return GwResult(conn[idx], True, ins)


# -- mixed-basis brackets ----------------------------------------------------


def basis_transform_insertion(kind: str, k: int) -> list[tuple[Coeff, tuple]]:
    """Expand one insertion into the fixed-point basis.

    kind 'one' is tau_k(1) = (tau_k(0') - tau_k(inf'))/t; kind 'point' is
    tau_k(h) = tau_k(inf'); 'zero'/'inf' are already in the target basis.
    """
    if kind == "zero":
        return [(C1, ("zero", k))]
    if kind == "inf":
        return [(C1, ("inf", k))]
    if kind == "one":
        inv_t = Coeff.t_power(-1)
        return [(inv_t, ("zero", k)), (-inv_t, ("inf", k))]
    if kind == "point":
        return [(C1, ("inf", k))]
    raise ValueError(f"unknown insertion kind {kind}")


def basis_transform_to_xy(kind: str, k: int) -> list[tuple[Coeff, tuple]]:
    """The inverse change: tau_k(0') = t tau_k(1) + tau_k(h), tau_k(inf') =
    tau_k(h)."""
    if kind == "zero":
        return [(T, ("one", k)), (C1, ("point", k))]
    if kind == "inf":
        return [(C1, ("point", k))]
    raise ValueError(f"unknown insertion kind {kind}")


def mixed_bracket(insertions: list[tuple[str, int]], trunc: Truncation,
                  connected: bool = True) -> FormalSeries:
    """Bracket with insertions in any of the bases, by multilinearity."""
    import itertools
    expansions = [basis_transform_insertion(kind, k)
                  for kind, k in insertions]
    total = FormalSeries.zero(trunc)
    for choice in itertools.product(*expansions):
        scale = C1
        zero, inf_ = [], []
        for c, (side, k) in choice:
            scale = scale * c
            (zero if side == "zero" else inf_).append(k)
        res = tau_bracket(InsertionList(tuple(zero), tuple(inf_)), trunc,
                          connected=connected)
        total = total + res.value.scale(scale)
    return total


# ---------------------------------------------------------------------------
# Stationary specialization (t = 0, u = 1, no infinity insertions).
# ---------------------------------------------------------------------------


def stationary_specialization(z_vars: tuple[str, ...], d: int,
                              trunc: Truncation) -> FormalSeries:
    """(1/d!^2) <alpha_1^d prod E_0(z_i) alpha_{-1}^d>, the direct formula."""
    ops: list[Operator] = [AlphaOp(1)] * d
    ops.extend(EOp(0, Mono(C1, 0, v)) for v in z_vars)
    ops.extend([AlphaOp(-1)] * d)
    val = vacuum_expectation(ops, trunc)
    return val.scale(Coeff.of(Fraction(1, factorial(d) ** 2)))


def stationary_from_equivariant(z_vars: tuple[str, ...], d: int,
                                trunc: Truncation,
                                u_budget: int = None) -> FormalSeries:
    """The t -> 0, u = 1 limit of the operator-route G_d(z, u, t).

    Coefficients must be regular at t = 0; after the limit each z-monomial
    carries a single u-exponent (fixed by dimension), so u = 1 is exact.
    """
    n = len(z_vars)
    hi = 3 * max((o for name, o in trunc.z_orders if name in z_vars),
                 default=0) if u_budget is None else u_budget
    # disconnected pieces stack one u^{-2} per component (up to n + d + 1)
    wide = Truncation(trunc.q_max, -2 * (d + n + 1), max(hi, 0) + 1,
                      trunc.z_orders, trunc.energy_cap)
    g = g_operator(z_vars, (), d, wide)
    try:
        g0 = g.at_t_zero()
    except PoleAtTZero as exc:
        raise AssertionError(
            f"equivariant route not regular at t=0: {exc}") from exc
    return g0.collapse_u(require_single=True).restrict(
        Truncation(trunc.q_max, 0, 0, trunc.z_orders, trunc.energy_cap))
