"""Hodge-integral operators and Hurwitz generating functions.

The central object is the one-parameter operator family

    A(a, b) = sinhc(b)^a * sum_k  vs(b)^k / (a+1)_k  E_k(b),

acting on the wedge space with b a monomial (u*z, u*m, (u/t)*m) and a either
a scalar multiple of the same z-variable or a nonnegative integer.  Vacuum
expectations of products of these operators produce the n-point functions of
lambda-linear Hodge integrals; evaluating at integers ties them to Hurwitz
numbers through the ELSV bridge, for which an independent brute-force
factorization counter is provided as an oracle.
"""

from __future__ import annotations

import itertools
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
from .rationals import Coeff, ONE as C1
from .series import (
    FormalSeries,
    Truncation,
    log_sinhc_coeffs,
)
from .fock import (
    INF,
    AlphaOp,
    BasisState,
    ExpOp,
    FockVector,
    DiagExpOp,
    DiagPowOp,
    Mono,
    Operator,
    e0_diagonal_weight,
    e_offdiagonal_moves,
    exp_phase,
    _prune_insert,
    f2_op,
    matrix_element,
    vacuum_expectation,
    working_truncation,
)


class AFamilyOp(Operator):
    """The operator A(a, b) (or its adjoint) on the truncated wedge space."""

    def __init__(self, a_scale, a_var: str | None, a_int: int | None,
                 bmon: Mono, adjoint: bool = False, name: str = ""):
        if (a_var is None) == (a_int is None):
            raise ValueError("exactly one of a_var / a_int must be given")
        if a_int is not None and a_int < 0:
            raise ValueError(
                "negative integer first argument hits a pochhammer pole")
        self.a_scale = Coeff.of(a_scale) if a_var is not None else None
        self.a_var = a_var
        self.a_int = a_int
        self.bmon = bmon
        self.adj = adjoint
        self.name = name or self._default_name()
        self.exp_prune = "u_allowance" if adjoint else "none"
        self._base_cache: dict = {}
        self._prefactor_cache: dict = {}

    def _default_name(self):
        a = f"{self.a_scale}*{self.a_var}" if self.a_var else str(self.a_int)
        star = "*" if self.adj else ""
        return f"A({a},{_b_name(self.bmon)}){star}"

    def adjoint(self) -> "AFamilyOp":
        return AFamilyOp(self.a_scale if self.a_var else None, self.a_var,
                         self.a_int, self.bmon, not self.adj)

    # -- window bookkeeping -------------------------------------------------

    def _budget_pos(self, trunc: Truncation) -> int:
        if self.bmon.var is not None:
            return trunc.z_order(self.bmon.var)
        return max(trunc.u_hi - min(trunc.u_lo, 0), 0)

    def max_lower2(self, trunc: Truncation):
        if self.adj:
            return INF  # lowering terms carry Laurent weights, state-bounded
        if self.a_int is not None:
            return 2 * self._budget_pos(trunc)
        return 2 * self._budget_pos(trunc)

    def neg_u_cap(self, trunc: Truncation) -> int:
        # raising by r costs at most r+1 in u-valuation (plus the diagonal
        # constant); raises are bounded by the z/u budget and the state cap
        cap = self._budget_pos(trunc) + 2
        if self.a_int is not None:
            cap = min(cap, self.a_int + 2)
        if trunc.energy_cap is not None:
            cap = min(cap, int(trunc.energy_cap) + 2)
        return cap * max(self.bmon.u_exp, 1)

    def pos_u_cap(self, trunc: Truncation) -> int:
        if self.bmon.var is not None:
            return trunc.z_order(self.bmon.var) * max(self.bmon.u_exp, 0)
        return max(trunc.u_hi - min(trunc.u_lo, 0), 0)

    # -- weight assembly ------------------------------------------------------

    def _ext_trunc(self, trunc: Truncation, ext: int, k: int) -> Truncation:
        """Widen the window for assembling the k-th weight.

        Raising weights (k < 0 here, or the diagonal constant) have leading
        monomials below the ambient u-window whose higher corrections still
        land inside it, so u_lo must extend down by |k|*u_exp as well.
        """
        z_orders = trunc.z_orders
        u_hi = trunc.u_hi
        u_lo = trunc.u_lo
        ue = max(self.bmon.u_exp, 0)
        u_lo -= (abs(min(k, 0)) + 1) * ue
        if ext > 0:
            if self.bmon.var is not None:
                z_orders = tuple((n, o + ext if n == self.bmon.var else o)
                                 for n, o in z_orders)
                u_hi += ext * ue
            else:
                u_hi += ext * self.bmon.u_exp
        if u_lo == trunc.u_lo and u_hi == trunc.u_hi and \
                z_orders is trunc.z_orders:
            return trunc
        return Truncation(trunc.q_max, u_lo, u_hi, z_orders,
                          trunc.energy_cap)

    def _prefactor(self, trunc: Truncation) -> FormalSeries:
        got = self._prefactor_cache.get(trunc)
        if got is not None:
            return got
        jmax = self.bmon.jmax(trunc)
        logs = self.bmon.inject(log_sinhc_coeffs(jmax + 1), trunc)
        if self.a_var is not None:
            a = FormalSeries.monomial(trunc, self.a_scale,
                                      **{self.a_var: 1})
            pref = (a * logs).exp()
        else:
            pref = logs.scale(self.a_int).exp()
        self._prefactor_cache[trunc] = pref
        return pref

    def _a_series(self, trunc: Truncation) -> FormalSeries:
        return FormalSeries.monomial(trunc, self.a_scale, **{self.a_var: 1})

    def _base(self, k: int, trunc: Truncation) -> FormalSeries:
        """prefactor * vs(b)^k / (a+1)_k at a working truncation."""
        got = self._base_cache.get((k, trunc))
        if got is not None:
            return got
        pref = self._prefactor(trunc)
        if k == 0:
            self._base_cache[(k, trunc)] = pref
            return pref
        # vs(b)^k = b^k sinhc(b)^k
        jmax = self.bmon.jmax(trunc)
        sk = self.bmon.inject(log_sinhc_coeffs(jmax + 1), trunc) \
            .scale(k).exp()
        bk = self.bmon.inject({k: Fraction(1)}, trunc)
        if bk.is_zero():
            out = FormalSeries.zero(trunc)
            self._base_cache[(k, trunc)] = out
            return out
        val = pref * sk * bk
        if self.a_int is not None:
            m = self.a_int
            if k > 0:
                den = C1
                for j in range(1, k + 1):
                    den = den * (m + j)
                val = val.scale(C1 / den)
            else:
                num = C1
                for j in range(0, -k):
                    num = num * (m - j)
                val = val.scale(num)
        else:
            a = self._a_series(trunc)
            if k > 0:
                den = FormalSeries.one(trunc)
                for j in range(1, k + 1):
                    den = den * (a + j)
                val = val * den.inverse_unit()
            else:
                num = FormalSeries.one(trunc)
                for j in range(0, -k):
                    num = num * (a - j)
                val = val * num
        self._base_cache[(k, trunc)] = val
        return val

    # -- action ---------------------------------------------------------------

    def apply(self, vec: FockVector, ceil2, trunc: Truncation) -> FockVector:
        out: dict = {}
        budget = self._budget_pos(trunc)
        for s, w in vec.terms.items():
            e2 = s.energy2()
            if self.adj:
                k_lo = -size(s.lam)
                k_hi = budget
                if ceil2 is not INF:
                    k_hi = min(k_hi, (ceil2 - e2) // 2)
            else:
                k_hi = min(size(s.lam), budget)
                if ceil2 is INF:
                    # raising costs u-valuation, so the u-window bounds it
                    if self.a_int is not None:
                        k_lo = -self.a_int
                    elif self.bmon.var is not None:
                        k_lo = -(trunc.z_order(self.bmon.var)
                                 - min(trunc.u_lo, 0) + 2)
                    else:
                        raise RuntimeError(
                            f"{self.name}: raising side needs a finite ceiling")
                else:
                    k_lo = -((ceil2 - e2) // 2)
                    if self.a_int is not None:
                        k_lo = max(k_lo, -self.a_int)
            for k in range(k_lo, k_hi + 1):
                if self.a_int is not None and k < -self.a_int:
                    continue
                r = -k if self.adj else k
                ext = 1 if k == 0 else max(0, -(k + 1))
                etr = self._ext_trunc(trunc, ext, k)
                base = self._base(k, etr)
                if base.is_zero():
                    continue
                if k == 0:
                    wt = base * e0_diagonal_weight(s, self.bmon, etr)
                    _prune_insert(out, s, (w * wt.restrict(trunc)), ceil2)
                    continue
                if r > 0 and size(s.lam) < r:
                    continue
                for s2, height, h in e_offdiagonal_moves(s, r):
                    if ceil2 is not INF and s2.energy2() > ceil2:
                        continue
                    wt = base * exp_phase(h, self.bmon, etr)
                    wt = wt.restrict(trunc)
                    w2 = w * wt
                    if height % 2:
                        w2 = -w2
                    _prune_insert(out, s2, w2, ceil2)
        return FockVector(vec.trunc, out)


def _b_name(m: Mono) -> str:
    parts = []
    if m.scale != C1:
        parts.append(str(m.scale))
    if m.u_exp:
        parts.append("u" if m.u_exp == 1 else f"u^{m.u_exp}")
    if m.var:
        parts.append(m.var)
    return "*".join(parts) or "1"


def build_A(a, b: Mono, a_var: str | None = None,
            adjoint: bool = False) -> AFamilyOp:
    """Construct A(a, b) with a = scalar*a_var (symbolic) or an integer."""
    if a_var is None:
        return AFamilyOp(None, None, int(a), b, adjoint)
    return AFamilyOp(a, a_var, None, b, adjoint)


def a_symbolic(var: str, a_scale=C1, u_exp: int = 1,
               adjoint: bool = False) -> AFamilyOp:
    """A(a_scale*var, u^{u_exp}*var) (the paper-facing symbolic family)."""
    return build_A(a_scale, Mono(C1, u_exp, var), a_var=var, adjoint=adjoint)


def a_integer(m: int, b_scale=None, u_exp: int = 1) -> AFamilyOp:
    """A(m, b_scale*u^{u_exp}) with b_scale defaulting to m."""
    scale = Coeff.of(m) if b_scale is None else Coeff.of(b_scale)
    return build_A(m, Mono(scale, u_exp, None))


# ---------------------------------------------------------------------------
# Hodge n-point functions.
# ---------------------------------------------------------------------------


@dataclass
class HodgeFunctionRequest:
    variables: list  # symbolic names (str) or positive integers
    connected: bool = False
    trunc: Truncation = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        for v in self.variables:
            if isinstance(v, int) and v < 1:
                raise ValueError("integer arguments must be >= 1")


def hodge_npoint(req: HodgeFunctionRequest) -> FormalSeries:
    """The n-point function of lambda-linear Hodge integrals.

    Disconnected by default: u^{-n} <A(z_1,u z_1) ... A(z_n,u z_n)>.
    The connected version subtracts the set-partition products.
    """
    names = list(req.variables)
    if not all(isinstance(v, str) for v in names):
        raise ValueError("hodge_npoint expects symbolic variables")
    if not req.connected:
        return _hodge_disconnected(tuple(names), req.trunc)
    family = {}
    for rsub in _nonempty_subsets(tuple(names)):
        family[rsub] = _hodge_disconnected(rsub, req.trunc)
    return connected_disconnected_transform(family, "to_connected")[
        tuple(names)]


def _hodge_disconnected(names: tuple[str, ...],
                        trunc: Truncation) -> FormalSeries:
    if not names:
        return FormalSeries.one(trunc)
    ops = [a_symbolic(v) for v in names]
    return vacuum_expectation(ops, trunc, post_u_shift=-len(names))


def _nonempty_subsets(names):
    out = []
    for r in range(1, len(names) + 1):
        out.extend(itertools.combinations(names, r))
    return out


def _set_partitions(items: tuple):
    """All partitions of a set, as tuples of tuples."""
    items = list(items)
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(tuple(rest)):
        # put first in its own block
        yield ((first,),) + part
        # or into an existing block
        for i in range(len(part)):
            yield part[:i] + ((first,) + part[i],) + part[i + 1:]


def connected_disconnected_transform(family: dict, direction: str) -> dict:
    """Convert an n-point family between connected and disconnected forms.

    family maps variable subsets (tuples) to series; all sub-subsets of every
    key must be present.  The 0-point conventions are H() = 1 (disconnected)
    and H_conn() = 0, so the sums below run over set partitions alone.
    """
    if direction == "to_connected":
        conn: dict = {}
        for key in sorted(family, key=len):
            total = FormalSeries.zero(family[key].trunc)
            for part in _set_partitions(key):
                if len(part) == 1:
                    continue
                prod = FormalSeries.one(family[key].trunc)
                for block in part:
                    prod = prod * conn[_canon(key, block)]
                total = total + prod
            conn[key] = family[key] - total
        return conn
    if direction == "to_disconnected":
        out = {}
        for key in family:
            total = FormalSeries.zero(family[key].trunc)
            for part in _set_partitions(key):
                prod = FormalSeries.one(family[key].trunc)
                for block in part:
                    prod = prod * family[_canon(key, block)]
                total = total + prod
            out[key] = total
        return out
    raise ValueError("direction must be to_connected or to_disconnected")


def _canon(key, block):
    return tuple(v for v in key if v in block)


# ---------------------------------------------------------------------------
# Hurwitz numbers: three routes.
# ---------------------------------------------------------------------------


def branch_count(g: int, mu: PartitionT) -> int:
    """b = 2g + |mu| + l(mu) - 2, the number of simple branch points."""
    return 2 * g + size(mu) + len(mu) - 2


def hurwitz_character(g: int, mu) -> Fraction:
    """C_g(mu) = <e^{alpha_1} F2^b prod alpha_{-mu_i}> / z(mu).

    Returns 0 when b < 0 (no covers).
    """
    mu = check_partition(mu) if mu else ()
    b = branch_count(g, mu)
    if b < 0:
        return Fraction(0)
    tr = Truncation(0, 0, 0, ())
    ops: list[Operator] = [ExpOp(AlphaOp(1)),
                           DiagPowOp(lambda s: f2_eigenvalue(s.lam), b, "F2^b",
                                     charge_zero_only=True)]
    ops.extend(AlphaOp(-m) for m in mu)
    val = vacuum_expectation(ops, tr)
    return val.coeff().as_fraction() / z_mu(mu)


def hurwitz_oracle(g: int, mu) -> Fraction:
    """Brute-force count of transposition factorizations in S_n.

    (1/n!) * #{(sigma, tau_1..tau_b): sigma of cycle type mu, tau_i
    transpositions, tau_b...tau_1 sigma = id}, with b read off from (g, mu).
    Counting is done by convolving the class indicator with the transposition
    sum b times, which enumerates exactly the same tuples.
    """
    mu = check_partition(mu) if mu else ()
    n = size(mu)
    b = branch_count(g, mu)
    if b < 0:
        return Fraction(0)
    if n > 6 or b > 8:
        raise ValueError("oracle bounds exceeded (|mu| <= 6, b <= 8)")
    if n == 0:
        return Fraction(1) if b == 0 else Fraction(0)
    perms = list(itertools.permutations(range(n)))
    index = {p: i for i, p in enumerate(perms)}
    transpositions = []
    for i in range(n):
        for j in range(i + 1, n):
            tau = list(range(n))
            tau[i], tau[j] = j, i
            transpositions.append(tuple(tau))

    def cycle_type(p):
        seen = [False] * n
        lens = []
        for i in range(n):
            if seen[i]:
                continue
            ln = 0
            j = i
            while not seen[j]:
                seen[j] = True
                j = p[j]
                ln += 1
            lens.append(ln)
        return tuple(sorted(lens, reverse=True))

    vec = [0] * len(perms)
    for p in perms:
        if cycle_type(p) == mu:
            vec[index[p]] = 1
    for _ in range(b):
        nxt = [0] * len(perms)
        for i, cnt in enumerate(vec):
            if not cnt:
                continue
            p = perms[i]
            for tau in transpositions:
                comp = tuple(tau[p[x]] for x in range(n))  # tau after p
                nxt[index[comp]] += cnt
        vec = nxt
    identity = tuple(range(n))
    return Fraction(vec[index[identity]], factorial(n))


def elsv_hodge(g: int, mu) -> Fraction:
    """H_g(mu) recovered from C_g(mu) by inverting the ELSV relation."""
    mu = check_partition(mu) if mu else ()
    b = branch_count(g, mu)
    if b < 0:
        return Fraction(0)
    c = hurwitz_character(g, mu)
    scale = Fraction(z_mu(mu), factorial(b))
    for m in mu:
        scale *= Fraction(factorial(m), m ** m)
    return scale * c


def hodge_value_series(mu, trunc: Truncation) -> FormalSeries:
    """H(mu, u) = u^{-l} <prod A(mu_i, u mu_i)>: the operator route."""
    mu = check_partition(mu) if mu else ()
    ops = [a_integer(m) for m in mu]
    return vacuum_expectation(ops, trunc, post_u_shift=-len(mu))


def hodge_value_series_from_characters(mu, trunc: Truncation) -> FormalSeries:
    """H(mu, u) via the character/ELSV route, as a u-Laurent series."""
    mu = check_partition(mu) if mu else ()
    out = FormalSeries.zero(trunc)
    for e in range(trunc.u_lo, trunc.u_hi + 1):
        # H(mu, u) = sum_g u^{2g-2} H_g(mu); g may be negative (disconnected)
        if (e + 2) % 2:
            continue
        g = (e + 2) // 2
        if branch_count(g, mu) < 0:
            continue
        hg = elsv_hodge(g, mu)
        if hg:
            out = out + FormalSeries.monomial(trunc, Coeff.of(hg), u=e)
    return out


# ---------------------------------------------------------------------------
# Closed form for the connected 2-point function.
# ---------------------------------------------------------------------------


def two_point_closed_form(trunc: Truncation, z1: str = "z1",
                          z2: str = "z2") -> FormalSeries:
    """H_conn(z1, z2, u) by the terminating k-sum

    sinhc(u z1)^{z1} sinhc(u z2)^{z2} / vs(u(z1+z2)) *
        sum_{k>0} vs(k u(z1+z2)) vs(u z1)^k vs(u z2)^{-k}
                  / ((1+z1)_k (1+z2)_{-k}),

    expanded with z1 innermost (ascending z1, Laurent in z2).
    """
    o1, o2 = trunc.z_order(z1), trunc.z_order(z2)
    # intermediate positive z2-powers reach o1+o2 before the Laurent factors
    # (vs(u z2)^{-k} and the 1/(z1+z2) expansion) bring them back down
    work = Truncation(trunc.q_max, trunc.u_lo - o1 - 6,
                      trunc.u_hi + 2 * (o1 + o2) + 6,
                      tuple((n, o + 2 if n == z1 else
                             (o1 + o + 2 if n == z2 else o))
                            for n, o in trunc.z_orders),
                      trunc.energy_cap)
    m1 = Mono(C1, 1, z1)
    m2 = Mono(C1, 1, z2)
    jm = max(m1.jmax(work), m2.jmax(work)) + 2

    def sinhc_pow(mono, k):
        return mono.inject(log_sinhc_coeffs(jm), work).scale(k).exp()

    pref1 = (FormalSeries.monomial(work, C1, **{z1: 1})
             * m1.inject(log_sinhc_coeffs(jm), work)).exp()
    pref2 = (FormalSeries.monomial(work, C1, **{z2: 1})
             * m2.inject(log_sinhc_coeffs(jm), work)).exp()
    # 1/vs(u(z1+z2)) = u^{-1} * geom(1/(z1+z2), |z1|<|z2|) * sinhc(u(z1+z2))^{-1}
    lin = (FormalSeries.monomial(work, C1, u=1, **{z1: 1})
           + FormalSeries.monomial(work, C1, u=1, **{z2: 1}))
    from .series import compose, sinhc_inv_coeffs, varsigma_coeffs
    sinv = compose(sinhc_inv_coeffs(2 * jm), lin)
    geo = {}
    for j in range(work.z_order(z1) + 1):
        key = [0] * work.arity()
        key[1] = -1
        key[work.index[z1]] = j
        key[work.index[z2]] = -j - 1
        geo[tuple(key)] = Coeff.of((-1) ** j)
    recip = FormalSeries(work, geo, _checked=True) * sinv
    total = FormalSeries.zero(work)
    a1 = FormalSeries.monomial(work, C1, **{z1: 1})
    a2 = FormalSeries.monomial(work, C1, **{z2: 1})
    for k in range(1, work.z_order(z1) + 2):
        vs_k = compose(varsigma_coeffs(2 * jm), lin.scale(k))
        num = sinhc_pow(m1, k) * m1.inject({k: Fraction(1)}, work)
        den_neg = sinhc_pow(m2, -k) * m2.inject({-k: Fraction(1)}, work)
        poch1 = FormalSeries.one(work)
        for j in range(1, k + 1):
            poch1 = poch1 * (a1 + j)
        poch2 = FormalSeries.one(work)
        for j in range(0, k):
            poch2 = poch2 * (a2 - j)
        # multiply in valuation-balanced order so the u-window never clips
        term = (num * den_neg) * vs_k * poch1.inverse_unit() * poch2
        if term.is_zero():
            break
        total = total + term
    # the u^{-2} normalization comes from H = u^{-n} <A ... A> at n = 2
    return (pref1 * pref2 * recip * total).shift_u(-2, trunc)
