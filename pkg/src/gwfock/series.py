"""Sparse truncated formal series in q, u and a finite set of z-type variables.

A series carries its own truncation window: q-degrees in [0, q_max], a
u-exponent window [u_lo, u_hi], and an upper order per z-variable.  Negative
z-exponents are allowed and tracked dynamically (finitely many per value);
there is no global z floor.  Arithmetic is exact inside the window and drops
everything outside it; mixed-truncation arithmetic narrows to the
intersection so precision loss is always explicit.

Coefficients are `rationals.Coeff` values (rational functions of t).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache

from .rationals import Coeff, ONE as C1, ZERO as C0


@dataclass(frozen=True)
class Truncation:
    """Retention window for FormalSeries values.

    z_orders maps each active formal variable to its maximal retained
    exponent; the variable tuple is ordered and is part of compatibility.
    energy_cap bounds Fock-state energies where an operator pipeline cannot
    infer a tighter bound on its own.
    """

    q_max: int
    u_lo: int
    u_hi: int
    z_orders: tuple[tuple[str, int], ...] = ()
    energy_cap: Fraction | None = None

    def __post_init__(self):
        if self.q_max < 0:
            raise ValueError("q_max must be >= 0")
        if self.u_lo > self.u_hi:
            raise ValueError("u window is empty")
        names = [n for n, _ in self.z_orders]
        if len(set(names)) != len(names):
            raise ValueError("duplicate z variable")
        for n, o in self.z_orders:
            if o < 0:
                raise ValueError(f"z order for {n} must be >= 0")
        if self.energy_cap is not None and self.energy_cap < self.q_max:
            raise ValueError("energy_cap must be >= q_max")

    @cached_property
    def names(self) -> tuple[str, ...]:
        return ("q", "u") + tuple(n for n, _ in self.z_orders)

    @cached_property
    def _zcaps(self) -> tuple[int, ...]:
        return tuple(o for _, o in self.z_orders)

    @cached_property
    def index(self) -> dict:
        return {n: i for i, n in enumerate(self.names)}

    def z_order(self, name: str) -> int:
        return self._zcaps[self.index[name] - 2]

    def arity(self) -> int:
        return 2 + len(self.z_orders)

    def meet(self, other: "Truncation") -> "Truncation":
        if self is other:
            return self
        if [n for n, _ in self.z_orders] != [n for n, _ in other.z_orders]:
            raise ValueError(
                f"incompatible variable sets: {self.names} vs {other.names}")
        cap = self.energy_cap
        if other.energy_cap is not None:
            cap = other.energy_cap if cap is None else min(cap, other.energy_cap)
        return Truncation(
            min(self.q_max, other.q_max),
            max(self.u_lo, other.u_lo),
            min(self.u_hi, other.u_hi),
            tuple((n, min(a, b)) for (n, a), (_, b) in
                  zip(self.z_orders, other.z_orders)),
            cap,
        )

    def widen_u(self, lo_extra: int = 0, hi_extra: int = 0) -> "Truncation":
        return Truncation(self.q_max, self.u_lo - lo_extra,
                          self.u_hi + hi_extra, self.z_orders, self.energy_cap)

    def with_vars(self, z_orders: tuple[tuple[str, int], ...]) -> "Truncation":
        return Truncation(self.q_max, self.u_lo, self.u_hi, z_orders,
                          self.energy_cap)

    def admits(self, key: tuple) -> bool:
        if key[0] < 0 or key[0] > self.q_max:
            return False
        if key[1] < self.u_lo or key[1] > self.u_hi:
            return False
        for e, cap in zip(key[2:], self._zcaps):
            if e > cap:
                return False
        return True


class FormalSeries:
    """Sparse exact series over Coeff with an attached truncation."""

    __slots__ = ("trunc", "terms")

    def __init__(self, trunc: Truncation, terms: dict | None = None,
                 _checked: bool = False):
        self.trunc = trunc
        if terms is None:
            terms = {}
        elif not _checked:
            terms = {k: Coeff.of(v) for k, v in terms.items()
                     if trunc.admits(k) and Coeff.of(v)}
        self.terms = terms

    # -- constructors ---------------------------------------------------

    @staticmethod
    def zero(trunc: Truncation) -> "FormalSeries":
        return FormalSeries(trunc, {}, _checked=True)

    @staticmethod
    def const(trunc: Truncation, c) -> "FormalSeries":
        c = Coeff.of(c)
        key = (0,) * trunc.arity()
        if not c or not trunc.admits(key):
            return FormalSeries.zero(trunc)
        return FormalSeries(trunc, {key: c}, _checked=True)

    @staticmethod
    def one(trunc: Truncation) -> "FormalSeries":
        return FormalSeries.const(trunc, C1)

    @staticmethod
    def monomial(trunc: Truncation, c, q: int = 0, u: int = 0,
                 **z: int) -> "FormalSeries":
        c = Coeff.of(c)
        key = [0] * trunc.arity()
        key[0] = q
        key[1] = u
        for name, e in z.items():
            key[trunc.index[name]] = e
        key = tuple(key)
        if not c or not trunc.admits(key):
            return FormalSeries.zero(trunc)
        return FormalSeries(trunc, {key: c}, _checked=True)

    # -- ring operations -------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __add__(self, other) -> "FormalSeries":
        if not isinstance(other, FormalSeries):
            other = FormalSeries.const(self.trunc, other)
        tr = self.trunc.meet(other.trunc)
        narrowed = tr is not self.trunc or tr is not other.trunc
        out = dict(self.terms)
        for k, c in other.terms.items():
            s = out.get(k)
            s = c if s is None else s + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        if narrowed:
            out = {k: c for k, c in out.items() if tr.admits(k)}
        return FormalSeries(tr, out, _checked=True)

    __radd__ = __add__

    def __neg__(self) -> "FormalSeries":
        return FormalSeries(self.trunc, {k: -c for k, c in self.terms.items()},
                            _checked=True)

    def __sub__(self, other) -> "FormalSeries":
        if not isinstance(other, FormalSeries):
            other = FormalSeries.const(self.trunc, other)
        return self + (-other)

    def __rsub__(self, other) -> "FormalSeries":
        return (-self) + FormalSeries.const(self.trunc, other)

    def __mul__(self, other) -> "FormalSeries":
        if not isinstance(other, FormalSeries):
            return self.scale(other)
        tr = self.trunc.meet(other.trunc)
        qm, ulo, uhi = tr.q_max, tr.u_lo, tr.u_hi
        zcaps = tr._zcaps
        a, b = self.terms, other.terms
        if not a or not b:
            return FormalSeries.zero(tr)
        if len(a) > len(b):
            a, b = b, a
        out: dict = {}
        bitems = list(b.items())
        for ka, ca in a.items():
            for kb, cb in bitems:
                kq = ka[0] + kb[0]
                if kq > qm:
                    continue
                ku = ka[1] + kb[1]
                if ku > uhi or ku < ulo:
                    continue
                kz = tuple(x + y for x, y in zip(ka[2:], kb[2:]))
                ok = True
                for e, cap in zip(kz, zcaps):
                    if e > cap:
                        ok = False
                        break
                if not ok:
                    continue
                key = (kq, ku) + kz
                c = ca * cb
                s = out.get(key)
                s = c if s is None else s + c
                if s:
                    out[key] = s
                else:
                    del out[key]
        return FormalSeries(tr, out, _checked=True)

    def scale(self, c) -> "FormalSeries":
        c = Coeff.of(c)
        if not c:
            return FormalSeries.zero(self.trunc)
        return FormalSeries(self.trunc,
                            {k: v * c for k, v in self.terms.items()},
                            _checked=True)

    __rmul__ = __mul__

    def __truediv__(self, c) -> "FormalSeries":
        return self.scale(C1 / Coeff.of(c))

    def __pow__(self, n: int) -> "FormalSeries":
        if n < 0:
            raise ValueError("use inverse_unit for negative powers")
        out = FormalSeries.one(self.trunc)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, FormalSeries):
            return NotImplemented
        return self.trunc == other.trunc and self.terms == other.terms

    def __hash__(self):
        return hash((self.trunc, frozenset(self.terms.items())))

    # -- window management ------------------------------------------------

    def restrict(self, trunc: Truncation) -> "FormalSeries":
        """Drop terms outside the (possibly narrower) window."""
        return FormalSeries(
            trunc, {k: c for k, c in self.terms.items() if trunc.admits(k)},
            _checked=True)

    def embed(self, trunc: Truncation) -> "FormalSeries":
        """Re-key into a truncation with a superset of variables."""
        pos = [trunc.index[n] for n in self.trunc.names]
        ar = trunc.arity()
        out = {}
        for k, c in self.terms.items():
            key = [0] * ar
            for p, e in zip(pos, k):
                key[p] = e
            key = tuple(key)
            if trunc.admits(key):
                out[key] = c
        return FormalSeries(trunc, out, _checked=True)

    # -- extraction -------------------------------------------------------

    def coeff(self, q: int = 0, u: int = 0, **z: int) -> Coeff:
        key = [0] * self.trunc.arity()
        key[0] = q
        key[1] = u
        for name, e in z.items():
            key[self.trunc.index[name]] = e
        return self.terms.get(tuple(key), C0)

    def coeff_of_var(self, name: str, e: int) -> "FormalSeries":
        """The coefficient series of name**e (variable slot zeroed out)."""
        i = self.trunc.index[name]
        out = {}
        for k, c in self.terms.items():
            if k[i] == e:
                out[k[:i] + (0,) + k[i + 1:]] = c
        return FormalSeries(self.trunc, out, _checked=True)

    def coeff_of_u(self, e: int) -> "FormalSeries":
        out = {}
        for k, c in self.terms.items():
            if k[1] == e:
                out[k[:1] + (0,) + k[2:]] = c
        return FormalSeries(self.trunc, out, _checked=True)

    def coeff_of_q(self, d: int) -> "FormalSeries":
        out = {}
        for k, c in self.terms.items():
            if k[0] == d:
                out[(0,) + k[1:]] = c
        return FormalSeries(self.trunc, out, _checked=True)

    def u_exponents(self) -> set[int]:
        return {k[1] for k in self.terms}

    def shift_u(self, k: int, trunc: Truncation | None = None
                ) -> "FormalSeries":
        """Multiply by u**k by re-keying exponents (window from trunc)."""
        tr = trunc if trunc is not None else self.trunc
        out = {}
        for key, c in self.terms.items():
            key2 = key[:1] + (key[1] + k,) + key[2:]
            if tr.admits(key2):
                out[key2] = c
        return FormalSeries(tr, out, _checked=True)

    def min_u_exponent(self, default: int = 0) -> int:
        if not self.terms:
            return default
        return min(k[1] for k in self.terms)

    def min_degree(self, names: tuple[str, ...], default: int = 0) -> int:
        if not self.terms:
            return default
        idx = [self.trunc.index[n] for n in names]
        return min(sum(k[i] for i in idx) for k in self.terms)

    # -- coefficient maps ---------------------------------------------------

    def map_coeff(self, fn) -> "FormalSeries":
        out = {}
        for k, c in self.terms.items():
            v = fn(c)
            if v:
                out[k] = v
        return FormalSeries(self.trunc, out, _checked=True)

    def neg_t(self) -> "FormalSeries":
        return self.map_coeff(lambda c: c.neg_t())

    def scale_t_by_exponents(self, u_weight: int = 0, **z_weights: int
                             ) -> "FormalSeries":
        """Multiply each term by t**(u_weight*e_u + sum z_weights*e_z).

        Realizes substitutions like z -> t*z (z_weight 1) and u -> u/t
        (u_weight -1) without changing the monomial grid.
        """
        idx = {self.trunc.index[n]: w for n, w in z_weights.items()}
        out = {}
        for k, c in self.terms.items():
            p = u_weight * k[1] + sum(w * k[i] for i, w in idx.items())
            out[k] = c * Coeff.t_power(p) if p else c
        return FormalSeries(self.trunc, out, _checked=True)

    def at_t_zero(self) -> "FormalSeries":
        return self.map_coeff(lambda c: Coeff.of(c.at_t_zero()))

    def collapse_u(self, require_single: bool = False) -> "FormalSeries":
        """Sum over u-exponents (the substitution u = 1)."""
        out: dict = {}
        seen: dict = {}
        for k, c in self.terms.items():
            key = k[:1] + (0,) + k[2:]
            if require_single:
                prev = seen.get(key)
                if prev is not None and prev != k[1]:
                    raise ValueError(
                        f"multiple u-exponents {prev}, {k[1]} collapse onto {key}")
                seen[key] = k[1]
            s = out.get(key)
            s = c if s is None else s + c
            if s:
                out[key] = s
            else:
                del out[key]
        return FormalSeries(self.trunc, out, _checked=True)

    # -- analytic-style constructions (all exact) ---------------------------

    def exp(self) -> "FormalSeries":
        """exp of a series with no constant term; terminates by truncation."""
        key0 = (0,) * self.trunc.arity()
        if key0 in self.terms:
            raise ValueError("exp requires zero constant term")
        out = FormalSeries.one(self.trunc)
        term = FormalSeries.one(self.trunc)
        j = 1
        while True:
            term = (term * self) / j
            if term.is_zero():
                return out
            out = out + term
            j += 1
            if j > 400:
                raise RuntimeError("exp did not terminate under truncation")

    def log_unit(self) -> "FormalSeries":
        """log of a series with constant term 1."""
        key0 = (0,) * self.trunc.arity()
        if self.terms.get(key0, C0) != C1:
            raise ValueError("log_unit requires constant term 1")
        s = self - 1
        out = FormalSeries.zero(self.trunc)
        term = FormalSeries.one(self.trunc)
        j = 1
        sign = 1
        while True:
            term = term * s
            if term.is_zero():
                return out
            out = out + term.scale(Fraction(sign, j))
            j += 1
            sign = -sign
            if j > 400:
                raise RuntimeError("log did not terminate under truncation")

    def inverse_unit(self) -> "FormalSeries":
        """Inverse of a series whose constant term is a nonzero Coeff."""
        key0 = (0,) * self.trunc.arity()
        c0 = self.terms.get(key0, C0)
        if not c0:
            raise ValueError("inverse_unit requires nonzero constant term")
        rest = (self - FormalSeries.const(self.trunc, c0)).scale(C1 / c0)
        out = FormalSeries.one(self.trunc)
        term = FormalSeries.one(self.trunc)
        j = 0
        while True:
            term = -(term * rest)
            if term.is_zero():
                return out.scale(C1 / c0)
            out = out + term
            j += 1
            if j > 400:
                raise RuntimeError("inverse did not terminate under truncation")

    # -- rendering ---------------------------------------------------------

    def render(self) -> str:
        """Canonical monomial-list rendering, deterministic ordering."""
        if not self.terms:
            return "0"
        names = self.trunc.names
        parts = []
        for k in sorted(self.terms):
            c = self.terms[k]
            monos = []
            for name, e in zip(names, k):
                if e == 0:
                    continue
                monos.append(f"{name}^{e}" if e != 1 else name)
            cs = c.render()
            if monos:
                parts.append(f"({cs}) * " + " ".join(monos))
            else:
                parts.append(f"({cs})")
        return " + ".join(parts)

    __str__ = render

    def __repr__(self):
        return f"FormalSeries({self.render()})"


def series_add(a: FormalSeries, b: FormalSeries) -> FormalSeries:
    """Exact truncated sum (window = intersection)."""
    return a + b


def series_mul(a: FormalSeries, b: FormalSeries) -> FormalSeries:
    """Exact truncated product (window = intersection)."""
    return a * b


# ---------------------------------------------------------------------------
# Univariate coefficient banks for the hyperbolic building blocks.
#
# varsigma(x) = e^{x/2} - e^{-x/2},  sinhc(x) = varsigma(x)/x.
# All are exact rational coefficient tables, extended on demand.
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def varsigma_coeffs(order: int) -> dict[int, Fraction]:
    """Coefficients of varsigma(x) = e^{x/2} - e^{-x/2} through x**order."""
    out = {}
    for m in range(1, order + 1, 2):
        f = Fraction(1)
        for i in range(1, m + 1):
            f /= i
        out[m] = f * Fraction(1, 2 ** (m - 1))
    return out


@lru_cache(maxsize=None)
def sinhc_coeffs(order: int) -> dict[int, Fraction]:
    """Coefficients of sinhc(x) = varsigma(x)/x through x**order."""
    return {m - 1: c for m, c in varsigma_coeffs(order + 1).items()}


def _list_inverse(c: dict[int, Fraction], order: int) -> dict[int, Fraction]:
    # inverse of a power series with c[0] == 1
    out = {0: Fraction(1)}
    for n in range(1, order + 1):
        s = Fraction(0)
        for k in range(1, n + 1):
            ck = c.get(k)
            if ck:
                s += ck * out.get(n - k, Fraction(0))
        out[n] = -s
    return {k: v for k, v in out.items() if v}


def _list_log(c: dict[int, Fraction], order: int) -> dict[int, Fraction]:
    # log of a power series with c[0] == 1, via  (log f)' = f'/f
    inv = _list_inverse(c, order)
    deriv = {k - 1: k * v for k, v in c.items() if k >= 1}
    prod: dict[int, Fraction] = {}
    for i, a in deriv.items():
        for j, b in inv.items():
            if i + j <= order - 1:
                prod[i + j] = prod.get(i + j, Fraction(0)) + a * b
    return {k + 1: v / (k + 1) for k, v in prod.items() if v}


@lru_cache(maxsize=None)
def sinhc_inv_coeffs(order: int) -> dict[int, Fraction]:
    """Coefficients of 1/sinhc(x) through x**order."""
    return _list_inverse(sinhc_coeffs(order), order)


@lru_cache(maxsize=None)
def log_sinhc_coeffs(order: int) -> dict[int, Fraction]:
    """Coefficients of log sinhc(x) through x**order."""
    return _list_log(sinhc_coeffs(order), order)


def exp_coeffs(h: Fraction, order: int) -> dict[int, Fraction]:
    """Coefficients of e^{h x} through x**order."""
    out = {0: Fraction(1)}
    cur = Fraction(1)
    for m in range(1, order + 1):
        cur = cur * h / m
        if cur:
            out[m] = cur
    return out


def compose(coeffs: dict[int, Fraction], s: FormalSeries) -> FormalSeries:
    """Sum coeffs[j] * s**j for a series s with zero constant term."""
    key0 = (0,) * s.trunc.arity()
    if key0 in s.terms:
        raise ValueError("composition argument must have zero constant term")
    if not coeffs:
        return FormalSeries.zero(s.trunc)
    jmax = max(coeffs)
    out = FormalSeries.const(s.trunc, coeffs.get(0, Fraction(0)))
    power = FormalSeries.one(s.trunc)
    for j in range(1, jmax + 1):
        power = power * s
        if power.is_zero():
            break
        c = coeffs.get(j)
        if c:
            out = out + power.scale(c)
    return out


# ---------------------------------------------------------------------------
# Spec-surface operations of the exact-algebra module.
# ---------------------------------------------------------------------------


def _single_var_trunc(var: str, order: int) -> Truncation:
    return Truncation(0, 0, 0, ((var, order),))


def varsigma_series(var: str, order: int,
                    trunc: Truncation | None = None) -> FormalSeries:
    """varsigma(z) = e^{z/2} - e^{-z/2} = z + z^3/24 + ... to the given order."""
    if order < 1:
        raise ValueError("order must be >= 1")
    tr = trunc if trunc is not None else _single_var_trunc(var, order)
    terms = {}
    for m, c in varsigma_coeffs(min(order, tr.z_order(var))).items():
        terms[_keyed(tr, var, m)] = Coeff.of(c)
    return FormalSeries(tr, terms, _checked=True)


def varsigma_reciprocal_series(var: str, order: int,
                               trunc: Truncation | None = None) -> FormalSeries:
    """1/varsigma(z) = z^-1 - z/24 + 7 z^3/5760 - ... as a Laurent series."""
    if order < 1:
        raise ValueError("order must be >= 1")
    tr = trunc if trunc is not None else _single_var_trunc(var, order)
    terms = {}
    for m, c in sinhc_inv_coeffs(order + 1).items():
        e = m - 1
        if e <= tr.z_order(var):
            terms[_keyed(tr, var, e)] = Coeff.of(c)
    return FormalSeries(tr, terms, _checked=True)


def _keyed(tr: Truncation, var: str, e: int) -> tuple:
    key = [0] * tr.arity()
    key[tr.index[var]] = e
    return tuple(key)


def s_power(var: str, exponent, order: int,
            trunc: Truncation | None = None) -> FormalSeries:
    """sinhc(z)**a = exp(a log sinhc(z)) for a scalar or series exponent a."""
    tr = trunc if trunc is not None else _single_var_trunc(var, order)
    logs = compose(log_sinhc_coeffs(min(order, tr.z_order(var)) + 1),
                   FormalSeries.monomial(tr, C1, **{var: 1}))
    if isinstance(exponent, FormalSeries):
        a = exponent.embed(tr) if exponent.trunc is not tr else exponent
    else:
        a = FormalSeries.const(tr, exponent)
    return (a * logs).exp()


def pochhammer(a, k: int):
    """(a+1)_k = (a+1)(a+2)...(a+k) for k >= 0, else 1/(a (a-1)...(a+k+1)).

    a may be a Coeff-like scalar or a FormalSeries; the result follows the
    argument type.  Division by an identically zero factor raises.
    """
    if isinstance(a, FormalSeries):
        one = FormalSeries.one(a.trunc)
        if k >= 0:
            prod = one
            for j in range(1, k + 1):
                prod = prod * (a + j)
            return prod
        prod = one
        for j in range(0, -k):
            prod = prod * (a - j)
        if prod.is_zero():
            raise ZeroDivisionError("pochhammer hit an identically zero factor")
        return _inverse_possibly_laurent(prod)
    a = Coeff.of(a)
    if k >= 0:
        out = C1
        for j in range(1, k + 1):
            out = out * (a + j)
        return out
    out = C1
    for j in range(0, -k):
        f = a - j
        if not f:
            raise ZeroDivisionError("pochhammer hit a zero factor")
        out = out * f
    return C1 / out


def pochhammer_product(a, k: int):
    """The product form a(a-1)...(a+k+1) (reciprocal of (a+1)_k for k<0)."""
    if k >= 0:
        raise ValueError("only defined for k < 0")
    if isinstance(a, FormalSeries):
        prod = FormalSeries.one(a.trunc)
        for j in range(0, -k):
            prod = prod * (a - j)
        return prod
    a = Coeff.of(a)
    out = C1
    for j in range(0, -k):
        out = out * (a - j)
    return out


def _inverse_possibly_laurent(s: FormalSeries) -> FormalSeries:
    """Invert a series of the form monomial * unit (single minimal monomial)."""
    key0 = (0,) * s.trunc.arity()
    if s.terms.get(key0, C0):
        return s.inverse_unit()
    if not s.terms:
        raise ZeroDivisionError("cannot invert zero series")
    # require a componentwise-minimal monomial; dividing it out leaves a unit
    kmin = tuple(min(k[i] for k in s.terms) for i in range(s.trunc.arity()))
    if kmin not in s.terms:
        raise ValueError("series has no invertible leading monomial")
    tr = s.trunc
    tr_wide = Truncation(
        tr.q_max - kmin[0],
        tr.u_lo - kmin[1], tr.u_hi - kmin[1],
        tuple((n, o - e) for (n, o), e in zip(tr.z_orders, kmin[2:])),
        tr.energy_cap)
    unit = FormalSeries(
        tr_wide,
        {tuple(e - m for e, m in zip(k, kmin)): v for k, v in s.terms.items()},
        _checked=True)
    inv = unit.inverse_unit()
    out = {}
    for k, v in inv.terms.items():
        key = tuple(e - m for e, m in zip(k, kmin))
        if tr.admits(key):
            out[key] = v
    return FormalSeries(tr, out, _checked=True)


def hypergeometric_series(nu, mu, arg: FormalSeries, order: int
                          ) -> FormalSeries:
    """Degenerate Gauss series: sum_k nu(nu-1)...(nu-k+1)/((mu+1)...(mu+k)) (-arg)^k.

    The argument must have strictly positive valuation so term k has order
    at least k and the truncated sum is finite.
    """
    tr = arg.trunc
    key0 = (0,) * tr.arity()
    if key0 in arg.terms:
        raise ValueError("argument must have positive valuation")
    one = FormalSeries.one(tr)
    if not isinstance(nu, FormalSeries):
        nu = FormalSeries.const(tr, nu)
    if not isinstance(mu, FormalSeries):
        mu = FormalSeries.const(tr, mu)
    out = one
    num = one
    neg_arg_pow = one
    for k in range(1, order + 1):
        neg_arg_pow = neg_arg_pow * (-arg)
        if neg_arg_pow.is_zero():
            break
        num = num * (nu - (k - 1))
        den = FormalSeries.one(tr)
        for j in range(1, k + 1):
            den = den * (mu + j)
        term = num * neg_arg_pow * _inverse_possibly_laurent(den)
        out = out + term
    return out
