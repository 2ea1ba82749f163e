"""Exact scalars: rational functions of the equivariant parameter t.

Every number in the engine lives in Q(t), held in a canonical reduced form:
a power of t times a polynomial with nonzero constant term, over a monic
denominator with nonzero constant term and no common factor with the
numerator.  The common cases (plain rationals, Laurent polynomials in t)
take fast paths; genuine denominators only appear through explicit division.

There is no floating point anywhere in this module.
"""

from __future__ import annotations

from fractions import Fraction

_F0 = Fraction(0)
_F1 = Fraction(1)

Poly = tuple  # dense coefficient tuple, low degree first, no trailing zeros

_PONE: Poly = (_F1,)


def _trim(cs) -> Poly:
    n = len(cs)
    while n and not cs[n - 1]:
        n -= 1
    return tuple(cs[:n])


def _padd(a: Poly, b: Poly) -> Poly:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] += c
    return _trim(out)


def _pneg(a: Poly) -> Poly:
    return tuple(-c for c in a)


def _pmul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return ()
    out = [_F0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                if cb:
                    out[i + j] += ca * cb
    return _trim(out)


def _pscale(a: Poly, s: Fraction) -> Poly:
    if not s:
        return ()
    return tuple(c * s for c in a)


def _pdivmod(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [_F0] * max(0, len(a) - len(b) + 1)
    r = list(a)
    lb = b[-1]
    while len(r) >= len(b) and _trim(r):
        r = list(_trim(r))
        if len(r) < len(b):
            break
        c = r[-1] / lb
        k = len(r) - len(b)
        q[k] = c
        for i, cb in enumerate(b):
            r[k + i] -= c * cb
        r.pop()
    return _trim(q), _trim(r)


def _pgcd(a: Poly, b: Poly) -> Poly:
    while b:
        _, r = _pdivmod(a, b)
        a, b = b, r
    if not a:
        return ()
    return _pscale(a, 1 / a[-1])  # monic


def _pneg_t(a: Poly) -> Poly:
    return tuple(c if i % 2 == 0 else -c for i, c in enumerate(a))


class PoleAtTZero(ArithmeticError):
    """Raised when a value required to be regular at t = 0 has a pole there."""


class Coeff:
    """A rational function of t: t**off * num(t) / den(t), fully reduced.

    Invariants: num[0] != 0 (unless the value is zero), den[0] != 0,
    den has leading coefficient 1, gcd(num, den) = 1.
    """

    __slots__ = ("off", "num", "den")

    def __init__(self, off: int, num: Poly, den: Poly, _reduced: bool = False):
        if not num:
            off, num, den = 0, (), _PONE
        elif not _reduced:
            off, num, den = _reduce(off, num, den)
        self.off = off
        self.num = num
        self.den = den

    # -- constructors -------------------------------------------------

    @staticmethod
    def of(value) -> "Coeff":
        if isinstance(value, Coeff):
            return value
        f = Fraction(value)
        if not f:
            return ZERO
        if f == 1:
            return ONE
        return Coeff(0, (f,), _PONE, _reduced=True)

    @staticmethod
    def t_power(k: int, scale=1) -> "Coeff":
        s = Fraction(scale)
        if not s:
            return ZERO
        return Coeff(k, (s,), _PONE, _reduced=True)

    @staticmethod
    def from_t_poly(coeffs) -> "Coeff":
        """Coeff from a dense list of t-coefficients, low degree first."""
        return Coeff(0, _trim([Fraction(c) for c in coeffs]), _PONE)

    # -- predicates ----------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.num)

    def is_one(self) -> bool:
        return self.off == 0 and self.num == _PONE and self.den == _PONE

    def is_polynomial(self) -> bool:
        """True when the value lies in Q[t] (no pole at 0 or elsewhere)."""
        return self.den == _PONE and self.off >= 0

    def is_rational(self) -> bool:
        return self.den == _PONE and (self.off == 0 or not self.num)

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other) -> "Coeff":
        other = Coeff.of(other)
        if not self.num:
            return other
        if not other.num:
            return self
        if self.den == _PONE and other.den == _PONE:
            off = min(self.off, other.off)
            a = ((_F0,) * (self.off - off)) + self.num
            b = ((_F0,) * (other.off - off)) + other.num
            s = _padd(a, b)
            if not s:
                return ZERO
            return Coeff(off, s, _PONE)
        # general case: bring to a common denominator
        off = min(self.off, other.off)
        a = _pmul(((_F0,) * (self.off - off)) + self.num, other.den)
        b = _pmul(((_F0,) * (other.off - off)) + other.num, self.den)
        return Coeff(off, _padd(a, b), _pmul(self.den, other.den))

    __radd__ = __add__

    def __neg__(self) -> "Coeff":
        if not self.num:
            return self
        return Coeff(self.off, _pneg(self.num), self.den, _reduced=True)

    def __sub__(self, other) -> "Coeff":
        return self + (-Coeff.of(other))

    def __rsub__(self, other) -> "Coeff":
        return Coeff.of(other) + (-self)

    def __mul__(self, other) -> "Coeff":
        other = Coeff.of(other)
        if not self.num or not other.num:
            return ZERO
        if self.den == _PONE and other.den == _PONE:
            return Coeff(self.off + other.off, _pmul(self.num, other.num),
                         _PONE, _reduced=len(self.num) == 1 or len(other.num) == 1)
        return Coeff(self.off + other.off, _pmul(self.num, other.num),
                     _pmul(self.den, other.den))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Coeff":
        other = Coeff.of(other)
        if not other.num:
            raise ZeroDivisionError("division by zero Coeff")
        if not self.num:
            return ZERO
        return Coeff(self.off - other.off, _pmul(self.num, other.den),
                     _pmul(self.den, other.num))

    def __rtruediv__(self, other) -> "Coeff":
        return Coeff.of(other) / self

    def inv(self) -> "Coeff":
        return ONE / self

    def __pow__(self, k: int) -> "Coeff":
        if k < 0:
            return self.inv() ** (-k)
        out = ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- structure -----------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, Coeff):
            try:
                other = Coeff.of(other)
            except (TypeError, ValueError):
                return NotImplemented
        return (self.off == other.off and self.num == other.num
                and self.den == other.den)

    def __hash__(self):
        return hash((self.off, self.num, self.den))

    def neg_t(self) -> "Coeff":
        """The substitution t -> -t."""
        if not self.num:
            return self
        num = _pneg_t(self.num)
        den = _pneg_t(self.den)
        sign = _F1 if self.off % 2 == 0 else -_F1
        # re-monicize the denominator
        lead = den[-1]
        num = _pscale(num, sign / lead)
        den = _pscale(den, 1 / lead)
        return Coeff(self.off, num, den, _reduced=True)

    def at_t_zero(self) -> Fraction:
        """Value at t = 0; raises PoleAtTZero if not regular there."""
        if not self.num:
            return _F0
        if self.off < 0:
            raise PoleAtTZero(f"pole of order {-self.off} at t = 0 in {self}")
        if self.off > 0:
            return _F0
        return self.num[0] / self.den[0]

    def as_fraction(self) -> Fraction:
        if not self.num:
            return _F0
        if not self.is_rational() or len(self.num) != 1:
            raise ValueError(f"not a pure rational: {self}")
        return self.num[0]

    def t_degree(self) -> int:
        """Degree in t of the numerator part (value must be nonzero)."""
        if not self.num:
            raise ValueError("zero has no t-degree")
        return self.off + len(self.num) - 1

    # -- rendering -------------------------------------------------------

    def render(self) -> str:
        """Canonical text form p(t)/q(t) with integer coefficients."""
        if not self.num:
            return "0"
        from math import gcd, lcm
        cl = lcm(*(c.denominator for c in self.num + self.den))
        ni = [int(c * cl) for c in self.num]
        di = [int(c * cl) for c in self.den]
        g = 0
        for c in ni + di:
            g = gcd(g, c)
        if g > 1:
            ni = [c // g for c in ni]
            di = [c // g for c in di]
        if di[-1] < 0:
            ni = [-c for c in ni]
            di = [-c for c in di]
        num_s = _render_int_poly(ni, max(self.off, 0))
        den_s = _render_int_poly(di, max(-self.off, 0))
        if den_s == "1":
            return num_s
        if "+" in num_s or (num_s.count("-") - num_s.startswith("-")) > 0:
            num_s = f"({num_s})"
        if "+" in den_s or "-" in den_s or "*" in den_s or "^" in den_s:
            den_s = f"({den_s})"
        return f"{num_s}/{den_s}"

    __str__ = render

    def __repr__(self):
        return f"Coeff({self.render()})"


def _render_int_poly(coeffs: list[int], t_shift: int) -> str:
    """Render sum coeffs[i] * t^(i + t_shift), highest degree first."""
    parts = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = coeffs[i]
        if not c:
            continue
        e = i + t_shift
        if e == 0:
            mono = str(abs(c))
        else:
            te = "t" if e == 1 else f"t^{e}"
            mono = te if abs(c) == 1 else f"{abs(c)}*{te}"
        if not parts:
            parts.append(mono if c > 0 else f"-{mono}")
        else:
            parts.append(f" + {mono}" if c > 0 else f" - {mono}")
    if not parts:
        return "0"
    return "".join(parts)


def _reduce(off: int, num: Poly, den: Poly) -> tuple[int, Poly, Poly]:
    num = _trim(num)
    den = _trim(den)
    if not den:
        raise ZeroDivisionError("zero denominator")
    if not num:
        return 0, (), _PONE
    # factor t-powers out of numerator and denominator into the offset
    i = 0
    while i < len(num) and not num[i]:
        i += 1
    if i:
        off += i
        num = num[i:]
    j = 0
    while j < len(den) and not den[j]:
        j += 1
    if j:
        off -= j
        den = den[j:]
    if den == _PONE:
        return off, num, den
    if len(den) == 1:
        return off, _pscale(num, 1 / den[0]), _PONE
    g = _pgcd(num, den)
    if len(g) > 1:
        num, _ = _pdivmod(num, g)
        den, _ = _pdivmod(den, g)
    lead = den[-1]
    if lead != 1:
        num = _pscale(num, 1 / lead)
        den = _pscale(den, 1 / lead)
    if den == _PONE:
        return off, num, den
    return off, num, den


ZERO = Coeff(0, (), _PONE, _reduced=True)
ONE = Coeff(0, _PONE, _PONE, _reduced=True)
T = Coeff(1, _PONE, _PONE, _reduced=True)
HALF = Coeff(0, (Fraction(1, 2),), _PONE, _reduced=True)
