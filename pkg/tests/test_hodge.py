from fractions import Fraction

import pytest

from gwfock.partitions import enumerate_partitions, partitions_up_to, size
from gwfock.rationals import Coeff, ONE as C1, T
from gwfock.series import FormalSeries, Truncation
from gwfock.fock import (
    AlphaOp,
    DiagExpOp,
    ExpOp,
    FockVector,
    Mono,
    VACUUM,
    state,
    vacuum_expectation,
)
from gwfock.hodge import (
    HodgeFunctionRequest,
    a_integer,
    a_symbolic,
    branch_count,
    connected_disconnected_transform,
    elsv_hodge,
    hodge_npoint,
    hodge_value_series,
    hodge_value_series_from_characters,
    hurwitz_character,
    hurwitz_oracle,
    two_point_closed_form,
)

F = Fraction


def test_hurwitz_character_small():
    assert hurwitz_character(0, (2,)) == F(1, 2)
    assert hurwitz_character(0, (1, 1)) == F(1, 2)
    assert hurwitz_character(1, (1,)) == 0
    assert hurwitz_character(0, (1,)) == 1
    assert hurwitz_character(0, (3,)) == 1


def test_hurwitz_oracle_small():
    assert hurwitz_oracle(0, (2,)) == F(1, 2)
    assert hurwitz_oracle(0, (3,)) == 1
    assert hurwitz_oracle(0, (1,)) == 1
    assert hurwitz_oracle(0, (1, 1)) == F(1, 2)


def test_hurwitz_triple_agreement():
    # character route == oracle for all |mu| <= 5, b <= 6
    for d in range(1, 6):
        for mu in enumerate_partitions(d):
            g = 0
            while branch_count(g, mu) <= 6:
                if branch_count(g, mu) >= 0:
                    a = hurwitz_character(g, mu)
                    b = hurwitz_oracle(g, mu)
                    assert a == b, (g, mu, a, b)
                g += 1


def test_elsv_values():
    assert elsv_hodge(0, (1,)) == 1
    assert elsv_hodge(1, (2,)) == F(1, 12)


def test_hodge_series_routes_agree():
    # u^{-l} <prod A(mu_i, u mu_i)> == ELSV/character H(mu, u), |mu| <= 4
    tr = Truncation(0, -8, 4, ())
    for d in range(1, 5):
        for mu in enumerate_partitions(d):
            lhs = hodge_value_series(mu, tr)
            rhs = hodge_value_series_from_characters(mu, tr)
            assert lhs == rhs, (mu, (lhs - rhs).render())


def test_hodge_one_point_series():
    # H(z1, u): genus-0 layer is 1/z1, and [u^0 z1^2] = 1/24, [u^0 z1] = -1/24
    tr = Truncation(0, -4, 2, (("z1", 3),))
    h = hodge_npoint(HodgeFunctionRequest(["z1"], False, tr))
    assert h.coeff(u=-2, z1=-1) == C1
    assert h.coeff(u=-2, z1=0) == Coeff.of(0)
    assert h.coeff(u=-2, z1=1) == Coeff.of(0)
    assert h.coeff(u=0, z1=2) == Coeff.of(F(1, 24))
    assert h.coeff(u=0, z1=1) == Coeff.of(F(-1, 24))


def test_hodge_two_point_genus_zero_layer():
    # connected genus-0 2-point: z1 z2/(z1+z2) expanded with |z1| < |z2|
    tr = Truncation(0, -2, 2, (("z1", 3), ("z2", 3)))
    h = hodge_npoint(HodgeFunctionRequest(["z1", "z2"], True, tr))
    g0 = h.coeff_of_u(-2)
    assert g0.coeff(z1=1, z2=0) == C1
    assert g0.coeff(z1=2, z2=-1) == Coeff.of(-1)
    assert g0.coeff(z1=3, z2=-2) == C1
    assert g0.coeff(z1=0, z2=1) == Coeff.of(0)
    assert g0.coeff(z1=2, z2=0) == Coeff.of(0)


def test_conjugation_lemma():
    # e^{a1} e^{u F2} a_{-m} e^{-u F2} e^{-a1} = (u^m m^m / m!) A(m, u m)
    import math
    from gwfock.fock import ScalarOp, apply_pipeline
    from gwfock.partitions import f2_eigenvalue
    tr = Truncation(0, -6, 6, (), energy_cap=F(7))
    states = [state(lam) for n in range(0, 5)
              for lam in enumerate_partitions(n)]
    for m in (1, 2, 3):
        op = a_integer(m)
        ops = [
            ExpOp(AlphaOp(1)),
            DiagExpOp(lambda st: Coeff.of(f2_eigenvalue(st.lam)), 1,
                      "e^{u F2}", charge_zero_only=True),
            AlphaOp(-m),
            DiagExpOp(lambda st: Coeff.of(-f2_eigenvalue(st.lam)), 1,
                      "e^{-u F2}", charge_zero_only=True),
            ExpOp(ScalarOp(AlphaOp(1), -1)),
        ]
        for s in states:
            v = FockVector.basis(tr, s)
            ceil2 = 2 * (size(s.lam) + m)
            lhs_vec = apply_pipeline(ops, v, ceil2, tr)
            rhs_vec = op.apply(v, ceil2, tr)
            scale = Coeff.of(F(m ** m, math.factorial(m)))
            mono = FormalSeries.monomial(tr, scale, u=m)
            seen = set(lhs_vec.terms) | set(rhs_vec.terms)
            for st_ in seen:
                le = lhs_vec.weight(st_)
                re = rhs_vec.weight(st_) * mono
                assert le == re, (m, s, st_, (le - re).render())


def test_connected_disconnected_roundtrip():
    tr = Truncation(0, -2, 2, (("a", 2), ("b", 2), ("c", 2)))
    import random
    rnd = random.Random(7)
    fam = {}
    keys = [("a",), ("b",), ("c",), ("a", "b"), ("a", "c"), ("b", "c"),
            ("a", "b", "c")]
    for key in keys:
        terms = {}
        for _ in range(4):
            kq, ku = 0, rnd.randint(-2, 2)
            kz = [0, 0, 0]
            for i, n in enumerate(("a", "b", "c")):
                if n in key:
                    kz[i] = rnd.randint(-1, 2)
            terms[(kq, ku, *kz)] = Coeff.of(F(rnd.randint(-5, 5), 3))
        fam[key] = FormalSeries(tr, terms)
    conn = connected_disconnected_transform(fam, "to_connected")
    back = connected_disconnected_transform(conn, "to_disconnected")
    for key in keys:
        assert back[key] == fam[key], key


def test_two_point_closed_form_matches_operator_route():
    tr = Truncation(0, -2, 4, (("z1", 4), ("z2", 4)))
    closed = two_point_closed_form(tr)
    h = hodge_npoint(HodgeFunctionRequest(["z1", "z2"], True, tr))
    assert closed == h, (closed - h).render()


def test_two_point_closed_form_genus_zero():
    tr = Truncation(0, -2, 2, (("z1", 4), ("z2", 4)))
    closed = two_point_closed_form(tr)
    g0 = closed.coeff_of_u(-2)
    # z1 z2/(z1+z2) = z1 - z1^2/z2 + z1^3/z2^2 - ...
    assert g0.coeff(z1=1, z2=0) == C1
    assert g0.coeff(z1=2, z2=-1) == Coeff.of(-1)
    assert g0.coeff(z1=3, z2=-2) == C1
    assert g0.coeff(z1=1, z2=1) == Coeff.of(0)


def test_a_family_symmetry_and_poles():
    # coefficients of fixed u-power of <A A>, times (z1+z2), are symmetric
    tr = Truncation(0, -2, 2, (("z1", 3), ("z2", 3)))
    h = hodge_npoint(HodgeFunctionRequest(["z1", "z2"], False, tr))
    lin = (FormalSeries.monomial(tr, C1, z1=1)
           + FormalSeries.monomial(tr, C1, z2=1))
    prod = h * lin
    for e in range(-2, 3):
        layer = prod.coeff_of_u(e)
        for key, c in layer.terms.items():
            i1, i2 = key[2], key[3]
            if i1 < 0 or i2 < 0 or i1 > 2 or i2 > 2:
                continue
            swapped = (key[0], key[1], i2, i1)
            assert layer.terms.get(swapped, None) == c, (e, key)


def test_genus_parity():
    # u-exponents of <prod A> are n mod 2 (H itself carries u^{2g-2}, all
    # even); checked on the u^n * H form for n = 1, 2
    tr = Truncation(0, -3, 3, (("z1", 3),))
    h1 = hodge_npoint(HodgeFunctionRequest(["z1"], True, tr))
    assert h1.terms and all((k[1] + 1) % 2 == 1 for k in h1.terms)
    tr2 = Truncation(0, -2, 2, (("z1", 2), ("z2", 2)))
    h2 = hodge_npoint(HodgeFunctionRequest(["z1", "z2"], True, tr2))
    assert h2.terms and all((k[1] + 2) % 2 == 0 for k in h2.terms)


def test_a_integer_one_point():
    # u^{-1} <A(1, u)> = H((1), u):  H_0(1) = 1 at u^{-2}
    tr = Truncation(0, -6, 4, ())
    h = hodge_value_series((1,), tr)
    assert h.coeff(u=-2) == C1
    # and degree bookkeeping: only even u-offsets
    assert all((k[1] + 2) % 2 == 0 for k in h.terms)


def test_a_scalar_z_inverse_coefficient():
    # [z^-1] of A(z, uz) acting on the vacuum pairs to 1/u
    tr = Truncation(0, -3, 3, (("z", 3),))
    op = a_symbolic("z")
    val = vacuum_expectation([op], tr)
    assert val.coeff(u=-1, z=-1) == C1
