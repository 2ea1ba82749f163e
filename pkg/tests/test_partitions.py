from fractions import Fraction

import pytest

from gwfock.partitions import (
    add_strips,
    character,
    conjugate,
    content_sum,
    enumerate_partitions,
    f2_eigenvalue,
    hook_dimension,
    parse_partition,
    partition_count,
    remove_strips,
    render_partition,
    z_mu,
)


def test_enumeration_counts():
    assert enumerate_partitions(0) == [()]
    assert len(enumerate_partitions(4)) == 5
    assert len(enumerate_partitions(10)) == 42


def test_enumeration_order_reverse_lex():
    assert enumerate_partitions(4) == [(4,), (3, 1), (2, 2), (2, 1, 1),
                                       (1, 1, 1, 1)]


def test_pentagonal_recurrence():
    # p(n) = sum_k (-1)^(k+1) [p(n - k(3k-1)/2) + p(n - k(3k+1)/2)]
    p = [partition_count(n) for n in range(31)]
    for n in range(1, 31):
        s = 0
        k = 1
        while True:
            g1 = k * (3 * k - 1) // 2
            g2 = k * (3 * k + 1) // 2
            if g1 > n and g2 > n:
                break
            sign = 1 if k % 2 == 1 else -1
            if g1 <= n:
                s += sign * p[n - g1]
            if g2 <= n:
                s += sign * p[n - g2]
            k += 1
        assert p[n] == s, n


def test_z_mu():
    assert z_mu(()) == 1
    assert z_mu((2, 1, 1)) == 4
    assert z_mu((3, 3, 2)) == 36


def test_character_small():
    assert character((1,), (1,)) == 1
    assert character((1, 1), (2,)) == -1
    assert character((2,), (1, 1)) == 1
    assert character((2,), (2,)) == 1
    with pytest.raises(ValueError):
        character((2,), (1,))


def test_character_orthogonality():
    for n in range(0, 9):
        parts = enumerate_partitions(n)
        for mu in parts:
            for rho in parts:
                s = sum(character(nu, mu) * character(nu, rho)
                        for nu in parts)
                assert s == (z_mu(mu) if mu == rho else 0), (mu, rho)


def test_character_dimension_is_hook_formula():
    for n in range(0, 9):
        ones = tuple([1] * n)
        for nu in enumerate_partitions(n):
            assert character(nu, ones) == hook_dimension(nu), nu


def test_f2_eigenvalue():
    assert f2_eigenvalue(()) == 0
    assert f2_eigenvalue((2,)) == 1
    assert f2_eigenvalue((1, 1)) == -1
    for n in range(0, 8):
        for lam in enumerate_partitions(n):
            assert f2_eigenvalue(lam) == content_sum(lam)
            assert f2_eigenvalue(lam) == -f2_eigenvalue(conjugate(lam))


def test_strips():
    assert remove_strips((1,), 2) == []
    # adding a strip of size 2 to the empty partition: (2) flat, (1,1) height 1
    res = dict(add_strips((), 2))
    assert res == {(2,): 0, (1, 1): 1}
    # single box removal
    assert dict(remove_strips((1,), 1)) == {(): 0}


def test_render_parse_roundtrip():
    for lam in [(), (1,), (3, 1, 1), (5, 4)]:
        assert parse_partition(render_partition(lam)) == lam
    assert parse_partition("(2, 1)") == (2, 1)
    assert render_partition((2, 1, 1)) == "(2,1,1)"
