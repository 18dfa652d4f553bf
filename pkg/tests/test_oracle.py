import itertools
import math

import numpy as np
import pytest

from dpbdris.closedform import pareto_power
from dpbdris.oracle import (PartitionBudget, bell_number, brute_force_best, enumerate_labelings,
                            enumerate_partitions, is_mixed_pairing, opposite_matchings,
                            oracle_check, verify_prop1)
from dpbdris.scattering import RisArchitecture, complexity, opposite_pairing


def naive_partitions(items):
    """All set partitions by recursive insertion (independent of the RGS enumerator)."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for sub in naive_partitions(rest):
        for k in range(len(sub)):
            yield sub[:k] + [[first] + sub[k]] + sub[k + 1:]
        yield [[first]] + sub


def test_bell_numbers():
    assert [bell_number(n) for n in range(9)] == [1, 1, 2, 5, 15, 52, 203, 877, 4140]
    assert bell_number(12) == 4_213_597


@pytest.mark.parametrize("n", range(1, 11))
def test_enumeration_total(n):
    assert sum(1 for _ in enumerate_labelings(PartitionBudget(n))) == bell_number(n)


def test_enumeration_examples():
    assert sum(1 for _ in enumerate_partitions(PartitionBudget(3))) == 5
    parts = list(enumerate_partitions(PartitionBudget(4, 5)))
    assert len(parts) == 7
    assert sum(1 for p in parts if p.group_sizes.count(2) == 1) == 6
    assert [p.groups for p in enumerate_partitions(PartitionBudget(4, 4))] == [((0,), (1,), (2,), (3,))]


@pytest.mark.parametrize("n,cmax", [(5, 5), (5, 7), (6, 9), (7, 12), (6, 21)])
def test_budget_filter_matches_naive(n, cmax):
    expected = set()
    for p in naive_partitions(list(range(n))):
        arch = RisArchitecture(n, tuple(tuple(g) for g in p))
        if complexity(arch) <= cmax:
            expected.add(arch.canonical())
    got = [a.canonical() for a in enumerate_partitions(PartitionBudget(n, cmax))]
    assert len(got) == len(set(got))
    assert set(got) == expected


def test_enumeration_is_deterministic():
    a = list(enumerate_labelings(PartitionBudget(6, 9)))
    assert a == list(enumerate_labelings(PartitionBudget(6, 9)))


def test_guards():
    with pytest.raises(ValueError):
        list(enumerate_labelings(PartitionBudget(13)))
    with pytest.raises(ValueError):
        PartitionBudget(4, 3)
    with pytest.raises(ValueError):
        brute_force_best(12, 1, 0.5)
    with pytest.raises(ValueError):
        brute_force_best(6, 4, 0.5)


def test_brute_force_example_n4():
    res = brute_force_best(4, 1, 0.25)
    assert res.power == pytest.approx((1.25 + 2 * 0.5) ** 2, rel=1e-12)
    assert res.power == pytest.approx(5.0625, rel=1e-12)
    assert res.candidates == 7
    assert {a.canonical() for a in res.maximizers} == {
        ((0, 2), (1,), (3,)), ((0, 3), (1,), (2,)), ((0,), (1, 2), (3,)), ((0,), (1, 3), (2,))}


def test_brute_force_chi_one_ties():
    res = brute_force_best(4, 1, 1.0)
    assert res.power == pytest.approx(16.0, rel=1e-12)
    # with indistinguishable polarizations every feasible partition ties,
    # same-polarization pairs and the all-singleton surface included
    assert len(res.maximizers) == res.candidates == 7


def test_brute_force_endpoint_n6():
    res = brute_force_best(6, 3, 0.5)
    assert res.power == pytest.approx(20.25, rel=1e-12)
    assert res.power == pytest.approx(1.5 ** 2 / 4 * 36, rel=1e-12)


def test_brute_force_phase_independence():
    powers = [brute_force_best(6, 2, 0.3, seed=s).power for s in range(10)]
    np.testing.assert_allclose(powers, powers[0], rtol=1e-9)


@pytest.mark.parametrize("n", [4, 6, 8])
def test_oracle_agrees_with_formula(n):
    for k in range(n // 2 + 1):
        for chi in (0.0, 0.1, 0.5, 0.9, 1.0):
            res = brute_force_best(n, k, chi, seed=k)
            assert res.power == pytest.approx(pareto_power(n, k, chi), rel=1e-9, abs=1e-12)
            if 0 < chi < 1 and k >= 1:
                assert all(is_mixed_pairing(a, k) for a in res.maximizers)


def test_prop1_examples():
    assert verify_prop1(2, 0.3, RisArchitecture(2, ((0, 1),)))
    assert verify_prop1(8, 0.0, opposite_pairing(8))
    matchings = list(opposite_matchings(8))
    assert len(matchings) == math.factorial(4) == 24
    assert all(verify_prop1(8, 0.6, m) for m in matchings)


def test_prop1_power_value():
    # N = 2, one V/H pair: (1 + chi)^2
    res = brute_force_best(2, 1, 0.3)
    assert res.power == pytest.approx(1.3 ** 2, rel=1e-12)


def test_prop1_rejects_invalid_matching():
    with pytest.raises(ValueError):
        verify_prop1(4, 0.5, RisArchitecture(4, ((0, 1), (2, 3))))
    with pytest.raises(ValueError):
        verify_prop1(4, 0.5, RisArchitecture.single(4))


def test_same_polarization_pairing_misses_bound():
    # pairing two vertical elements is strictly worse when chi < 1
    arch = RisArchitecture(4, ((0, 1), (2, 3)))
    assert not is_mixed_pairing(arch, 2)
    res = brute_force_best(4, 2, 0.3)
    assert arch.canonical() not in {a.canonical() for a in res.maximizers}


def test_oracle_check_record():
    rec = oracle_check(6, 2, 0.5, seed=1)
    assert rec["verdict"] == "pass" and rec["structure_ok"] is True
    assert rec["max_complexity"] == 8
    rec = oracle_check(6, 2, 1.0, seed=1)
    assert rec["structure_ok"] is None and rec["verdict"] == "pass"


def test_every_mixed_matching_is_enumerated():
    found = {a.canonical() for a in opposite_matchings(6)}
    expected = set()
    for perm in itertools.permutations(range(3)):
        expected.add(tuple(sorted((i, 3 + j) for i, j in enumerate(perm))))
    assert found == expected
