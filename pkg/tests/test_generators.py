"""Generators: determinant circuits, bouquets, random regular circuits."""

import math
import random

import pytest

from smlc.circuit import Mul, VarLeaf, validate
from smlc.generators import (
    GenConfig,
    NeedAtLeastOneTermPerBucket,
    det_bouquet,
    det_regular_circuit,
    distinct_perms,
    random_regular_circuit,
    sparse_term_bouquet,
)
from smlc.poly import TooLarge, expand, expand_bouquet, random_perm, reference_det


def test_det_n1_is_single_leaf():
    rc = det_regular_circuit(1, (1,))
    assert rc.circuit.nodes == (VarLeaf(1, 1),)


def test_det_identity_matches_reference():
    rc = det_regular_circuit(2, (1, 2))
    assert expand(rc.circuit).terms == reference_det(2).terms


def test_det_arbitrary_order_matches_reference():
    rc = det_regular_circuit(4, (3, 1, 4, 2))
    assert expand(rc.circuit).terms == reference_det(4).terms
    assert rc.sigma == (3, 1, 4, 2)


def test_det_matches_reference_for_many_orders():
    rng = random.Random(21)
    for n in range(1, 6):
        for _ in range(20):
            sigma = random_perm(n, rng)
            rc = det_regular_circuit(n, sigma)
            assert expand(rc.circuit).terms == reference_det(n).terms


def test_det_too_large():
    with pytest.raises(TooLarge):
        det_regular_circuit(9, tuple(range(1, 10)))


def test_bouquet_k1_identical_to_det_circuit():
    b = det_bouquet(3, [(2, 1, 3)], seed=17)
    rc = det_regular_circuit(3, (2, 1, 3))
    assert b.summands[0].circuit == rc.circuit


def test_bouquet_small_examples():
    b = det_bouquet(3, [(1, 2, 3), (3, 2, 1)], seed=7)
    assert expand_bouquet(b).terms == reference_det(3).terms
    b2 = det_bouquet(2, [(1, 2), (2, 1)], seed=7)
    assert all(len(expand(rc.circuit)) == 1 for rc in b2.summands)
    assert expand_bouquet(b2).terms == reference_det(2).terms


def test_bouquet_sums_for_all_small_shapes():
    rng = random.Random(23)
    for n in range(2, 6):
        for k in range(1, min(4, math.factorial(n)) + 1):
            sigmas = distinct_perms(n, k, rng)
            b = det_bouquet(n, sigmas, seed=rng.randrange(2**32))
            assert expand_bouquet(b).terms == reference_det(n).terms
            assert [rc.sigma for rc in b.summands] == sigmas


def test_bouquet_needs_one_term_per_bucket():
    with pytest.raises(NeedAtLeastOneTermPerBucket):
        det_bouquet(2, [(1, 2), (2, 1), (1, 2)], seed=0)
    with pytest.raises(NeedAtLeastOneTermPerBucket):
        sparse_term_bouquet(5, [(1, 2, 3, 4, 5), (5, 4, 3, 2, 1)], terms=1, seed=0)


def test_bouquet_rejects_duplicate_orders():
    with pytest.raises(ValueError):
        det_bouquet(3, [(1, 2, 3), (1, 2, 3)], seed=0)


def test_minimal_budget_is_left_comb():
    n = 4
    rc = random_regular_circuit(GenConfig(n=n, seed=5, size_budget=2 * n - 1), (1, 2, 3, 4))
    nodes = rc.circuit.nodes
    assert len(nodes) == 2 * n - 1
    assert sum(isinstance(nd, Mul) for nd in nodes) == n - 1
    assert sum(isinstance(nd, VarLeaf) for nd in nodes) == n
    assert rc.degree == n


def test_random_circuit_deterministic_per_seed():
    cfg = GenConfig(n=5, seed=123, size_budget=60)
    a = random_regular_circuit(cfg, (2, 4, 1, 5, 3))
    b = random_regular_circuit(cfg, (2, 4, 1, 5, 3))
    assert a.circuit == b.circuit and a.order == b.order


def test_random_circuit_always_valid_and_within_budget():
    rng = random.Random(31)
    for _ in range(60):
        n = rng.randint(1, 6)
        budget = rng.randint(2 * n - 1, 120)
        sigma = random_perm(n, rng)
        rc = random_regular_circuit(GenConfig(n=n, seed=rng.randrange(2**32), size_budget=budget), sigma)
        assert len(rc.circuit.nodes) <= budget
        assert rc.degree == n
        validate(rc.circuit)


def test_genconfig_invariants():
    with pytest.raises(ValueError):
        GenConfig(n=0, seed=0, size_budget=10)
    with pytest.raises(ValueError):
        GenConfig(n=3, seed=0, size_budget=4)
    with pytest.raises(ValueError):
        GenConfig(n=3, seed=0, size_budget=9, k=0)


def test_sparse_term_bouquet_shape():
    rng = random.Random(37)
    sigmas = distinct_perms(9, 2, rng)
    b = sparse_term_bouquet(9, sigmas, terms=50, seed=3)
    poly = expand_bouquet(b)
    assert len(poly) == 50
    assert all(coeff in (1, -1) for coeff in poly.terms.values())
    # deterministic per seed
    again = sparse_term_bouquet(9, sigmas, terms=50, seed=3)
    assert again == b


def test_sparse_term_bouquet_full_sample_is_determinant():
    b = sparse_term_bouquet(3, [(1, 2, 3), (3, 1, 2)], terms=6, seed=1)
    assert expand_bouquet(b).terms == reference_det(3).terms
