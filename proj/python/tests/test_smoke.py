import itertools
import math

import pytest

leeisd = pytest.importorskip("leeisd")


def brute_sphere(t, n, q):
    weight = lambda x: min(x, q - x)
    return sum(1 for v in itertools.product(range(q), repeat=n) if sum(map(weight, v)) == t)


def test_ring():
    r = leeisd.Ring(2, 3)
    assert (r.q, r.M) == (8, 4)
    assert [r.lee_weight(x) for x in range(8)] == [0, 1, 2, 3, 4, 3, 2, 1]


@pytest.mark.parametrize("q", [4, 5, 7])
def test_counts_match_enumeration(q):
    ring = leeisd.Ring.from_modulus(q)
    for t in range(4 * ring.M + 1):
        assert leeisd.count_sphere(t, 4, ring) == brute_sphere(t, 4, q)
    assert leeisd.count_ball(4 * ring.M, 4, ring) == q**4


def test_exact_counts_are_python_ints():
    big = leeisd.count_sphere(3000, 2000, leeisd.Ring(47))
    assert isinstance(big, int) and big.bit_length() > 64


def test_sampler_hits_the_sphere():
    ring = leeisd.Ring(7)
    v = leeisd.sample_sphere(30, 40, ring, seed=1)
    assert len(v) == 40 and leeisd.lee_weight(v, ring) == 30
    assert v == leeisd.sample_sphere(30, 40, ring, seed=1)


def test_generate_solve_verify():
    ring = leeisd.Ring(5)
    t = leeisd.gv_weight(20, 10, ring)
    inst, planted = leeisd.random_instance(20, 10, t, ring, seed=4)
    assert leeisd.verify(inst, planted)
    report = leeisd.solve(inst, seed=9)
    assert leeisd.verify(inst, report["solution"])
    assert report["iterations"] >= 1
    rebuilt = leeisd.Instance.from_arrays(ring, inst.H, inst.s, inst.t)
    assert leeisd.verify(rebuilt, report["solution"])


def test_budget_exhaustion_raises():
    ring = leeisd.Ring(7)
    inst, _ = leeisd.random_instance(40, 20, leeisd.gv_weight(40, 20, ring), ring, seed=2)
    with pytest.raises(leeisd.BudgetExhausted):
        leeisd.solve(inst, seed=1, budget=1, mode="below")


def test_asymptotic_optimizer():
    ring = leeisd.Ring(47)
    p = leeisd.optimize_at_rate(0.4, ring, amortized=True, starts=4)
    assert p["found"]
    assert 0 < p["total"] < 0.2
    assert math.isclose(leeisd.sphere_exponent(ring.M * (ring.M + 1) / (2 * ring.M + 1), ring), 1.0)
