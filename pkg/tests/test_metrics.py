import random
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from subshift_lab import words
from subshift_lab.combinatorics import repulsiveness_index
from subshift_lab.graph import build_approx_graph, choice_function, graph_distance, orbit_point
from subshift_lab.metrics import (
    Indistinguishable,
    adversarial_ratio,
    bounded_powers_verdict,
    d_inf,
    d_sup,
    d_tau,
    geometric_bound,
    geometric_ratio,
    lipschitz_profile,
    lipschitz_ratio,
    meet,
    metric_report,
    point_ratios,
    priv_meet,
    ultrametric,
)
from subshift_lab.weights import audit, default_weight, power_weight, weight_from_name

W = default_weight()


@pytest.fixture(scope="module")
def pair(fib):
    return orbit_point(fib, 0), orbit_point(fib, 3)


def test_default_weight():
    assert W(0) == 1 and W(3) == Fraction(1, 4)
    for a in range(1, 200):
        assert W(2 * a) == Fraction(a + 1, 2 * a + 1) * W(a) >= W(a) / 2
    with pytest.raises(ValueError):
        W(-1)


def test_weight_audit():
    report = audit(W)
    assert report.ok and report.max_upper_ratio <= 2 and report.min_lower_ratio >= 0.5
    assert abs(report.decay_exponent - 1) < 0.05
    assert audit(power_weight(2)).ok
    assert weight_from_name("power:1.5")(3) == pytest.approx(4**-1.5)


def test_meets(pair):
    xi, eta = pair
    assert xi.prefix(5) == "10110" and eta.prefix(5) == "10101"
    assert meet(xi, eta, 100) == "101"
    assert priv_meet(xi, eta, 100) == "101"
    with pytest.raises(Indistinguishable):
        meet(xi, orbit_point(xi.oracle, 0), 100)


def test_ultrametric_values(pair):
    xi, eta = pair
    assert ultrametric(xi, eta, W, "rs", 100) == Fraction(1, 4)
    assert ultrametric(xi, eta, W, "priv", 100) == Fraction(1, 4)
    assert d_inf(xi, eta, W, "priv", 100) == Fraction(1, 4)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 3000), min_size=3, max_size=3, unique=True))
def test_ultrametric_inequality(offsets):
    from conftest import FIBONACCI
    from subshift_lab.language import substitution_oracle

    o = substitution_oracle(*FIBONACCI, 400)
    x, y, z = (orbit_point(o, k) for k in offsets)
    # shifts by Fibonacci numbers can agree past the depth; such triples say nothing
    for a, b in ((x, y), (y, z), (x, z)):
        assume(len(words.common_prefix(a.prefix(400), b.prefix(400))) < 400)
    for kind in ("rs", "priv"):
        dxz = ultrametric(x, z, W, kind, 400)
        assert dxz <= max(ultrametric(x, y, W, kind, 400), ultrametric(y, z, W, kind, 400))


def test_identical_points_have_distance_zero(fib):
    tau = choice_function(fib)
    p = tau.point("101")
    assert d_tau(p, p, tau, W, "priv", 100).value == 0
    assert d_sup(p, p, W, "priv", 100).value == 0


@pytest.mark.parametrize("kind", ["rs", "priv"])
@pytest.mark.parametrize("name", ["fib", "tm", "sturm"])
def test_formula_matches_dijkstra(name, kind, request):
    o = request.getfixturevalue(name)
    for tau in (choice_function(o), choice_function(o, "hash", 4)):
        g = build_approx_graph(tau, 14, kind)
        for x in g.vertices[:12]:
            for y in g.vertices[:12]:
                value = d_tau(g.point(x), g.point(y), tau, W, kind, 400)
                assert value.status == "exact"
                assert value.value == graph_distance(g, x, y)


def test_d_inf_matches_ultrametric(fib):
    rng = random.Random(3)
    for _ in range(100):
        a, b = rng.sample(range(2000), 2)
        x, y = orbit_point(fib, a), orbit_point(fib, b)
        assert d_inf(x, y, W, "priv", 400) == ultrametric(x, y, W, "priv", 400)


def test_sandwich_on_orbit_pairs(fib):
    ell = repulsiveness_index(fib, 400).value
    taus = [choice_function(fib, "hash", s) for s in range(20)]
    rng = random.Random(11)
    for _ in range(15):
        a, b = rng.sample(range(2000), 2)
        r = metric_report(fib, orbit_point(fib, a), orbit_point(fib, b), taus, W, 400, ell)
        assert r.sandwich_ok()
        for v in r.d_tilde_tau.values():
            assert r.d_tilde_inf <= v.value <= r.d_tilde_sup.upper


def test_sandwich_on_tau_points(fib):
    ell = repulsiveness_index(fib, 400).value
    taus = [choice_function(fib)] + [choice_function(fib, "hash", s) for s in range(5)]
    pts = [t.point(v) for t in taus[:2] for v in ("", "0", "11", "10110")]
    for x in pts:
        for y in pts:
            if x.prefix(400) != y.prefix(400):
                for t in taus:
                    v = d_tau(x, y, t, W, "priv", 400, ell)
                    assert d_inf(x, y, W, "priv", 400) <= v.value
                    assert v.upper is None or v.upper <= d_sup(x, y, W, "priv", 400, ell).upper


def test_tail_bound_is_geometric(fib):
    ell = repulsiveness_index(fib, 100).value
    g = geometric_ratio(W, ell)
    assert g == 2 * W(ell + 1) and g < 1
    assert geometric_bound(W, ell) == g / (1 - g) == Fraction(2, 1) / ell
    assert geometric_bound(W, Fraction(0)) is None


def test_point_ratios_end_with_empty_sum():
    r = point_ratios([0, 1, 3, 6, 11], W, 11)
    assert r[-1] == 0
    assert r[0] == W(1) + W(3) + W(6) + W(11)
    assert r[2] == (W(6) + W(11)) / W(3)


def test_fibonacci_profile_is_dominated(fib):
    ell = repulsiveness_index(fib, 100).value
    bound = geometric_bound(W, ell)
    for depth in (16, 64, 256, 1024, 4096):
        assert lipschitz_profile(fib, W, depth).max <= bound
    assert lipschitz_ratio(fib, W, 10**6, 64) == 0


def test_verdicts(fib, sturm_n):
    small = bounded_powers_verdict(fib, W, 2)
    assert small.verdict == "inconclusive"
    v = bounded_powers_verdict(fib, W, 100)
    assert v.verdict == "bounded"
    assert v.evidence["repulsiveness"]["100"] == Fraction(21, 53)
    u = bounded_powers_verdict(sturm_n, W, 2000)
    assert u.verdict == "unbounded"
    doubling = u.evidence["profile_doubling"]
    assert doubling["profile"] > 2 * doubling["base"]


def test_adversarial_ratio_small_q(sturm_n):
    a = adversarial_ratio(sturm_n, W, 3)
    assert a.ok and a.ratio >= Fraction(3, 2)


def test_adversarial_search_gives_up(fib):
    a = adversarial_ratio(fib, W, 3, max_search=1 << 12)
    assert not a.ok and "no power of exponent 7" in a.note
