import logging
from fractions import Fraction
from math import factorial

import pytest

from drx.exact import interpolate_polynomial
from drx.graphs import StableGraph, automorphism_count
from drx.graphsum import (
    DRRequest,
    chiodo_constant_class,
    compute_DR,
    compute_P_constant,
    compute_P_fixed_r,
    edge_coefficient,
    graph_contribution_fixed_r,
    verify_grr_exponentiation,
)
from drx.strata import Ambient, Decoration, TautClass, normalize, pullback_piZ
from drx.target import TargetModel
from drx.weightings import IncompatibleDataError, Weighting

POINT = TargetModel.point()
LOOP = StableGraph((0,), ((),), (0, 0), ((0, 0),))
SMOOTH = StableGraph.smooth(1, 2)


def edge_series_oracle(P, order):
    """Coefficients of psi^i psi'^j in (1 - exp(-P s/2))/s by expanding sum_m (-1)^{m-1} (P/2)^m s^{m-1}/m!."""
    from math import comb

    out = {}
    for m in range(1, order + 2):
        base = Fraction((-1) ** (m - 1)) * Fraction(P, 2) ** m / factorial(m)
        for i in range(m):
            out[(i, m - 1 - i)] = out.get((i, m - 1 - i), 0) + base * comb(m - 1, i)
    return out


def test_edge_coefficients_match_series():
    P = 7
    oracle = edge_series_oracle(P, 5)
    for (i, j), c in oracle.items():
        assert edge_coefficient(i, j) * P ** (i + j + 1) == c
    assert edge_coefficient(0, 0) == Fraction(1, 2)
    assert edge_coefficient(1, 0) == edge_coefficient(0, 1) == Fraction(-1, 8)


def test_fixed_r_contribution_examples():
    w = Weighting(5, (1, 4), (2, 3))
    assert graph_contribution_fixed_r(LOOP, w, (1, -1), 0, POINT).is_zero()
    smooth_w = Weighting(5, (1, 4), ())
    fund = graph_contribution_fixed_r(SMOOTH, smooth_w, (1, -1), 0, POINT)
    assert fund == TautClass.fundamental(Ambient("X", 1, 2, (), POINT))
    # d = |E| + 1 on a single edge with product p = 6
    out = graph_contribution_fixed_r(LOOP, w, (0, 0), 2, POINT)
    amb = Ambient("X", 1, 2, (), POINT)

    def on(he):
        return Decoration(((0, 0), (0, 0)), (he,), (0,), ((),))

    assert out == normalize(amb, [(LOOP, on((1, 0)), Fraction(-36, 8)), (LOOP, on((0, 1)), Fraction(-36, 8))])


def test_degree_zero_is_fundamental():
    for g, A in [(0, (1, 1, -2)), (1, (3, -3)), (2, (1, 2, -3))]:
        req = DRRequest(g, A, (), POINT, 0)
        assert compute_P_constant(req) == TautClass.fundamental(req.ambient)
    assert compute_DR(0, (4, -1, -3), (), POINT) == TautClass.fundamental(Ambient("X", 0, 3, (), POINT))


def test_genus_one_dr_class():
    # a^2/2 (psi_1 + psi_2) plus -1/24 times the pushforward from the loop graph
    amb = Ambient("X", 1, 2, (), POINT)
    for a in (1, 2, 3):
        dr = compute_DR(1, (a, -a), (), POINT)
        expected = normalize(amb, [
            (SMOOTH, Decoration(((1, 0), (0, 0)), (), (), ((),)), Fraction(a * a, 2)),
            (SMOOTH, Decoration(((0, 0), (1, 0)), (), (), ((),)), Fraction(a * a, 2)),
            (LOOP, Decoration.trivial(LOOP), Fraction(-1, 24)),
        ])
        assert dr == expected


def test_fixed_r_values_interpolate_to_constant_term():
    req = DRRequest(1, (1, -1), (), POINT, 1)
    nodes = list(range(5, 10))
    per_r = [compute_P_fixed_r(req, r).as_dict() for r in nodes]
    assert per_r[0] != per_r[1]
    keys = set().union(*per_r)
    target = compute_P_constant(req).as_dict()
    for k in keys:
        # P^{d,r} is polynomial in r of degree at most 2d
        poly = interpolate_polynomial([(r, vals.get(k, 0)) for r, vals in zip(nodes, per_r)], 2)
        assert poly.constant_term == target.get(k, 0)


def test_fixed_r_point_example_is_consistent_at_r5():
    req = DRRequest(1, (1, -1), (), POINT, 1)
    cls = compute_P_fixed_r(req, 5)
    # loop: sum over w of w(5-w)/2 over r^h1 |Aut|
    expected_loop = Fraction(sum(w * (5 - w) for w in range(5)), 2) / (5 * automorphism_count(LOOP))
    assert cls.coefficient(LOOP) == expected_loop


def test_incompatible_request():
    with pytest.raises(IncompatibleDataError, match="sum of A must equal pairing"):
        DRRequest(1, (1,), (), POINT, 1)


def test_retry_on_small_r_min(caplog):
    req = DRRequest(2, (3, -3), (), POINT, 2)
    with caplog.at_level(logging.WARNING, logger="drx.weightings"):
        low = compute_P_constant(req, r_min=2)
    assert any("retrying" in rec.message for rec in caplog.records)
    assert low == compute_P_constant(req)


def test_parallel_matches_serial():
    t = TargetModel.free((1,))
    req = DRRequest(1, (2, -1), (1,), t, 1)
    assert compute_P_constant(req, jobs=1) == compute_P_constant(req, jobs=3)


def test_chiodo_degree_zero():
    z = chiodo_constant_class(1, (1, -1), (), POINT, 0)
    assert len(z) == 1 and z.terms[0][1] == 1 and z.terms[0][0].graph.num_edges == 0


@pytest.mark.parametrize("target,A,beta", [
    (TargetModel.point(), (1, -1), ()),
    (TargetModel.free((0,)), (1, -1), (1,)),
    (TargetModel.free((2,)), (3, -1), (1,)),
])
def test_chiodo_pullback_reproduces_constant_term(target, A, beta):
    for k in range(2):
        z = chiodo_constant_class(1, A, beta, target, k)
        x = compute_P_constant(DRRequest(1, A, beta, target, k))
        assert pullback_piZ(z, A, target, beta) == x


def test_grr_examples():
    assert verify_grr_exponentiation(1, 1).passed
    assert verify_grr_exponentiation(8, 8).passed
    report = verify_grr_exponentiation(8, 8, flip_sign=True)
    assert not report.passed and report.failures
