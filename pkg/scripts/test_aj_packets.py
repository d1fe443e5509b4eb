"""
Tests for cohomological A-packets of the three real forms of SO5.
"""

from fractions import Fraction

import pytest

from src.aj_packets import (
    FORM_LABELS,
    admissible_levis,
    cohomology_degrees,
    packet_rows,
    packet_size,
    packet_table,
    real_form,
    theta_parabolic_reps,
    total_dim_check,
    weyl_K,
    weyl_levi,
)
from src.arthur import LeviLabel
from src.errors import DomainError
from src.lie_core import Weight

SIZES = {
    ("split", "T"): 4, ("split", "M"): 3, ("split", "S"): 2, ("split", "G"): 1,
    ("hyperbolic", "T"): 2, ("hyperbolic", "M"): 1, ("hyperbolic", "S"): 2, ("hyperbolic", "G"): 1,
    ("compact", "T"): 1, ("compact", "M"): 1, ("compact", "S"): 1, ("compact", "G"): 1,
}

DEGREES = {
    ("split", "T"): [[3], [3], [3], [3]],
    ("split", "M"): [[2, 4], [3], [3]],
    ("split", "S"): [[2, 4], [2, 4]],
    ("split", "G"): [[0, 2, 4, 6]],
    ("hyperbolic", "T"): [[2], [2]],
    ("hyperbolic", "M"): [[1, 3]],
    ("hyperbolic", "S"): [[2], [2]],
    ("hyperbolic", "G"): [[0, 4]],
    ("compact", "T"): [[0]],
    ("compact", "M"): [[0]],
    ("compact", "S"): [[0]],
    ("compact", "G"): [[0]],
}


def test_real_form_dimensions():
    assert real_form("split").dim_p == 6
    assert real_form("hyperbolic").dim_p == 4
    assert real_form("compact").dim_p == 0
    with pytest.raises(DomainError):
        real_form("quaternionic")


@pytest.mark.parametrize("form,order", [("split", 2), ("hyperbolic", 4), ("compact", 8)])
def test_weyl_K_orders(form, order):
    assert len(weyl_K(form)) == order


def test_hyperbolic_weyl_K_keeps_root_lines_apart():
    plus = {Weight.of(1, 1), Weight.of(-1, -1)}
    minus = {Weight.of(1, -1), Weight.of(-1, 1)}
    for w in weyl_K("hyperbolic"):
        assert {w.act(a) for a in plus} == plus
        assert {w.act(a) for a in minus} == minus


@pytest.mark.parametrize("levi,order", [("T", 1), ("M", 2), ("S", 2), ("G", 8)])
def test_levi_weyl_orders(levi, order):
    assert len(weyl_levi(levi)) == order


@pytest.mark.parametrize("key", sorted(SIZES))
def test_packet_sizes(key):
    form, levi = key
    assert packet_size(form, levi) == SIZES[key]
    assert len(theta_parabolic_reps(form, levi)) == SIZES[key]


@pytest.mark.parametrize("key", sorted(DEGREES))
def test_degree_sets(key):
    report = cohomology_degrees(*key)
    assert report.degree_sets == DEGREES[key]
    assert report.total_dim == sum(len(s) for s in DEGREES[key])


def test_split_klingen_representatives():
    reps = theta_parabolic_reps("split", "M")
    assert reps == [Weight.of(1, 0), Weight.of(0, 1), Weight.of(0, -1)]


def test_hyperbolic_siegel_representatives():
    assert theta_parabolic_reps("hyperbolic", "S") == [Weight.of(1, 1), Weight.of(1, -1)]


def test_principal_representative_is_zero():
    assert theta_parabolic_reps("split", "G") == [Weight.zero(2)]


@pytest.mark.parametrize("form", FORM_LABELS)
@pytest.mark.parametrize("levi", [l.value for l in LeviLabel])
def test_total_dim_check(form, levi):
    assert total_dim_check(form, levi)


def test_expected_totals():
    totals = {(r.form, r.levi): r.degree_total_expected for r in packet_table()}
    assert {totals[("split", l)] for l in "TMSG"} == {4}
    assert {totals[("hyperbolic", l)] for l in "TMSG"} == {2}
    assert {totals[("compact", l)] for l in "TMSG"} == {1}


def test_poincare_duality_and_range():
    for report in packet_table():
        for degrees in report.degree_sets:
            assert all(0 <= d <= report.dim_p for d in degrees)
            assert sorted(report.dim_p - d for d in degrees) == degrees


def test_packet_table_order():
    table = packet_table()
    assert len(table) == 12
    assert [(r.form, r.levi) for r in table[:4]] == [("split", l) for l in "TMSG"]


def test_archimedean_rate_recorded():
    assert cohomology_degrees("split", "S").archimedean_rate == "4"
    assert cohomology_degrees("hyperbolic", "G").archimedean_rate == "inf"
    assert cohomology_degrees("compact", "M").archimedean_rate is None


def test_admissible_levis():
    L = LeviLabel
    assert admissible_levis(Weight.zero(2)) == {L.T, L.M, L.S, L.G}
    assert admissible_levis(Weight.of(3, 0)) == {L.T, L.M}
    assert admissible_levis(Weight.of(2, 2)) == {L.T, L.S}
    assert admissible_levis(Weight.of(3, 1)) == {L.T}
    with pytest.raises(DomainError):
        admissible_levis(Weight.of(0, 1))
    with pytest.raises(DomainError):
        admissible_levis(Weight.of(Fraction(1, 2), 0))


def test_packet_rows_filter():
    rows = packet_rows("split", "M")
    assert len(rows) == 1
    assert rows[0]["size"] == 3
    assert rows[0]["degrees"] == "{2,4} {3} {3}"
    assert rows[0]["total_check"] is True
    assert len(packet_rows()) == 12
