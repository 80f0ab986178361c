import pytest

from gentlekit.algebra.cohen_macaulay import (
    CMMethod,
    CMVerdict,
    TrichotomyTag,
    cm_modules_gentle,
    cm_orbits,
    cm_report,
    cm_set,
    cm_test,
    fixed_point_set,
    formula_check,
    radical_trichotomy,
    verify_2cy_necessary,
)
from gentlekit.algebra.quiver import parse_bound_quiver
from gentlekit.algebra.strings import format_string, parse_string, string_entry
from gentlekit.exceptions import ConsistencyError, PreconditionError

D6_CM = ["@3", "@6", "e", "b"]


def _entry(bq, text):
    return string_entry(bq, parse_string(bq, text))


def _words(entries):
    return [format_string(e.word) for e in entries]


def test_cm_modules_of_gentle_algebras(a3c, lin3, loop, ej8):
    assert _words(cm_modules_gentle(a3c)) == ["@1", "@2", "@3"]
    assert cm_modules_gentle(lin3) == []
    assert _words(cm_modules_gentle(loop)) == ["@1"]
    assert "l2 b1 b2" in _words(cm_modules_gentle(ej8))


@pytest.mark.parametrize("text", D6_CM)
def test_periodic_modules_are_cm(d6, gf, text):
    result = cm_test(d6, _entry(d6, text), field=gf)
    assert result.verdict == CMVerdict.CM
    assert result.method == CMMethod.PERIODICITY
    assert result.period == 4


def test_non_cm_and_projective(d6, gf):
    result = cm_test(d6, _entry(d6, "@2"), field=gf)
    assert result.verdict == CMVerdict.NOT_CM
    assert result.ext_degree == 1
    assert not result.is_cm
    assert cm_test(d6, _entry(d6, "g d e"), field=gf).verdict == CMVerdict.PROJECTIVE


def test_self_injective_shortcut(loop, gf):
    result = cm_test(loop, _entry(loop, "@1"), field=gf)
    assert result.method == CMMethod.SELF_INJECTIVE and result.is_cm


def test_formula_check(d6, a3c, lin3, gf):
    assert formula_check(d6, _entry(d6, "@3"), 2, gf)
    assert formula_check(a3c, _entry(a3c, "@1"), 1, gf)
    assert not formula_check(lin3, _entry(lin3, "@2"), 1, gf)


def test_fixed_point_set(d6, lin3, a3c, gf):
    assert _words(fixed_point_set(d6, 2, 6, gf)) == D6_CM
    assert fixed_point_set(lin3, 1, 6, gf) == []
    assert _words(fixed_point_set(a3c, 1, 6, gf)) == ["@1", "@2", "@3"]


@pytest.mark.parametrize("name, m", [("a3c", 1), ("lin3", 1), ("loop", 1)])
def test_screened_fixed_points_match_exhaustive_search(load_bq, gf, name, m):
    bq = load_bq(name)
    screened = fixed_point_set(bq, m, 4, gf)
    assert _words(screened) == _words(fixed_point_set(bq, m, 4, gf, exhaustive=True))


def test_cm_set(d6, a3c, gf):
    found, method = cm_set(d6, 6, field=gf)
    assert _words(found) == D6_CM
    assert method == CMMethod.PERIODICITY
    _, method = cm_set(a3c, 6, field=gf)
    assert method == CMMethod.SATURATED_CYCLES


def test_cm_report_agrees(d6, gf):
    report = cm_report(d6, 2, 6, field=gf)
    assert report.gorenstein.value == 2
    assert report.sets_agree
    assert all(report.formula_results.values()), report.formula_results
    assert report.caveats, "band caveat missing"


def test_cm_orbits(d6, gf):
    found, _ = cm_set(d6, 6, field=gf)
    orbits = cm_orbits(d6, found)
    assert [_words(orbit) for orbit in orbits] == [["@3", "e", "@6", "b"]]


def test_two_cy_conditions(ej8):
    report = verify_2cy_necessary(ej8)
    assert report.passed
    assert report.witnesses == {}


def test_two_cy_conditions_fail():
    chain = parse_bound_quiver("quiver c\nvertex 1 2 3\narrow a 1 2\narrow b 2 3\nrel a b\n")
    report = verify_2cy_necessary(chain)
    assert not report.gorenstein_at_most_one
    assert report.witnesses["relations"] == ["a b"]

    two_cycle = parse_bound_quiver(
        "quiver t\nvertex 1 2\narrow x 1 2\narrow y 2 1\nrel x y\nrel y x\n"
    )
    report = verify_2cy_necessary(two_cycle)
    assert not report.cycles_are_triangles_or_loops
    assert report.witnesses["cycles"] == ["(x y)"]


def test_radical_trichotomy(d6, lin3, gf):
    tagged = [(str(e), tag) for e, tag in radical_trichotomy(d6, "2", field=gf)]
    assert tagged == [("P(1)=@1", TrichotomyTag.PROJECTIVE), ("@6", TrichotomyTag.CM)]
    assert [(str(e), tag) for e, tag in radical_trichotomy(d6, "6", field=gf)] == [("b", TrichotomyTag.CM)]
    assert [tag for _, tag in radical_trichotomy(lin3, "1", field=gf)] == [TrichotomyTag.PROJECTIVE]


def test_radical_trichotomy_needs_positive_dimension(loop, gf):
    with pytest.raises(PreconditionError):
        radical_trichotomy(loop, "1", field=gf)


def test_radical_summand_outside_gentle_case(d6, gf):
    # rad P(5) = M(g): neither CM nor of finite projective dimension
    with pytest.raises(ConsistencyError, match="rad P\\(5\\)"):
        radical_trichotomy(d6, "5", field=gf)
