import random

import pytest
from sympy import Rational

from gentlekit.algebra.blocks import (
    BlockKind,
    Outlet,
    PathCombination,
    Potential,
    block_structure_isomorphic,
    cyclic_derivative,
    decompose_blocks,
    format_potential,
    glue,
    jacobian_quiver,
    jacobian_relations,
    parse_potential,
    potential_from_decomposition,
    random_block_instance,
    verify_jacobian_equals,
)
from gentlekit.algebra.quiver import classify, nonzero_paths, parse_bound_quiver, saturated_cycles
from gentlekit.exceptions import BlockRuleError, FieldError, ParseError

I, II, LOOP = BlockKind.I, BlockKind.II, BlockKind.LOOP


def _o(block, index):
    return Outlet(block, index)


def _triangle_potential():
    potential = Potential()
    potential.add_term(["a", "b", "c"], 1)
    return potential


def test_glue_single_blocks():
    bq, dec = glue([II], [])
    assert bq.vertices == ("v1", "v2", "v3")
    assert [a.id for a in bq.arrows] == ["a0", "b0", "c0"]
    assert len(bq.relations) == 3
    assert dec.counts() == {"I": 0, "II": 1, "Loop": 0}

    bq, _ = glue([LOOP], [])
    assert bq.relations == (("d0", "d0"),)


def test_glue_identifies_outlets():
    bq, dec = glue([I, II], [(_o(0, 1), _o(1, 0))])
    assert len(bq.vertices) == 4
    assert classify(bq).is_gentle
    assert dec.matching == ((_o(0, 1), _o(1, 0)),)


@pytest.mark.parametrize("kinds, matching, rule", [
    ([LOOP, LOOP], [(_o(0, 0), _o(1, 0))], "loop-loop matching"),
    ([II], [(_o(0, 0), _o(0, 1))], "same-block matching"),
    ([I, I, I], [(_o(0, 0), _o(1, 0)), (_o(0, 0), _o(2, 0))], "partial matching"),
    ([I], [(_o(0, 5), _o(0, 0))], "unknown outlet"),
    ([I, I], [(_o(1, 1), _o(1, 1))], "self matching"),
    ([I, I], [(_o(0, 1), _o(1, 0)), (_o(1, 1), _o(0, 0))], "antiparallel arrows"),
    ([I, I, I], [(_o(0, 1), _o(1, 0)), (_o(1, 1), _o(2, 0)), (_o(2, 1), _o(0, 0))], "admissible"),
])
def test_glue_rules(kinds, matching, rule):
    with pytest.raises(BlockRuleError) as info:
        glue(kinds, matching)
    assert info.value.rule == rule


def test_decompose_ej8(ej8):
    result = decompose_blocks(ej8)
    assert result.ok
    assert result.decomposition.counts() == {"I": 2, "II": 3, "Loop": 1}
    assert len(result.decomposition.matching) == 6


def test_decompose_small(lin3, a3c):
    result = decompose_blocks(lin3)
    assert result.decomposition.counts()["I"] == 2
    assert len(result.decomposition.matching) == 1
    assert decompose_blocks(a3c).decomposition.counts()["II"] == 1


def test_decompose_failures(d6):
    result = decompose_blocks(d6)
    assert not result.ok
    assert result.rule == "gentle"
    assert result.witness == ("G2",)

    two_cycle = parse_bound_quiver("quiver t\nvertex 1 2\narrow x 1 2\narrow y 2 1\nrel x y\nrel y x\n")
    assert decompose_blocks(two_cycle).rule == "saturated cycle that is neither a triangle nor a loop"

    chain = parse_bound_quiver("quiver c\nvertex 1 2 3\narrow a 1 2\narrow b 2 3\nrel a b\n")
    result = decompose_blocks(chain)
    assert result.rule == "critical path of length > 1"
    assert result.witness == ("a b",)


@pytest.mark.parametrize("seed", range(20))
def test_glue_then_decompose(seed):
    kinds, matching, bq = random_block_instance(seed)
    _, glued = glue(kinds, matching, name=bq.name)
    result = decompose_blocks(bq)
    assert result.ok, f"seed {seed}: {result.rule} {result.witness}"
    assert block_structure_isomorphic(glued, result.decomposition)


def test_random_instance_is_deterministic():
    assert random_block_instance(7)[2] == random_block_instance(7)[2]


def test_structure_comparison_sees_matching():
    _, joined = glue([I, I], [(_o(0, 1), _o(1, 0))])
    _, apart = glue([I, I], [])
    assert not block_structure_isomorphic(joined, apart)


def test_cyclic_derivative():
    cube = Potential()
    cube.add_term(["d", "d", "d"], 1)
    assert cyclic_derivative(cube, "d").terms == {("d", "d"): 3}
    assert cyclic_derivative(_triangle_potential(), "a").terms == {("b", "c"): 1}
    assert cyclic_derivative(_triangle_potential(), "x").is_empty


def test_potential_terms_cancel():
    potential = _triangle_potential()
    potential.add_term(["b", "c", "a"], -1)
    assert potential.is_zero


def test_jacobian_relations_ej8(ej8):
    potential = potential_from_decomposition(decompose_blocks(ej8).decomposition)
    relations = jacobian_relations(ej8, potential, 0)
    assert len(relations) == 12
    by_arrow = {r.arrow: r for r in relations}
    assert by_arrow["l1"].terms == {} and not by_arrow["l1"].vanished
    assert by_arrow["a1"].terms == {("b1", "g1"): 1}


def test_loop_vanishes_in_characteristic_three(loop):
    cube = potential_from_decomposition(decompose_blocks(loop).decomposition)
    [relation] = jacobian_relations(loop, cube, 3)
    assert relation.vanished


@pytest.mark.parametrize("characteristic", [0, 10007])
def test_jacobian_equals_relations(ej8, characteristic):
    potential = potential_from_decomposition(decompose_blocks(ej8).decomposition)
    assert verify_jacobian_equals(ej8, potential, characteristic).equal


def test_jacobian_in_characteristic_three(ej8, a3c):
    potential = potential_from_decomposition(decompose_blocks(ej8).decomposition)
    verdict = verify_jacobian_equals(ej8, potential, 3)
    assert not verdict.equal
    assert verdict.missing == ["d1 d1"]
    assert len(verdict.vanished) == 1
    assert verify_jacobian_equals(a3c, _triangle_potential(), 2).equal


def test_coefficient_undefined_in_characteristic(a3c):
    potential = Potential()
    potential.add_term(["a", "b", "c"], Rational(1, 5))
    with pytest.raises(FieldError):
        jacobian_relations(a3c, potential, 5)
    assert jacobian_relations(a3c, potential, 7)[0].terms == {("b", "c"): 3}


def test_parse_potential_file(ej8, fixtures_dir):
    parsed = parse_potential(ej8, (fixtures_dir / "ej8.pot").read_text())
    assert parsed == potential_from_decomposition(decompose_blocks(ej8).decomposition)


@pytest.mark.parametrize("text", ["foo 1 a b c", "term x a b c", "term 1 z", "term 1 a b"])
def test_parse_potential_errors(a3c, text):
    with pytest.raises(ParseError):
        parse_potential(a3c, text)


def test_format_potential(a3c):
    assert format_potential(_triangle_potential()) == "term 1 a b c\n"
    assert parse_potential(a3c, format_potential(_triangle_potential())) == _triangle_potential()


def test_saturated_cycles_of_glued_blocks():
    bq, _ = glue([II, LOOP], [(_o(0, 0), _o(1, 0))])
    assert [c.length for c in saturated_cycles(bq)] == [3, 1]


def _random_potential(bq, rng):
    """Random combination of short cycles of the quiver, integer coefficients."""
    cycles = [(a.id,) for a in bq.arrows if a.source == a.target]
    cycles += [(a.id, b.id) for a in bq.arrows for b in bq.quiver.outgoing(a.target) if b.target == a.source]
    cycles += [(a.id, b.id, c.id) for a in bq.arrows for b in bq.quiver.outgoing(a.target)
               for c in bq.quiver.outgoing(b.target) if c.target == a.source]
    potential = Potential()
    for _ in range(rng.randint(1, 6)):
        cycle = rng.choice(cycles)
        potential.add_term(cycle * rng.randint(1, 2), rng.randint(-3, 3) or 1)
    return potential


def _scaled(potential, factor):
    result = Potential()
    for cycle, c in potential.terms.items():
        result.add_term(cycle, c * factor)
    return result


@pytest.mark.parametrize("seed", range(20))
def test_cyclic_derivative_is_linear(ej8, seed):
    rng = random.Random(seed)
    first, second = _random_potential(ej8, rng), _random_potential(ej8, rng)
    factor = Rational(rng.randint(1, 5), rng.randint(1, 5))
    for arrow in ej8.arrows:
        total = cyclic_derivative(first + second, arrow.id)
        assert total == cyclic_derivative(first, arrow.id) + cyclic_derivative(second, arrow.id)
        scaled = cyclic_derivative(_scaled(first, factor), arrow.id)
        expected = PathCombination()
        for path, c in cyclic_derivative(first, arrow.id).terms.items():
            expected.add(path, c * factor)
        assert scaled == expected


@pytest.mark.parametrize("characteristic", [0, 5])
def test_jacobian_quiver_has_the_same_basis(ej8, characteristic):
    dec = decompose_blocks(ej8).decomposition
    jac = jacobian_quiver(ej8, potential_from_decomposition(dec), characteristic)
    assert sorted(jac.relations) == sorted(ej8.relations)
    assert sorted(map(str, nonzero_paths(jac))) == sorted(map(str, nonzero_paths(ej8)))


def test_jacobian_quiver_needs_monomial_derivatives(a3c):
    potential = _triangle_potential()
    potential.add_term(["a", "b", "c"] * 2, 1)
    assert jacobian_quiver(a3c, potential, 0) is None
