import random

import pytest

from gentlekit.algebra import linalg
from gentlekit.algebra.representation import (
    DimensionKind,
    DimensionResult,
    IsoVerdict,
    Representation,
    cover_and_syzygy,
    decompose,
    ext_dim,
    global_dim,
    gorenstein_dimension_oracle,
    hom_basis,
    injective_rep,
    is_iso_rep,
    is_self_injective,
    max_dimension,
    minimal_resolution,
    nakayama,
    oracle_options,
    proj_dim,
    projective_rep,
    regular_representation,
    rep_of_string,
    representation_from_dict,
    representation_to_dict,
    simple_rep,
    tau_rep,
)
from gentlekit.algebra.strings import format_string, parse_string
from gentlekit.config import get_settings
from gentlekit.exceptions import CutoffExceededError, ValidationError


def test_path_modules(d6, loop, gf):
    assert projective_rep(d6, "2", gf).dim_vector() == {"2": 1, "1": 1, "6": 1}
    assert injective_rep(d6, "5", gf).dim_vector() == {"6": 1, "5": 1}
    assert projective_rep(loop, "1", gf).dim_vector() == {"1": 2}
    assert regular_representation(d6, gf).total_dim == 17


def test_relations_must_vanish(loop, gf):
    with pytest.raises(ValidationError, match="does not vanish"):
        Representation(loop, gf, {"1": 1}, {"d": linalg.matrix(gf, [[1]], 1, 1)})


def test_hom_dimensions(d6, gf):
    assert len(hom_basis(simple_rep(d6, "3", gf), projective_rep(d6, "5", gf))) == 1
    assert hom_basis(simple_rep(d6, "2", gf), regular_representation(d6, gf)) == []
    for f in hom_basis(projective_rep(d6, "4", gf), projective_rep(d6, "3", gf)):
        assert f.commutes()


def test_iso(lin3, gf):
    forward = rep_of_string(lin3, parse_string(lin3, "a"), gf)
    backward = rep_of_string(lin3, parse_string(lin3, "a~"), gf)
    result = is_iso_rep(forward, backward)
    assert result.verdict == IsoVerdict.ISO
    assert result.isomorphism.commutes()
    assert is_iso_rep(simple_rep(lin3, "2", gf), simple_rep(lin3, "3", gf)).verdict == IsoVerdict.PROVEN_NON_ISO


def test_iso_over_rationals(d6, qq):
    assert is_iso_rep(projective_rep(d6, "4", qq), injective_rep(d6, "1", qq))


def test_kernels(d6, gf):
    assert cover_and_syzygy(simple_rep(d6, "2", gf)).kernel.dim_vector() == {"1": 1, "6": 1}
    step = cover_and_syzygy(rep_of_string(d6, parse_string(d6, "b"), gf))
    assert step.cover_vertices == ("5",)
    assert step.kernel.dim_vector() == {"3": 1}


def test_minimal_resolution_of_injective(d6, gf):
    resolution = minimal_resolution(injective_rep(d6, "5", gf), 4)
    assert resolution.terms == [("6",), ("4",), ("3",)]
    assert resolution.is_finite
    assert resolution.length == 2


def test_nakayama(d6, gf):
    assert nakayama(d6, ["2"], gf).dim_vector() == {"4": 1, "3": 1, "2": 1}


def test_tau(d6, a3c, gf):
    assert tau_rep(simple_rep(d6, "3", gf)).dim_vector() == {"2": 1}
    assert tau_rep(simple_rep(a3c, "1", gf)).dim_vector() == {"2": 1}
    assert tau_rep(projective_rep(d6, "2", gf)).total_dim == 0


def test_ext_into_regular(d6, gf):
    s3 = simple_rep(d6, "3", gf)
    assert [ext_dim(s3, i) for i in range(1, 5)] == [0, 0, 0, 0]
    assert ext_dim(simple_rep(d6, "2", gf), 1) > 0


def test_ext_degree_bounds(d6, gf):
    s3 = simple_rep(d6, "3", gf)
    with pytest.raises(ValidationError):
        ext_dim(s3, 0)
    with pytest.raises(CutoffExceededError):
        ext_dim(s3, 5, cutoff=4)


def test_projective_dimension(d6, gf):
    assert proj_dim(injective_rep(d6, "5", gf)) == DimensionResult.finite(2)
    assert proj_dim(projective_rep(d6, "2", gf)) == DimensionResult.finite(0)
    periodic = proj_dim(simple_rep(d6, "3", gf))
    assert periodic.kind == DimensionKind.INFINITE
    assert (periodic.period, periodic.start) == (4, 1)


def test_projective_dimension_cutoff(d6, gf):
    assert proj_dim(simple_rep(d6, "3", gf), cutoff=2).kind == DimensionKind.UNRESOLVED


def test_gorenstein_dimension(d6, ej8, loop, gf):
    assert gorenstein_dimension_oracle(d6, field=gf) == DimensionResult.finite(2)
    assert gorenstein_dimension_oracle(ej8, field=gf) == DimensionResult.finite(1)
    assert gorenstein_dimension_oracle(loop, field=gf) == DimensionResult.finite(0)


def test_global_dimension(d6, lin3, a3c, gf):
    assert global_dim(d6, field=gf).kind == DimensionKind.INFINITE
    assert global_dim(lin3, field=gf) == DimensionResult.finite(1)
    assert global_dim(a3c, field=gf).kind == DimensionKind.INFINITE


def test_max_dimension():
    finite = [DimensionResult.finite(1), DimensionResult.finite(3)]
    assert max_dimension(finite) == DimensionResult.finite(3)
    assert max_dimension(finite + [DimensionResult.unresolved()]).kind == DimensionKind.UNRESOLVED
    assert max_dimension(finite + [DimensionResult.infinite(2, 0)]).kind == DimensionKind.INFINITE
    assert str(DimensionResult.finite(3)) == "3"
    assert str(DimensionResult.unresolved()) == "unresolved"


def test_decompose_radical(d6, gf):
    radical = cover_and_syzygy(simple_rep(d6, "2", gf)).kernel
    assert [format_string(w) for w in decompose(radical).words()] == ["@1", "@6"]


def test_decompose_indecomposable(d6, gf):
    module = rep_of_string(d6, parse_string(d6, "g d e"), gf)
    result = decompose(module)
    assert [str(e) for e in result] == ["P(4)=g d e"]


def test_self_injective(loop, lin3, gf):
    assert is_self_injective(loop, gf)
    assert not is_self_injective(lin3, gf)


def test_dict_round_trip(d6, gf):
    module = rep_of_string(d6, parse_string(d6, "e~ l"), gf)
    data = representation_to_dict(module)
    assert data["field"] == "GF(10007)"
    assert data["dims"] == {"1": 1, "2": 1, "3": 0, "4": 0, "5": 0, "6": 1}
    assert is_iso_rep(representation_from_dict(d6, data), module)


def test_field_carries_oracle_options():
    settings = get_settings()
    field = linalg.make_field(10007, trials=3, seed=41)
    assert (field.trials, field.seed) == (3, 41)
    trials, rng = oracle_options(field, None, None)
    assert trials == 3 and rng.random() == random.Random(41).random()
    trials, _ = oracle_options(field, 5, None)
    assert trials == 5
    trials, _ = oracle_options(linalg.make_field(10007), None, None)
    assert trials == settings.trials
