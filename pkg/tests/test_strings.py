import random

import pytest

from gentlekit.algebra.quiver import saturated_cycles
from gentlekit.algebra.strings import (
    Letter,
    StringWord,
    canonical,
    detect_bands,
    dim_vector,
    enumerate_strings,
    format_string,
    injective_word,
    inverse_word,
    iso,
    letter_ends,
    maximal_paths_uv,
    module_sum,
    parse_string,
    projective_cover_string,
    projective_word,
    string_entry,
    syzygy,
    syzygy_orbit,
    tau_on_cycle,
    top_socle,
)
from gentlekit.exceptions import ParseError, PreconditionError


def _sum(bq, *texts):
    return module_sum(bq, [string_entry(bq, parse_string(bq, text)) for text in texts])


def test_parse_and_format(d6):
    word = parse_string(d6, "e~ l")
    assert word.start == "1"
    assert word.letters == (Letter("e", True), Letter("l"))
    assert format_string(word) == "e~ l"
    assert format_string(parse_string(d6, "@3")) == "@3"


@pytest.mark.parametrize("text, column", [("x", 1), ("e l~", 3), ("@9", 2)])
def test_parse_errors(d6, text, column):
    with pytest.raises(ParseError) as info:
        parse_string(d6, text)
    assert info.value.column == column, f"{text!r}: column {info.value.column}"


def test_is_string(a3c, d6, lin3):
    from gentlekit.algebra.strings import is_string

    check = is_string(a3c, parse_string(a3c, "a b"))
    assert not check
    assert check.position == 1
    assert is_string(d6, parse_string(d6, "d e"))
    cancelling = is_string(lin3, parse_string(lin3, "a a~"))
    assert not cancelling and "cancels" in cancelling.reason


def test_canonical_picks_smaller_direction(d6):
    word = parse_string(d6, "l~ e")
    assert format_string(canonical(d6, word)) == "e~ l"
    assert canonical(d6, inverse_word(d6, word)) == canonical(d6, word)


def test_dim_vector(d6, ej8):
    assert dim_vector(d6, parse_string(d6, "b")) == {"5": 1, "4": 1}
    assert dim_vector(ej8, parse_string(ej8, "l1")) == {"8": 1, "7": 1}


def test_top_and_socle(d6):
    assert top_socle(d6, parse_string(d6, "e~ l")) == (("2",), ("1", "6"))
    assert top_socle(d6, StringWord("3")) == (("3",), ("3",))


def test_projective_words(a3c, d6):
    assert format_string(projective_word(a3c, "1")) == "a"
    assert format_string(projective_word(d6, "4")) == "g d e"
    assert format_string(projective_word(d6, "2")) == "e~ l"
    assert format_string(projective_word(d6, "1")) == "@1"


def test_injective_words(a3c, d6):
    assert format_string(injective_word(d6, "1")) == "g d e"
    assert format_string(injective_word(d6, "5")) == "a"
    assert format_string(injective_word(a3c, "2")) == "a"


def test_string_entry_tags_projectives(d6):
    entry = string_entry(d6, parse_string(d6, "g d e"))
    assert entry.projective_at == "4"
    assert str(entry) == "P(4)=g d e"
    assert not string_entry(d6, StringWord("3")).is_projective


def test_module_sum_order(d6):
    total = _sum(d6, "b", "@6", "e", "@3")
    assert [format_string(w) for w in total.words()] == ["@3", "@6", "e", "b"]


def test_syzygy_of_simple(a3c):
    assert [format_string(w) for w in syzygy(a3c, _sum(a3c, "@1")).words()] == ["@2"]


def test_syzygy_orbit_is_periodic(d6):
    orbit = syzygy_orbit(d6, string_entry(d6, StringWord("3")), 4)
    assert [str(step) for step in orbit] == ["@3", "e", "@6", "b", "@3"]


def test_projective_cover_keeps_projective_kernel(d6):
    result = projective_cover_string(d6, _sum(d6, "@2"))
    assert result.cover == ("2",)
    assert [str(e) for e in result.kernel] == ["P(1)=@1", "@6"]
    assert [format_string(w) for w in syzygy(d6, _sum(d6, "@2")).words()] == ["@6"]


def test_syzygy_of_projective_is_zero(d6):
    assert syzygy(d6, _sum(d6, "e~ l")).is_zero


def test_maximal_paths_on_cycle(ej8):
    cycle = next(c for c in saturated_cycles(ej8) if c.arrows == ("a3", "b3", "g3"))
    data = maximal_paths_uv(ej8, cycle)
    u_at_4, _ = data[2]
    assert str(u_at_4) == "l2 b1 b2"
    u_at_7, v_at_7 = data[1]
    assert u_at_7.is_trivial
    assert str(v_at_7) == "l1"


def test_maximal_paths_need_gentle(d6, a3c):
    cycle = saturated_cycles(a3c)[0]
    with pytest.raises(PreconditionError):
        maximal_paths_uv(d6, cycle)


def test_tau_on_cycle(a3c):
    cycle = saturated_cycles(a3c)[0]
    assert iso(tau_on_cycle(a3c, cycle, 0), _sum(a3c, "@2"))


def test_enumerate_strings(lin3, d6):
    assert [format_string(w) for w in enumerate_strings(lin3, 2)] == ["@1", "@2", "@3", "a", "b", "a b"]
    assert len(enumerate_strings(d6, 0)) == 6


def test_enumeration_skips_relations(a3c):
    words = [format_string(w) for w in enumerate_strings(a3c, 3)]
    assert "a b" not in words
    assert words == ["@1", "@2", "@3", "a", "b", "c"]


def test_bands(a3c):
    assert detect_bands(a3c, 4) == []


def test_kronecker_band():
    from gentlekit.algebra.quiver import parse_bound_quiver

    kronecker = parse_bound_quiver("quiver k\nvertex 1 2\narrow x 1 2\narrow y 1 2\n")
    bands = detect_bands(kronecker, 2)
    assert [str(b) for b in bands] == ["x y~"]


def _random_walk(bq, rng, max_letters):
    """A walk in the quiver that never steps straight back; not necessarily a string."""
    start = rng.choice(bq.vertices)
    end, letters = start, []
    for _ in range(rng.randint(0, max_letters)):
        options = [Letter(a.id) for a in bq.quiver.outgoing(end)]
        options += [Letter(a.id, True) for a in bq.quiver.incoming(end)]
        if letters:
            options = [o for o in options if o != letters[-1].flipped()]
        if not options:
            break
        letter = rng.choice(options)
        letters.append(letter)
        end = letter_ends(bq, letter)[1]
    return StringWord(start, tuple(letters))


@pytest.mark.parametrize("name", ["ej8", "d6"])
def test_canonical_is_idempotent_on_random_walks(load_bq, name):
    bq = load_bq(name)
    rng = random.Random(name)
    for _ in range(1000):
        word = _random_walk(bq, rng, 8)
        chosen = canonical(bq, word)
        assert canonical(bq, chosen) == chosen
        assert chosen in (word, inverse_word(bq, word))
        assert canonical(bq, inverse_word(bq, word)) == chosen
