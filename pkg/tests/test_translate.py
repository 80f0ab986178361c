from gentlekit.algebra.cohen_macaulay import cm_modules_gentle
from gentlekit.algebra.strings import StringWord, format_string, iso, module_sum, parse_string, string_entry
from gentlekit.algebra.translate import cycle_position, omega_power_tau, tau_string, tau_sum


def _entry(bq, text):
    return string_entry(bq, parse_string(bq, text))


def _words(entries):
    return [format_string(w) for w in entries.words()]


def test_tau_on_saturated_cycle(a3c):
    cycle, i = cycle_position(a3c, _entry(a3c, "@1"))
    assert cycle.arrows == ("a", "b", "c") and i == 0
    assert _words(tau_string(a3c, _entry(a3c, "@1"))) == ["@2"]


def test_tau_by_oracle(d6, gf):
    assert cycle_position(d6, _entry(d6, "@3")) is None
    assert _words(tau_string(d6, _entry(d6, "@3"), gf)) == ["@2"]


def test_tau_of_projective_is_zero(d6, gf):
    assert tau_string(d6, _entry(d6, "e~ l"), gf).is_zero


def test_tau_sum(a3c):
    simples = module_sum(a3c, [string_entry(a3c, StringWord(v)) for v in ("1", "2")])
    assert _words(tau_sum(a3c, simples)) == ["@2", "@3"]


def test_omega_power_tau(d6, gf):
    assert _words(omega_power_tau(d6, _entry(d6, "@3"), 3, gf)) == ["@3"]
    assert _words(omega_power_tau(d6, _entry(d6, "@3"), 0, gf)) == ["@2"]


def test_cycle_formula_agrees_with_oracle(ej8, gf):
    for entry in cm_modules_gentle(ej8):
        by_cycles = tau_string(ej8, entry, gf)
        by_oracle = tau_string(ej8, entry, gf, use_cycles=False)
        assert iso(by_cycles, by_oracle), f"tau {entry}: {by_cycles} vs {by_oracle}"
