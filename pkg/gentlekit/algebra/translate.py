"""
The Auslander-Reiten translate of string modules.

On saturated cycles of gentle algebras tau M(u_i) = M(v_{i+1}) is read off
the local data of the cycle; every other string module is translated by the
representation oracle and split back into strings.
"""
from typing import Optional

from gentlekit.algebra.linalg import ExactField
from gentlekit.algebra.quiver import BoundQuiver, classify, saturated_cycles
from gentlekit.algebra.representation import decompose, rep_of_string, tau_rep
from gentlekit.algebra.strings import (
    ModuleEntry,
    ModuleSum,
    canonical,
    is_projective_entry,
    maximal_paths_uv,
    module_sum,
    path_word,
    syzygy,
    tau_on_cycle,
)
from gentlekit.core.logging import get_logger

logger = get_logger(__name__)


def cycle_position(bq: BoundQuiver, entry: ModuleEntry):
    """(cycle, i) with entry = M(u_i), or None."""
    if not classify(bq).is_gentle:
        return None
    word = canonical(bq, entry.word)
    for cycle in saturated_cycles(bq):
        for i, (u, _) in enumerate(maximal_paths_uv(bq, cycle)):
            if path_word(bq, u) == word:
                return cycle, i
    return None


def tau_string(bq: BoundQuiver, entry: ModuleEntry, field: Optional[ExactField] = None,
               use_cycles: bool = True) -> ModuleSum:
    """tau of a string module as a sum of strings; projectives go to zero."""
    if entry.is_projective or is_projective_entry(bq, entry.word):
        return ModuleSum()
    if use_cycles:
        position = cycle_position(bq, entry)
        if position is not None:
            cycle, i = position
            return tau_on_cycle(bq, cycle, i)
    translate = tau_rep(rep_of_string(bq, entry.word, field))
    logger.debug(f"tau {entry} has dimension vector {dict(translate.dim_vector())}")
    return decompose(translate)


def tau_sum(bq: BoundQuiver, entries: ModuleSum, field: Optional[ExactField] = None) -> ModuleSum:
    pieces = [e for entry in entries for e in tau_string(bq, entry, field)]
    return module_sum(bq, pieces)


def omega_power_tau(bq: BoundQuiver, entry: ModuleEntry, power: int,
                    field: Optional[ExactField] = None) -> ModuleSum:
    """Stable Omega^power applied to tau of the entry."""
    current = tau_string(bq, entry, field)
    for _ in range(power):
        current = syzygy(bq, current, stable=True)
    return current
