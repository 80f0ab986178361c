"""
Cohen-Macaulay modules of string algebras and the fixed-point criteria.

For Gorenstein algebras of dimension d a module is Cohen-Macaulay iff
Ext^i(M, Lambda) = 0 for 1 <= i <= d. Gentle algebras have the explicit
description by saturated cycles; other string algebras are decided by
syzygy periodicity with an Ext cross-check.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

from gentlekit.algebra.linalg import ExactField
from gentlekit.algebra.quiver import (
    BoundQuiver,
    classify,
    critical_paths,
    gorenstein_dimension_gentle,
    require_gentle,
    require_string,
    saturated_cycles,
)
from gentlekit.algebra.representation import (
    DimensionResult,
    default_cutoff,
    ext_dim,
    gorenstein_dimension_oracle,
    proj_dim_of_strings,
    rep_of_string,
)
from gentlekit.algebra.strings import (
    ModuleEntry,
    ModuleSum,
    StringWord,
    enumerate_strings,
    format_string,
    iso,
    maximal_paths_uv,
    module_sum,
    path_word,
    string_entry,
    syzygy,
)
from gentlekit.algebra.translate import omega_power_tau
from gentlekit.core.logging import get_logger
from gentlekit.exceptions import ConsistencyError, PreconditionError

logger = get_logger(__name__)

BAND_CAVEAT = "band modules are excluded from enumeration; fixed points are checked over string modules only"


class CMVerdict(str, Enum):
    CM = "cm"
    NOT_CM = "not-cm"
    PROJECTIVE = "projective"
    UNDETERMINED = "undetermined"


class CMMethod(str, Enum):
    SATURATED_CYCLES = "kalck-saturated-cycles"
    PERIODICITY = "periodicity"
    EXT_VANISHING = "ext-vanishing"
    SELF_INJECTIVE = "self-injective"


@dataclass(frozen=True)
class CMTestResult:
    verdict: CMVerdict
    method: Optional[CMMethod] = None
    period: Optional[int] = None
    ext_degree: Optional[int] = None

    @property
    def is_cm(self) -> bool:
        return self.verdict in (CMVerdict.CM, CMVerdict.PROJECTIVE)


@dataclass
class CMReport:
    algebra: str
    gorenstein: DimensionResult
    provenance: str
    method: CMMethod
    cm_modules: List[ModuleEntry]
    fixed_points: List[ModuleEntry] = field(default_factory=list)
    formula_results: Dict[str, bool] = field(default_factory=dict)
    caveats: List[str] = field(default_factory=lambda: [BAND_CAVEAT])

    @property
    def sets_agree(self) -> bool:
        return [e.word for e in self.cm_modules] == [e.word for e in self.fixed_points]


def _unique(bq: BoundQuiver, entries: List[ModuleEntry]) -> List[ModuleEntry]:
    seen, unique = set(), []
    for entry in module_sum(bq, entries):
        if entry.word not in seen:
            seen.add(entry.word)
            unique.append(entry)
    return unique


def cm_modules_gentle(bq: BoundQuiver) -> List[ModuleEntry]:
    """The modules M(u_i) over all saturated cycles: the indecomposable non-projective CM modules."""
    require_gentle(bq)
    entries = [
        string_entry(bq, path_word(bq, u))
        for cycle in saturated_cycles(bq)
        for u, _ in maximal_paths_uv(bq, cycle)
    ]
    return _unique(bq, entries)


def _resolved_gorenstein(bq: BoundQuiver, cutoff: Optional[int], field: Optional[ExactField],
                         gorenstein: Optional[DimensionResult]) -> int:
    result = gorenstein or gorenstein_dimension_oracle(bq, cutoff, field)
    if not result.is_finite:
        raise PreconditionError(f"Gorenstein dimension of {bq.name} is {result}",
                                details={"gorenstein": str(result)})
    return result.value


def stable_period(bq: BoundQuiver, entry: ModuleEntry, cutoff: int) -> Optional[int]:
    """Smallest t >= 1 with stable Omega^t(entry) = entry, if any within cutoff steps."""
    start = module_sum(bq, [entry])
    current = start
    for step in range(1, cutoff + 1):
        current = syzygy(bq, current, stable=True)
        if current.is_zero:
            return None
        if iso(current, start):
            return step
    return None


def cm_test(bq: BoundQuiver, entry: ModuleEntry, cutoff: Optional[int] = None,
            field: Optional[ExactField] = None,
            gorenstein: Optional[DimensionResult] = None) -> CMTestResult:
    """
    Decide whether a string module is Cohen-Macaulay.

    Args:
        bq: A string algebra
        entry: The string module
        cutoff: Resolution and orbit length bound; 2 dim Lambda by default
        field: Field for the Ext computations
        gorenstein: Gorenstein dimension, computed by the oracle when omitted

    Raises:
        PreconditionError: If the Gorenstein dimension is not resolved
        ConsistencyError: If a periodic module has non-vanishing Ext
    """
    require_string(bq)
    entry = string_entry(bq, entry.word)
    if entry.is_projective:
        return CMTestResult(CMVerdict.PROJECTIVE)
    cutoff = default_cutoff(bq) if cutoff is None else cutoff
    d = _resolved_gorenstein(bq, cutoff, field, gorenstein)
    if d == 0:
        return CMTestResult(CMVerdict.CM, CMMethod.SELF_INJECTIVE)

    rep = rep_of_string(bq, entry.word, field)
    period = stable_period(bq, entry, cutoff)
    if period is not None:
        for i in range(1, max(d, 4) + 1):
            if ext_dim(rep, i, max(cutoff, 4)):
                raise ConsistencyError(
                    f"{format_string(entry.word)} is periodic but Ext^{i}(M, Lambda) is nonzero",
                    details={"period": period, "degree": i},
                )
        return CMTestResult(CMVerdict.CM, CMMethod.PERIODICITY, period=period)

    if cutoff < d + 1:
        return CMTestResult(CMVerdict.UNDETERMINED)
    for i in range(1, d + 1):
        if ext_dim(rep, i, cutoff):
            return CMTestResult(CMVerdict.NOT_CM, CMMethod.EXT_VANISHING, ext_degree=i)
    return CMTestResult(CMVerdict.CM, CMMethod.EXT_VANISHING)


def formula_check(bq: BoundQuiver, entry: ModuleEntry, m: int, field: Optional[ExactField] = None) -> bool:
    """Omega^{m+1} tau N = N, stably."""
    return iso(omega_power_tau(bq, entry, m + 1, field), module_sum(bq, [entry]))


def fixed_point_set(bq: BoundQuiver, m: int, max_letters: int,
                    field: Optional[ExactField] = None, exhaustive: bool = False) -> List[ModuleEntry]:
    """
    Non-projective strings N with Omega^{m+1} tau N = N, stably.

    A fixed point is an (m+1)-th syzygy, hence CM once the Gorenstein
    dimension is at most m+1. For gentle algebras within that bound only the
    CM strings are put through the formula, which keeps every step
    combinatorial; exhaustive=True checks every string through the oracle.
    """
    require_string(bq)
    candidates = None
    if not exhaustive and classify(bq).is_gentle and gorenstein_dimension_gentle(bq)[1] <= m + 1:
        candidates = {e.word for e in cm_modules_gentle(bq)}
    found = []
    for word in enumerate_strings(bq, max_letters):
        entry = string_entry(bq, word)
        if entry.is_projective or (candidates is not None and entry.word not in candidates):
            continue
        if formula_check(bq, entry, m, field):
            found.append(entry)
    return found


def cm_set(bq: BoundQuiver, max_letters: int, cutoff: Optional[int] = None,
           field: Optional[ExactField] = None,
           gorenstein: Optional[DimensionResult] = None) -> Tuple[List[ModuleEntry], CMMethod]:
    """Indecomposable non-projective CM string modules and the method that decided them."""
    if classify(bq).is_gentle:
        return cm_modules_gentle(bq), CMMethod.SATURATED_CYCLES
    require_string(bq)
    gorenstein = gorenstein or gorenstein_dimension_oracle(bq, cutoff, field)
    found = []
    method = CMMethod.PERIODICITY
    for word in enumerate_strings(bq, max_letters):
        entry = string_entry(bq, word)
        if entry.is_projective:
            continue
        result = cm_test(bq, entry, cutoff, field, gorenstein)
        if result.verdict == CMVerdict.UNDETERMINED:
            logger.warning(f"CM status of {format_string(word)} undetermined at cutoff")
        if result.verdict == CMVerdict.CM:
            found.append(entry)
            if result.method != CMMethod.PERIODICITY:
                method = result.method
    return found, method


def cm_orbits(bq: BoundQuiver, entries: List[ModuleEntry]) -> List[List[ModuleEntry]]:
    """Partition a CM set into stable syzygy orbits."""
    by_word = {e.word: e for e in entries}
    visited = set()
    orbits = []
    for entry in entries:
        if entry.word in visited:
            continue
        orbit = []
        current = entry
        while current.word not in visited:
            visited.add(current.word)
            orbit.append(current)
            following = syzygy(bq, module_sum(bq, [current]), stable=True)
            if len(following) != 1 or following.entries[0].word not in by_word:
                break
            current = by_word[following.entries[0].word]
        orbits.append(orbit)
    return orbits


def cm_report(bq: BoundQuiver, m: int, max_letters: int, cutoff: Optional[int] = None,
              field: Optional[ExactField] = None) -> CMReport:
    gorenstein = gorenstein_dimension_oracle(bq, cutoff, field)
    cm_modules, method = cm_set(bq, max_letters, cutoff, field, gorenstein)
    fixed = fixed_point_set(bq, m, max_letters, field)
    report = CMReport(bq.name, gorenstein, "oracle", method, cm_modules, fixed)
    for entry in _unique(bq, cm_modules + fixed):
        report.formula_results[format_string(entry.word)] = formula_check(bq, entry, m, field)
    return report


# --- structural conditions ---

@dataclass
class TwoCYReport:
    gorenstein_at_most_one: bool
    relations_on_cycles: bool
    cycles_are_triangles_or_loops: bool
    witnesses: Dict[str, List[str]] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.gorenstein_at_most_one and self.relations_on_cycles and self.cycles_are_triangles_or_loops


def verify_2cy_necessary(bq: BoundQuiver) -> TwoCYReport:
    """The structural conditions every gentle 2-CY tilted algebra satisfies."""
    require_gentle(bq)
    witnesses: Dict[str, List[str]] = {}

    paths, n_lambda = critical_paths(bq)
    long_paths = [str(p) for p in paths if len(p) > 1]
    if long_paths:
        witnesses["gorenstein"] = long_paths

    cycles = saturated_cycles(bq)
    on_cycle = set()
    for cycle in cycles:
        n = cycle.length
        on_cycle.update((cycle.arrows[i], cycle.arrows[(i + 1) % n]) for i in range(n))
    stray = [" ".join(rel) for rel in bq.relations if rel not in on_cycle]
    if stray:
        witnesses["relations"] = stray

    bad_cycles = [str(c) for c in cycles
                  if not (c.length == 1 or (c.length == 3 and len(set(c.vertices)) == 3))]
    if bad_cycles:
        witnesses["cycles"] = bad_cycles

    return TwoCYReport(n_lambda <= 1, not stray, not bad_cycles, witnesses)


class TrichotomyTag(str, Enum):
    CM = "CM"
    SMALL_PROJ_DIM = "proj_dim<=d-1"
    PROJECTIVE = "projective"


def radical_trichotomy(bq: BoundQuiver, vertex: str, cutoff: Optional[int] = None,
                       field: Optional[ExactField] = None) -> List[Tuple[ModuleEntry, TrichotomyTag]]:
    """
    Tag each summand of rad P(vertex) as projective, CM, or of projective dimension <= d-1.

    Raises:
        PreconditionError: If the Gorenstein dimension is unresolved or zero
        ConsistencyError: If a summand fits none of the three cases
    """
    require_string(bq)
    cutoff = default_cutoff(bq) if cutoff is None else cutoff
    gorenstein = gorenstein_dimension_oracle(bq, cutoff, field)
    d = _resolved_gorenstein(bq, cutoff, field, gorenstein)
    if d < 1:
        raise PreconditionError(f"{bq.name} is self-injective; the trichotomy needs d >= 1")

    simple = module_sum(bq, [string_entry(bq, StringWord(vertex))])
    radical: ModuleSum = syzygy(bq, simple, stable=False)
    tagged = []
    for entry in radical:
        if entry.is_projective:
            tagged.append((entry, TrichotomyTag.PROJECTIVE))
            continue
        if cm_test(bq, entry, cutoff, field, gorenstein).is_cm:
            tagged.append((entry, TrichotomyTag.CM))
            continue
        pd = proj_dim_of_strings(bq, module_sum(bq, [entry]), cutoff)
        if pd.is_finite and pd.value <= d - 1:
            tagged.append((entry, TrichotomyTag.SMALL_PROJ_DIM))
            continue
        raise ConsistencyError(
            f"Summand {format_string(entry.word)} of rad P({vertex}) is neither CM nor of "
            f"projective dimension <= {d - 1}",
            details={"projective_dimension": str(pd)},
        )
    return tagged
